#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hpfilter/basis.hpp"
#include "hpfilter/error.hpp"
#include "hpfilter/examples.hpp"
#include "hpfilter/operator.hpp"
#include "hpfilter/spectral.hpp"

namespace hpf::io {

using json = nlohmann::json;

/// Shortest round-trip decimal representation, independent of the locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw InternalError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw InputError(std::string(what) + " must be a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + " must contain only numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InputError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw InputError(std::string(what) + " rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw InputError(std::string(what) + " is ragged");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InputError(std::string(what) + " must contain only numbers");
      m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

namespace detail {

inline const json& field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(std::string(what) + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline BasisId basis_of(const json& j, const BasisId& fallback) {
  if (j.is_object() && j.contains("basis")) {
    if (!j["basis"].is_string()) throw InputError("\"basis\" must be a string");
    return BasisId(j["basis"].get<std::string>());
  }
  return fallback;
}

inline Index require_dim(std::optional<Index> dim, const char* what) {
  if (!dim) throw InputError(std::string(what) + " needs a truncation dimension (--dim or \"dim\")");
  return *dim;
}

inline void check_dim(Index actual, std::optional<Index> dim, const char* what) {
  if (dim && *dim != actual)
    throw DimensionError(std::string(what) + " has dimension " + std::to_string(actual) +
                         " but the truncation dimension is " + std::to_string(*dim));
}

}  // namespace detail

/// Operator spec:
///   {"kind":"diagonal","multipliers":[...]}
///   {"kind":"dense","rows":[[...], ...]}
///   {"kind":"kernel","name":"dirichlet_green","grid_points":N}
/// Diagonal specs may instead name a built-in spectrum ("weighted_shift",
/// "dirichlet_laplacian"). An optional "basis" overrides the default basis.
inline OperatorRep parse_operator(const json& j, std::optional<Index> dim,
                                  const BasisId& default_basis = BasisId::euclidean()) {
  const std::string kind = detail::field(j, "kind", "operator spec").get<std::string>();
  if (kind == "diagonal") {
    if (j.contains("name")) {
      const std::string name = j["name"].get<std::string>();
      const Index n = detail::require_dim(dim, "named diagonal operator");
      if (name == "weighted_shift") return examples::weighted_shift_operator(n);
      if (name == "dirichlet_laplacian") return examples::dirichlet_laplacian(n);
      throw InputError("unknown diagonal operator name \"" + name + "\"");
    }
    Eigen::VectorXd m = vector_from_json(detail::field(j, "multipliers", "diagonal operator"),
                                         "multipliers");
    detail::check_dim(m.size(), dim, "operator");
    return OperatorRep::diagonal(std::move(m), detail::basis_of(j, default_basis));
  }
  if (kind == "dense") {
    Eigen::MatrixXd m = matrix_from_json(detail::field(j, "rows", "dense operator"), "rows");
    detail::check_dim(m.cols(), dim, "operator");
    const BasisId b = detail::basis_of(j, default_basis);
    return OperatorRep::dense(std::move(m), b);
  }
  if (kind == "kernel") {
    const std::string name = detail::field(j, "name", "kernel operator").get<std::string>();
    const Index grid = j.value("grid_points", static_cast<Index>(OperatorRep::kDefaultGridPoints));
    const Index n = dim ? *dim : j.value("dim", Index{0});
    if (n < 1) throw InputError("kernel operator needs a truncation dimension");
    if (name == "dirichlet_green") return examples::dirichlet_green_operator(n, grid);
    throw InputError("unknown kernel \"" + name + "\"");
  }
  throw InputError("unknown operator kind \"" + kind + "\"");
}

/// Covariance spec:
///   {"kind":"diagonal","values":[...]}
///   {"kind":"dense","rows":[[...], ...]}
///   {"kind":"power_decay","scale":c,"exponent":p}   sigma_n = c n^(-p)
inline OperatorRep parse_covariance(const json& j, Index dim, const BasisId& basis) {
  const std::string kind = detail::field(j, "kind", "covariance spec").get<std::string>();
  if (kind == "diagonal") {
    Eigen::VectorXd v = vector_from_json(detail::field(j, "values", "diagonal covariance"), "values");
    detail::check_dim(v.size(), dim, "covariance");
    return OperatorRep::diagonal(std::move(v), basis);
  }
  if (kind == "dense") {
    Eigen::MatrixXd m = matrix_from_json(detail::field(j, "rows", "dense covariance"), "rows");
    if (m.rows() != m.cols()) throw DimensionError("dense covariance must be square");
    detail::check_dim(m.cols(), dim, "covariance");
    return OperatorRep::dense(std::move(m), basis);
  }
  if (kind == "power_decay") {
    const double c = detail::field(j, "scale", "power_decay covariance").get<double>();
    const double p = detail::field(j, "exponent", "power_decay covariance").get<double>();
    return OperatorRep::diagonal(power_decay(c, p, dim), basis);
  }
  throw InputError("unknown covariance kind \"" + kind + "\"");
}

inline json operator_to_json(const OperatorRep& op) {
  json j;
  j["kind"] = to_string(op.kind());
  j["basis"] = op.domain_basis().name();
  switch (op.kind()) {
    case OperatorKind::diagonal:
      j["multipliers"] = to_json(op.multipliers());
      break;
    case OperatorKind::dense:
      j["rows"] = to_json(op.matrix());
      if (op.codomain_basis() != op.domain_basis()) j["codomain_basis"] = op.codomain_basis().name();
      break;
    case OperatorKind::kernel:
      j["name"] = op.kernel_data().name;
      j["grid_points"] = op.kernel_data().grid.size();
      j["dim"] = op.cols();
      break;
  }
  return j;
}

/// Scale config: {"n": int, "kappa_decay": p, "sigma_u_decay": p, "sigma_v_decay": p}.
/// kappa_decay is the decay exponent of the eigenvalues of A^+ A^+* (so the
/// scale weights kappa_j grow like j^p); the sigma exponents follow the
/// power_decay convention sigma_j ~ j^(-p).
struct ScaleConfig {
  std::optional<int> n;
  SpectralDecay decay;
};

inline ScaleConfig parse_scale_config(const json& j) {
  if (!j.is_object()) throw InputError("scale config must be an object");
  ScaleConfig c;
  if (j.contains("n")) {
    c.n = j["n"].get<int>();
    if (*c.n < 0) throw InputError("scale index n must be >= 0");
  }
  if (j.contains("kappa_decay")) c.decay.kappa = j["kappa_decay"].get<double>();
  if (j.contains("sigma_u_decay")) c.decay.sigma_u = j["sigma_u_decay"].get<double>();
  if (j.contains("sigma_v_decay")) c.decay.sigma_v = j["sigma_v_decay"].get<double>();
  return c;
}

/// A numeric series: one value per line, or "t,value" pairs. A leading
/// non-numeric line is treated as a header.
struct Series {
  std::vector<double> t;
  std::vector<double> values;
  bool has_t = false;
};

inline Series read_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input series " + path.string());
  Series s;
  std::string line;
  std::size_t lineno = 0;
  int columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    std::vector<double> nums;
    bool numeric = true;
    for (auto c : cells) {
      auto v = parse_double(c);
      if (!v) {
        numeric = false;
        break;
      }
      nums.push_back(*v);
    }
    if (!numeric) {
      if (s.values.empty() && columns == 0) {
        columns = -1;  // header seen
        continue;
      }
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": not a numeric row");
    }
    const int width = static_cast<int>(nums.size());
    if (width != 1 && width != 2)
      throw InputError(path.string() + ":" + std::to_string(lineno) +
                       ": expected 1 or 2 columns, got " + std::to_string(width));
    if (columns <= 0) {
      columns = width;
      s.has_t = width == 2;
    } else if (width != columns) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": inconsistent column count");
    }
    if (width == 2) {
      s.t.push_back(nums[0]);
      s.values.push_back(nums[1]);
    } else {
      s.values.push_back(nums[0]);
    }
  }
  if (s.values.empty()) throw InputError("input series " + path.string() + " is empty");
  return s;
}

/// Output stream in the classic locale, so numbers never pick up grouping or
/// a comma decimal point from the global locale.
inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.imbue(std::locale::classic());
  return out;
}

/// Writes "index,t,value" rows.
inline void write_series_csv(const std::filesystem::path& path, const std::vector<Index>& index,
                             const Eigen::VectorXd& t, const Eigen::VectorXd& value) {
  std::ofstream out = open_output(path);
  out << "index,t,value\n";
  for (std::size_t i = 0; i < index.size(); ++i)
    out << index[i] << ',' << format_double(t(static_cast<Index>(i))) << ','
        << format_double(value(static_cast<Index>(i))) << '\n';
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace hpf::io
