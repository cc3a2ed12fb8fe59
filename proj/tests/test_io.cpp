#include <gtest/gtest.h>

#include <locale>
#include <filesystem>
#include <fstream>

#include "hpfilter/config.hpp"
#include "hpfilter/io.hpp"

namespace {

using namespace hpf;
using io::json;
namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hpf_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& body) {
    std::ofstream(dir_ / name) << body;
    return dir_ / name;
  }
  fs::path dir_;
};

TEST(ParseOperator, Diagonal) {
  const OperatorRep a = io::parse_operator(json::parse(R"({"kind":"diagonal","multipliers":[0,2,3]})"), 3);
  EXPECT_EQ(a.multipliers(), Eigen::Vector3d(0, 2, 3));
  EXPECT_EQ(a.domain_basis(), BasisId::euclidean());
}

TEST(ParseOperator, DenseWithBasis) {
  const OperatorRep a = io::parse_operator(
      json::parse(R"({"kind":"dense","rows":[[1,2],[3,4]],"basis":"sine-dirichlet"})"), std::nullopt);
  EXPECT_EQ(a.matrix()(1, 0), 3.0);
  EXPECT_EQ(a.domain_basis(), BasisId::sine_dirichlet());
}

TEST(ParseOperator, KernelAndNamed) {
  const OperatorRep k = io::parse_operator(json::parse(R"({"kind":"kernel","name":"dirichlet_green","grid_points":129})"), 6);
  EXPECT_EQ(k.kind(), OperatorKind::kernel);
  EXPECT_EQ(k.cols(), 6);
  const OperatorRep l = io::parse_operator(json::parse(R"({"kind":"diagonal","name":"dirichlet_laplacian"})"), 4);
  EXPECT_EQ(l.domain_basis(), BasisId::sine_dirichlet());
}

TEST(ParseOperator, Errors) {
  EXPECT_THROW(io::parse_operator(json::parse(R"({"kind":"tridiagonal"})"), 3), InputError);
  EXPECT_THROW(io::parse_operator(json::parse(R"({"kind":"dense","rows":[[1,2],[3]]})"), 2), InputError);
  EXPECT_THROW(io::parse_operator(json::parse(R"({"kind":"diagonal","multipliers":[1,2]})"), 3), DimensionError);
  EXPECT_THROW(io::parse_operator(json::parse(R"({"kind":"diagonal","multipliers":["a"]})"), 1), InputError);
  EXPECT_THROW(io::parse_operator(json::parse(R"({"kind":"kernel","name":"heat"})"), 3), InputError);
  EXPECT_THROW(io::parse_operator(json::parse(R"({"multipliers":[1]})"), 1), InputError);
}

TEST(ParseOperator, RoundTripThroughJson) {
  const OperatorRep d = OperatorRep::diagonal(Eigen::Vector3d(0.1, 1e-300, -7.25), BasisId::sine_dirichlet());
  const OperatorRep back = io::parse_operator(json::parse(io::operator_to_json(d).dump()), 3);
  EXPECT_EQ(back.multipliers(), d.multipliers());
  EXPECT_EQ(back.domain_basis(), d.domain_basis());
  Eigen::MatrixXd m(2, 2);
  m << 1.0 / 3.0, 2, 3, 4;
  const OperatorRep dense = io::parse_operator(io::operator_to_json(OperatorRep::dense(m)), 2);
  EXPECT_EQ(dense.matrix(), m);
}

TEST(ParseCovariance, PowerDecay) {
  const OperatorRep c = io::parse_covariance(json::parse(R"({"kind":"power_decay","scale":2,"exponent":1})"), 4,
                                             BasisId::euclidean());
  EXPECT_EQ(c.multipliers(), Eigen::Vector4d(2, 1, 2.0 / 3.0, 0.5));
}

TEST(ParseCovariance, DenseMustBeSquare) {
  EXPECT_THROW(io::parse_covariance(json::parse(R"({"kind":"dense","rows":[[1,2]]})"), 2, BasisId::euclidean()),
               DimensionError);
}

TEST(ParseScale, Fields) {
  const io::ScaleConfig s = io::parse_scale_config(
      json::parse(R"({"n":2,"kappa_decay":4,"sigma_u_decay":0,"sigma_v_decay":1})"));
  EXPECT_EQ(s.n, 2);
  EXPECT_EQ(s.decay.kappa, 4.0);
  EXPECT_EQ(s.decay.sigma_v, 1.0);
  EXPECT_THROW(io::parse_scale_config(json::parse(R"({"n":-1})")), InputError);
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0}) EXPECT_EQ(*io::parse_double(io::format_double(v)), v);
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_FALSE(io::parse_double("1,5"));
  EXPECT_FALSE(io::parse_double(""));
  EXPECT_EQ(*io::parse_double(" +2.5 "), 2.5);
}

TEST_F(TempDir, SeriesOneColumnWithHeader) {
  const io::Series s = io::read_series(write("a.csv", "value\n1\n2.5\n-3\n"));
  EXPECT_FALSE(s.has_t);
  EXPECT_EQ(s.values, (std::vector<double>{1, 2.5, -3}));
}

TEST_F(TempDir, SeriesTwoColumnsCrlf) {
  const io::Series s = io::read_series(write("b.csv", "0,1\r\n0.5,2\r\n1,3\r\n"));
  EXPECT_TRUE(s.has_t);
  EXPECT_EQ(s.t, (std::vector<double>{0, 0.5, 1}));
}

TEST_F(TempDir, SeriesErrors) {
  EXPECT_THROW(io::read_series(dir_ / "missing.csv"), InputError);
  EXPECT_THROW(io::read_series(write("c.csv", "1\nabc\n")), InputError);
  EXPECT_THROW(io::read_series(write("d.csv", "1,2\n3\n")), InputError);
  EXPECT_THROW(io::read_series(write("e.csv", "1,2,3\n")), InputError);
  EXPECT_THROW(io::read_series(write("f.csv", "header\n")), InputError);
}

TEST_F(TempDir, CsvRoundTrip) {
  const Eigen::Vector3d t(0.0, 0.5, 1.0), v(1.0 / 3.0, -1e-12, 7.0);
  io::write_series_csv(dir_ / "out.csv", {1, 2, 3}, t, v);
  std::ifstream in(dir_ / "out.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "index,t,value");
  std::string row;
  std::getline(in, row);
  const auto cells = row.substr(row.rfind(',') + 1);
  EXPECT_EQ(*io::parse_double(cells), 1.0 / 3.0);
}

TEST_F(TempDir, RunConfigResolvesPathsAndOverrides) {
  const fs::path cfg = write("run.json", R"({
    "operator": {"kind":"diagonal","name":"weighted_shift"},
    "sigma_u": {"kind":"power_decay","scale":1,"exponent":0},
    "sigma_v": {"kind":"power_decay","scale":1,"exponent":0},
    "dim": 5, "seed": 3, "input": "x.csv", "output": "res"})");
  const RunConfig c = load_run_config(cfg, Overrides{std::uint64_t{9}, Index{7}, 1, std::nullopt});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.truncation_dim, 7);
  EXPECT_EQ(c.scale_n, 1);
  EXPECT_EQ(c.input_path, fs::absolute(dir_ / "x.csv").lexically_normal());
  EXPECT_EQ(c.output_path, fs::absolute(dir_ / "res").lexically_normal());
  const GaussianModel m = build_model(c);
  EXPECT_EQ(m.dim(), 7);
  EXPECT_THROW(load_run_config(cfg, Overrides{std::nullopt, Index{1}, std::nullopt, std::nullopt}), InputError);
}

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

TEST_F(TempDir, CsvIgnoresGlobalLocale) {
  const std::locale saved = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  io::write_series_csv(dir_ / "loc.csv", {12345}, Eigen::VectorXd::Constant(1, 0.25), Eigen::VectorXd::Constant(1, 1.5));
  std::locale::global(saved);
  std::ifstream in(dir_ / "loc.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(row, "12345,0.25,1.5");
}

TEST_F(TempDir, MalformedJson) {
  EXPECT_THROW(io::read_json(write("bad.json", "{ nope")), InputError);
}

}  // namespace
