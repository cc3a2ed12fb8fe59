#pragma once

#include "hpfilter/basis.hpp"
#include "hpfilter/coeff_vector.hpp"
#include "hpfilter/error.hpp"
#include "hpfilter/examples.hpp"
#include "hpfilter/gaussian_model.hpp"
#include "hpfilter/hilbert_scale.hpp"
#include "hpfilter/hp_filter.hpp"
#include "hpfilter/monte_carlo.hpp"
#include "hpfilter/operator.hpp"
#include "hpfilter/optimal_smoothing.hpp"
#include "hpfilter/pinv.hpp"
#include "hpfilter/rng.hpp"
#include "hpfilter/spectral.hpp"
