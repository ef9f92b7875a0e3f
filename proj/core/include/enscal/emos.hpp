#ifndef ENSCAL_EMOS_HPP_
#define ENSCAL_EMOS_HPP_

#include <array>

#include "enscal/distributions.hpp"
#include "enscal/errors.hpp"
#include "enscal/forecast_data.hpp"

namespace enscal {

// Coefficients of the nonhomogeneous Gaussian regression: predictive law
// N(a0 + sum_k a_k f_k, b0 + b1 * S^2) with a_k, b0, b1 >= 0.
struct EmosParams {
  double a0 = 0.0;
  std::array<double, kEnsembleSize> a{};
  double b0 = 1.0;
  double b1 = 1.0;
};

struct EmosFitOptions {
  int min_cases = 110;       // >= 10 training cases per free parameter
  int restarts = 3;          // random restarts beyond the deterministic start
  double tolerance = 1e-8;   // convergence tolerance on mean CRPS
  int max_iterations = 4000;
  unsigned long long seed = 42;
};

// Minimizes mean CRPS over the window; non-negativity of a_k, b0, b1 is
// enforced through a squaring reparameterization. Deterministic per
// (window, options).
EmosParams fit_emos(const TrainingWindow& window, const EmosFitOptions& opts = {});

// Mean CRPS of the EMOS forecast over a training window.
double emos_mean_crps(const EmosParams& p, const TrainingWindow& window);

NormalPredictive predict_emos(const EmosParams& p, const ForecastCase& c);

}  // namespace enscal

#endif  // ENSCAL_EMOS_HPP_
