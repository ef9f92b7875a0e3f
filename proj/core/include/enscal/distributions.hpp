#ifndef ENSCAL_DISTRIBUTIONS_HPP_
#define ENSCAL_DISTRIBUTIONS_HPP_

#include <array>
#include <span>

#include "enscal/forecast_data.hpp"

namespace enscal {

// Gaussian predictive law, parameterized by mean and standard deviation.
struct NormalPredictive {
  double mu = 0.0;
  double sigma = 1.0;  // > 0
};

// Nine-component Gaussian mixture with a common scale.
struct MixturePredictive {
  std::array<double, kEnsembleSize> weights{};  // >= 0, sum to 1
  std::array<double, kEnsembleSize> means{};
  double sigma = 1.0;  // > 0
};

double pdf(const NormalPredictive& d, double x);
double cdf(const NormalPredictive& d, double x);
double quantile(const NormalPredictive& d, double p);
double predictive_mean(const NormalPredictive& d);

double pdf(const MixturePredictive& d, double x);
double cdf(const MixturePredictive& d, double x);
// Bracketed bisection on the CDF; |cdf(result) - p| < 1e-9.
double quantile(const MixturePredictive& d, double p);
double predictive_mean(const MixturePredictive& d);

// Closed-form CRPS of a normal law: sigma * (z*(2*Phi(z)-1) + 2*phi(z) - 1/sqrt(pi)).
double crps(const NormalPredictive& d, double x);
// Closed-form CRPS of a Gaussian mixture via pairwise absolute-moment terms.
double crps(const MixturePredictive& d, double x);

// CRPS of the empirical ensemble CDF: mean|f_k - x| - pairwise mean / 2.
double crps_ensemble(std::span<const double> members, double x);

template <class Dist>
double pit(const Dist& d, double x) {
  return cdf(d, x);
}

// E|Z| for Z ~ N(m, s^2): m*(2*Phi(m/s)-1) + 2*s*phi(m/s). Handles s = 0.
double normal_abs_moment(double m, double s);

}  // namespace enscal

#endif  // ENSCAL_DISTRIBUTIONS_HPP_
