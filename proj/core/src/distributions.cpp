#include "enscal/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "enscal/math_util.hpp"

namespace enscal {

double pdf(const NormalPredictive& d, double x) {
  return norm_pdf((x - d.mu) / d.sigma) / d.sigma;
}

double cdf(const NormalPredictive& d, double x) { return norm_cdf((x - d.mu) / d.sigma); }

double quantile(const NormalPredictive& d, double p) {
  return d.mu + d.sigma * norm_quantile(p);
}

double predictive_mean(const NormalPredictive& d) { return d.mu; }

double pdf(const MixturePredictive& d, double x) {
  double v = 0.0;
  for (int k = 0; k < kEnsembleSize; ++k) {
    v += d.weights[k] * norm_pdf((x - d.means[k]) / d.sigma);
  }
  return v / d.sigma;
}

double cdf(const MixturePredictive& d, double x) {
  double v = 0.0;
  for (int k = 0; k < kEnsembleSize; ++k) {
    v += d.weights[k] * norm_cdf((x - d.means[k]) / d.sigma);
  }
  return v;
}

double quantile(const MixturePredictive& d, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("quantile: p must lie in (0,1)");
  }
  auto [mn, mx] = std::minmax_element(d.means.begin(), d.means.end());
  double lo = *mn - 12.0 * d.sigma;
  double hi = *mx + 12.0 * d.sigma;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double c = cdf(d, mid);
    if (std::abs(c - p) < 1e-12) return mid;
    (c < p ? lo : hi) = mid;
    if (hi - lo < 1e-13 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

double predictive_mean(const MixturePredictive& d) {
  double v = 0.0;
  for (int k = 0; k < kEnsembleSize; ++k) v += d.weights[k] * d.means[k];
  return v;
}

double normal_abs_moment(double m, double s) {
  if (s <= 0.0) return std::abs(m);
  const double z = m / s;
  return m * (2.0 * norm_cdf(z) - 1.0) + 2.0 * s * norm_pdf(z);
}

double crps(const NormalPredictive& d, double x) {
  const double z = (x - d.mu) / d.sigma;
  return d.sigma * (z * (2.0 * norm_cdf(z) - 1.0) + 2.0 * norm_pdf(z) - kInvSqrtPi);
}

double crps(const MixturePredictive& d, double x) {
  double first = 0.0;
  for (int k = 0; k < kEnsembleSize; ++k) {
    first += d.weights[k] * normal_abs_moment(x - d.means[k], d.sigma);
  }
  const double s2 = d.sigma * kSqrt2;  // X - X' has variance 2*sigma^2
  double second = 0.0;
  for (int k = 0; k < kEnsembleSize; ++k) {
    if (d.weights[k] == 0.0) continue;
    for (int l = 0; l < kEnsembleSize; ++l) {
      if (d.weights[l] == 0.0) continue;
      second += d.weights[k] * d.weights[l] * normal_abs_moment(d.means[k] - d.means[l], s2);
    }
  }
  return first - 0.5 * second;
}

double crps_ensemble(std::span<const double> members, double x) {
  const double m = double(members.size());
  double first = 0.0;
  for (double f : members) first += std::abs(f - x);
  first /= m;
  double second = 0.0;
  for (double fi : members) {
    for (double fj : members) second += std::abs(fi - fj);
  }
  second /= m * m;
  return first - 0.5 * second;
}

}  // namespace enscal
