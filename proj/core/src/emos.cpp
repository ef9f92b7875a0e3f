#include "enscal/emos.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "enscal/math_util.hpp"
#include "enscal/optim.hpp"

namespace enscal {

namespace {

struct PreparedCase {
  std::array<double, kEnsembleSize> members;
  double variance;
  double obs;
};

constexpr int kDim = 2 + kEnsembleSize + 1;  // a0, u1..u9, v0, v1

EmosParams unpack(const std::vector<double>& t) {
  EmosParams p;
  p.a0 = t[0];
  for (int k = 0; k < kEnsembleSize; ++k) p.a[k] = t[1 + k] * t[1 + k];
  p.b0 = t[10] * t[10];
  p.b1 = t[11] * t[11];
  return p;
}

double objective(const std::vector<double>& t, const std::vector<PreparedCase>& cases) {
  const EmosParams p = unpack(t);
  double total = 0.0;
  for (const auto& c : cases) {
    double mu = p.a0;
    for (int k = 0; k < kEnsembleSize; ++k) mu += p.a[k] * c.members[k];
    const double var = p.b0 + p.b1 * c.variance;
    const double sigma = std::sqrt(std::max(var, 1e-12));
    total += crps(NormalPredictive{mu, sigma}, c.obs);
  }
  return total / double(cases.size());
}

}  // namespace

double emos_mean_crps(const EmosParams& p, const TrainingWindow& window) {
  double total = 0.0;
  for (const auto& c : window.cases) {
    total += crps(predict_emos(p, c), *c.observation);
  }
  return total / double(window.cases.size());
}

EmosParams fit_emos(const TrainingWindow& window, const EmosFitOptions& opts) {
  if (int(window.cases.size()) < opts.min_cases) {
    throw FitError("fit_emos: window has " + std::to_string(window.cases.size()) +
                   " cases, minimum is " + std::to_string(opts.min_cases));
  }

  std::vector<PreparedCase> cases;
  cases.reserve(window.cases.size());
  double obs_mean = 0.0, fmean_mean = 0.0;
  for (const auto& c : window.cases) {
    cases.push_back({c.members, ensemble_variance(c), *c.observation});
    obs_mean += *c.observation;
    fmean_mean += ensemble_mean(c);
  }
  obs_mean /= double(cases.size());
  fmean_mean /= double(cases.size());

  // Climatological-bias start: a_k = 1/9 each, unit variance coefficients.
  std::vector<double> t0(kDim);
  t0[0] = obs_mean - fmean_mean;
  for (int k = 0; k < kEnsembleSize; ++k) t0[1 + k] = 1.0 / 3.0;
  t0[10] = 1.0;
  t0[11] = 1.0;

  auto f = [&cases](const std::vector<double>& t) { return objective(t, cases); };

  NelderMeadOptions nm;
  nm.f_tolerance = opts.tolerance;
  nm.max_iterations = opts.max_iterations;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> jitter(0.0, 0.3);

  bool any_finite = false;
  NelderMeadResult best;
  best.f_min = std::numeric_limits<double>::infinity();
  for (int r = 0; r <= opts.restarts; ++r) {
    std::vector<double> start = t0;
    if (r > 0) {
      for (double& v : start) v += jitter(rng);
    }
    auto res = nelder_mead(f, start, nm);
    if (std::isfinite(res.f_min)) {
      any_finite = true;
      if (res.f_min < best.f_min) best = std::move(res);
    }
  }
  if (!any_finite) {
    throw FitError("fit_emos: mean CRPS non-finite at every restart");
  }

  // The start point is a simplex vertex, so the optimum can never be worse.
  const double f_init = f(t0);
  if (best.f_min > f_init) return unpack(t0);
  return unpack(best.x);
}

NormalPredictive predict_emos(const EmosParams& p, const ForecastCase& c) {
  double mu = p.a0;
  for (int k = 0; k < kEnsembleSize; ++k) mu += p.a[k] * c.members[k];
  const double var = p.b0 + p.b1 * ensemble_variance(c);
  if (var <= 0.0) {
    throw FitError("predict_emos: predictive variance b0 + b1*S^2 is not positive");
  }
  return NormalPredictive{mu, std::sqrt(var)};
}

}  // namespace enscal
