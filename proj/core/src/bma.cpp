#include "enscal/bma.hpp"

#include <cmath>
#include <vector>

#include "enscal/math_util.hpp"

namespace enscal {

MemberBias fit_bias(const TrainingWindow& window, BiasMode mode) {
  MemberBias b;
  b.beta1.fill(1.0);
  if (mode == BiasMode::kNone) return b;

  const size_t n = window.cases.size();
  if (mode == BiasMode::kAdditive) {
    if (n == 0) throw FitError("fit_bias: empty window");
    for (int k = 0; k < kEnsembleSize; ++k) {
      double s = 0.0;
      for (const auto& c : window.cases) s += *c.observation - c.members[k];
      b.beta0[k] = s / double(n);
    }
    return b;
  }

  if (n < 2) throw FitError("fit_bias: need >= 2 cases for regression");
  for (int k = 0; k < kEnsembleSize; ++k) {
    double fm = 0.0, om = 0.0;
    for (const auto& c : window.cases) {
      fm += c.members[k];
      om += *c.observation;
    }
    fm /= double(n);
    om /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& c : window.cases) {
      const double dx = c.members[k] - fm;
      sxx += dx * dx;
      sxy += dx * (*c.observation - om);
    }
    if (sxx <= 0.0) {
      throw FitError("fit_bias: member " + std::to_string(k + 1) +
                     " is constant across the window");
    }
    b.beta1[k] = sxy / sxx;
    b.beta0[k] = om - b.beta1[k] * fm;
  }
  return b;
}

EmResult fit_em(const TrainingWindow& window, const MemberBias& bias, const EmOptions& opts) {
  const size_t n = window.cases.size();
  if (int(n) < opts.min_cases) {
    throw FitError("fit_em: window has " + std::to_string(n) + " cases, minimum is " +
                   std::to_string(opts.min_cases));
  }

  // Component means per case, fixed throughout EM.
  std::vector<std::array<double, kEnsembleSize>> mu(n);
  std::vector<double> obs(n);
  for (size_t t = 0; t < n; ++t) {
    const auto& c = window.cases[t];
    obs[t] = *c.observation;
    for (int k = 0; k < kEnsembleSize; ++k) {
      mu[t][k] = bias.beta0[k] + bias.beta1[k] * c.members[k];
    }
  }

  EmResult r;
  r.weights.fill(1.0 / kEnsembleSize);
  {
    // Scale-aware start: sd of the ensemble-mean error.
    std::vector<double> err(n);
    for (size_t t = 0; t < n; ++t) err[t] = obs[t] - ensemble_mean(window.cases[t]);
    r.sigma = std::sqrt(std::max(variance(err), 1e-8));
  }

  auto log_likelihood = [&](const std::array<double, kEnsembleSize>& w, double sigma) {
    double ll = 0.0;
    for (size_t t = 0; t < n; ++t) {
      double p = 0.0;
      for (int k = 0; k < kEnsembleSize; ++k) {
        p += w[k] * norm_pdf((obs[t] - mu[t][k]) / sigma);
      }
      ll += std::log(std::max(p / sigma, 1e-300));
    }
    return ll;
  };

  double prev_ll = log_likelihood(r.weights, r.sigma);
  std::vector<std::array<double, kEnsembleSize>> resp(n);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    // E-step
    for (size_t t = 0; t < n; ++t) {
      double norm = 0.0;
      for (int k = 0; k < kEnsembleSize; ++k) {
        resp[t][k] = r.weights[k] * norm_pdf((obs[t] - mu[t][k]) / r.sigma);
        norm += resp[t][k];
      }
      if (norm <= 0.0) {
        for (int k = 0; k < kEnsembleSize; ++k) resp[t][k] = 1.0 / kEnsembleSize;
      } else {
        for (int k = 0; k < kEnsembleSize; ++k) resp[t][k] /= norm;
      }
    }
    // M-step
    double wsum = 0.0;
    std::array<double, kEnsembleSize> w{};
    for (int k = 0; k < kEnsembleSize; ++k) {
      double s = 0.0;
      for (size_t t = 0; t < n; ++t) s += resp[t][k];
      w[k] = std::max(s / double(n), opts.weight_floor);
      wsum += w[k];
    }
    for (int k = 0; k < kEnsembleSize; ++k) w[k] /= wsum;

    double ss = 0.0;
    for (size_t t = 0; t < n; ++t) {
      for (int k = 0; k < kEnsembleSize; ++k) {
        const double d = obs[t] - mu[t][k];
        ss += resp[t][k] * d * d;
      }
    }
    const double sigma = std::sqrt(std::max(ss / double(n), 1e-12));

    const double ll = log_likelihood(w, sigma);
    r.weights = w;
    r.sigma = sigma;
    r.log_likelihood = ll;
    r.ll_trace.push_back(ll);
    if (ll - prev_ll < opts.ll_tolerance) {
      ++it;
      r.converged = true;
      break;
    }
    prev_ll = ll;
  }
  r.iterations = it;
  return r;
}

BmaParams fit_bma(const TrainingWindow& window, BiasMode mode, const EmOptions& opts) {
  BmaParams p;
  p.bias_mode = mode;
  const MemberBias bias = fit_bias(window, mode);
  p.beta0 = bias.beta0;
  p.beta1 = bias.beta1;
  const EmResult em = fit_em(window, bias, opts);
  p.weights = em.weights;
  p.sigma = em.sigma;
  return p;
}

MixturePredictive predict_bma(const BmaParams& p, const ForecastCase& c) {
  MixturePredictive d;
  d.weights = p.weights;
  d.sigma = p.sigma;
  for (int k = 0; k < kEnsembleSize; ++k) {
    d.means[k] = p.beta0[k] + p.beta1[k] * c.members[k];
  }
  return d;
}

}  // namespace enscal
