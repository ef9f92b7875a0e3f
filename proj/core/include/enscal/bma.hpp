#ifndef ENSCAL_BMA_HPP_
#define ENSCAL_BMA_HPP_

#include <array>
#include <vector>

#include "enscal/distributions.hpp"
#include "enscal/emos.hpp"
#include "enscal/forecast_data.hpp"

namespace enscal {

enum class BiasMode { kFull, kAdditive, kNone };

// Mixture model coefficients: component means beta0_k + beta1_k * f_k,
// member weights on the probability simplex, common scale sigma.
struct BmaParams {
  std::array<double, kEnsembleSize> beta0{};
  std::array<double, kEnsembleSize> beta1{};
  std::array<double, kEnsembleSize> weights{};
  double sigma = 1.0;
  BiasMode bias_mode = BiasMode::kFull;
};

struct MemberBias {
  std::array<double, kEnsembleSize> beta0{};
  std::array<double, kEnsembleSize> beta1{};
};

// Per-member bias regression over the window. Full mode runs ordinary least
// squares of the observation on f_k; additive mode fits the mean error with
// unit slope; none mode returns the identity.
MemberBias fit_bias(const TrainingWindow& window, BiasMode mode);

struct EmOptions {
  int min_cases = 270;
  double ll_tolerance = 1e-6;
  int max_iterations = 500;
  double weight_floor = 1e-8;
};

struct EmResult {
  std::array<double, kEnsembleSize> weights{};
  double sigma = 0.0;
  double log_likelihood = 0.0;
  std::vector<double> ll_trace;  // post-M-step log-likelihood per iteration
  int iterations = 0;
  bool converged = false;
};

// EM for the mixture weights and common sigma given fixed bias coefficients.
// The training log-likelihood is nondecreasing across iterations.
EmResult fit_em(const TrainingWindow& window, const MemberBias& bias,
                const EmOptions& opts = {});

BmaParams fit_bma(const TrainingWindow& window, BiasMode mode, const EmOptions& opts = {});

MixturePredictive predict_bma(const BmaParams& p, const ForecastCase& c);

}  // namespace enscal

#endif  // ENSCAL_BMA_HPP_
