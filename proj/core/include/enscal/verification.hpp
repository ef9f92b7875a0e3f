#ifndef ENSCAL_VERIFICATION_HPP_
#define ENSCAL_VERIFICATION_HPP_

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "enscal/distributions.hpp"
#include "enscal/forecast_data.hpp"

namespace enscal {

struct ScoredCase {
  Date date{};
  int hour = 0;
  int station_id = 0;
  double crps = 0.0;
  double abs_err_median = 0.0;  // |obs - predictive median|
  double sq_err_mean = 0.0;     // (obs - predictive mean)^2
  double pit = 0.0;             // continuous forecasts only
  bool covered80 = false;       // obs inside [q10, q90]
};

template <class Dist>
ScoredCase score_case(const Dist& d, const ForecastCase& c) {
  if (!c.observation) throw std::invalid_argument("score_case: observation missing");
  const double obs = *c.observation;
  ScoredCase s;
  s.date = c.date;
  s.hour = c.hour;
  s.station_id = c.station_id;
  s.crps = crps(d, obs);
  s.abs_err_median = std::abs(obs - quantile(d, 0.5));
  const double m = predictive_mean(d);
  s.sq_err_mean = (obs - m) * (obs - m);
  s.pit = pit(d, obs);
  s.covered80 = obs >= quantile(d, 0.1) && obs <= quantile(d, 0.9);
  return s;
}

// Raw-ensemble counterpart: CRPS of the empirical CDF, median/mean of the
// 9 members as point forecasts, coverage by the member order statistics.
ScoredCase score_case_ensemble(const ForecastCase& c);

// rank = 1 + #{members < obs}, ties randomized uniformly; range 1..10.
class RankHistogram {
 public:
  explicit RankHistogram(unsigned long long seed = 0);
  int rank_of(const ForecastCase& c);
  void add(const ForecastCase& c);
  const std::array<long, kEnsembleSize + 1>& counts() const { return counts_; }
  long total() const;

 private:
  std::array<long, kEnsembleSize + 1> counts_{};
  unsigned long long state_;
};

// Nominal central-interval coverage of an m-member ensemble: (m-1)/(m+1).
double coverage_nominal(int m);

struct DmResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool no_difference = false;  // score series identical, statistic pinned to 0
};

// Two-sided Diebold-Mariano test on aligned daily score series. The
// long-run variance truncates the autocovariance sum at horizon_days - 1
// lags. Negative statistics favour series A.
DmResult dm_test(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                 int horizon_days = 1);

// Mean asymptotic KS p-value against U(0,1) over repeated subsamples;
// sampling is without replacement when the population allows it.
double ks_uniform_subsampled(const std::vector<double>& pits, int n_samples, int sample_size,
                             unsigned long long seed);
double ks_uniform_p(const std::vector<double>& sample);

struct ScoreRow {
  double crps = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double coverage_pct = 0.0;
  long n_cases = 0;
};

// Per-hour rows plus the case-weighted overall row, Table-style.
struct ScoreReport {
  std::map<int, ScoreRow> by_hour;
  ScoreRow overall;
};

ScoreReport build_report(const std::vector<ScoredCase>& cases);

std::array<long, 10> pit_histogram(const std::vector<double>& pits);

}  // namespace enscal

#endif  // ENSCAL_VERIFICATION_HPP_
