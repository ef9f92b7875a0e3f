#include "enscal/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "enscal/math_util.hpp"

namespace enscal {

namespace {

// splitmix64; compact deterministic stream for rank tie-breaking
unsigned long long next_u64(unsigned long long& state) {
  unsigned long long z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

ScoredCase score_case_ensemble(const ForecastCase& c) {
  if (!c.observation) throw std::invalid_argument("score_case_ensemble: observation missing");
  const double obs = *c.observation;
  auto sorted = c.members;
  std::sort(sorted.begin(), sorted.end());
  ScoredCase s;
  s.date = c.date;
  s.hour = c.hour;
  s.station_id = c.station_id;
  s.crps = crps_ensemble(c.members, obs);
  s.abs_err_median = std::abs(obs - sorted[kEnsembleSize / 2]);
  const double m = ensemble_mean(c);
  s.sq_err_mean = (obs - m) * (obs - m);
  s.pit = std::numeric_limits<double>::quiet_NaN();  // rank path instead
  s.covered80 = obs >= sorted.front() && obs <= sorted.back();
  return s;
}

RankHistogram::RankHistogram(unsigned long long seed) : state_(seed ^ 0xa0761d6478bd642fULL) {}

int RankHistogram::rank_of(const ForecastCase& c) {
  if (!c.observation) throw std::invalid_argument("rank_of: observation missing");
  const double obs = *c.observation;
  int below = 0, ties = 0;
  for (double f : c.members) {
    if (f < obs) {
      ++below;
    } else if (f == obs) {
      ++ties;
    }
  }
  int offset = 0;
  if (ties > 0) offset = int(next_u64(state_) % (unsigned long long)(ties + 1));
  return 1 + below + offset;
}

void RankHistogram::add(const ForecastCase& c) { ++counts_[rank_of(c) - 1]; }

long RankHistogram::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), 0L);
}

double coverage_nominal(int m) {
  if (m < 1) throw std::invalid_argument("coverage_nominal: ensemble size must be >= 1");
  return double(m - 1) / double(m + 1);
}

DmResult dm_test(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                 int horizon_days) {
  if (scores_a.size() != scores_b.size()) {
    throw std::invalid_argument("dm_test: series length mismatch");
  }
  const size_t n = scores_a.size();
  if (n < 10) throw std::invalid_argument("dm_test: need at least 10 aligned scores");

  std::vector<double> d(n);
  double scale = 0.0;
  for (size_t t = 0; t < n; ++t) {
    d[t] = scores_a[t] - scores_b[t];
    scale = std::max({scale, std::abs(scores_a[t]), std::abs(scores_b[t])});
  }
  const double m = mean(d);

  double gamma0 = 0.0;
  for (double x : d) gamma0 += (x - m) * (x - m);
  gamma0 /= double(n);

  DmResult r;
  if (gamma0 <= 1e-24 * (1.0 + scale * scale) && std::abs(m) <= 1e-12 * (1.0 + scale)) {
    r.no_difference = true;
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }

  double lrv = gamma0;
  for (int l = 1; l < horizon_days; ++l) {
    double g = 0.0;
    for (size_t t = size_t(l); t < n; ++t) g += (d[t] - m) * (d[t - l] - m);
    lrv += 2.0 * g / double(n);
  }
  if (lrv <= 0.0) lrv = gamma0;  // truncated sum can go negative

  r.statistic = std::sqrt(double(n)) * m / std::sqrt(lrv);
  r.p_value = 2.0 * (1.0 - norm_cdf(std::abs(r.statistic)));
  return r;
}

double ks_uniform_p(const std::vector<double>& sample) {
  std::vector<double> s(sample);
  std::sort(s.begin(), s.end());
  const double n = double(s.size());
  double d_max = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    const double hi = (double(i) + 1.0) / n - s[i];
    const double lo = s[i] - double(i) / n;
    d_max = std::max({d_max, hi, lo});
  }
  return kolmogorov_p_value(std::sqrt(n) * d_max);
}

double ks_uniform_subsampled(const std::vector<double>& pits, int n_samples, int sample_size,
                             unsigned long long seed) {
  if (pits.empty()) throw std::invalid_argument("ks_uniform_subsampled: empty PIT series");
  std::mt19937_64 rng(seed);
  const bool without_replacement = pits.size() >= size_t(sample_size);
  double total_p = 0.0;
  std::vector<double> sample(sample_size);
  std::vector<size_t> idx(pits.size());
  std::iota(idx.begin(), idx.end(), size_t(0));
  for (int s = 0; s < n_samples; ++s) {
    if (without_replacement) {
      // partial Fisher-Yates
      for (int i = 0; i < sample_size; ++i) {
        std::uniform_int_distribution<size_t> u(size_t(i), idx.size() - 1);
        std::swap(idx[i], idx[u(rng)]);
        sample[i] = pits[idx[i]];
      }
    } else {
      std::uniform_int_distribution<size_t> u(0, pits.size() - 1);
      for (int i = 0; i < sample_size; ++i) sample[i] = pits[u(rng)];
    }
    total_p += ks_uniform_p(sample);
  }
  return total_p / double(n_samples);
}

ScoreReport build_report(const std::vector<ScoredCase>& cases) {
  ScoreReport rep;
  struct Acc {
    double crps = 0.0, se = 0.0, ae = 0.0;
    long covered = 0, n = 0;
  };
  std::map<int, Acc> acc;
  Acc all;
  for (const auto& s : cases) {
    for (Acc* a : {&acc[s.hour], &all}) {
      a->crps += s.crps;
      a->se += s.sq_err_mean;
      a->ae += s.abs_err_median;
      a->covered += s.covered80 ? 1 : 0;
      ++a->n;
    }
  }
  auto to_row = [](const Acc& a) {
    ScoreRow r;
    r.n_cases = a.n;
    if (a.n > 0) {
      r.crps = a.crps / double(a.n);
      r.rmse = std::sqrt(a.se / double(a.n));
      r.mae = a.ae / double(a.n);
      r.coverage_pct = 100.0 * double(a.covered) / double(a.n);
    }
    return r;
  };
  for (const auto& [hour, a] : acc) rep.by_hour[hour] = to_row(a);
  rep.overall = to_row(all);
  return rep;
}

std::array<long, 10> pit_histogram(const std::vector<double>& pits) {
  std::array<long, 10> bins{};
  for (double p : pits) {
    int b = int(p * 10.0);
    b = std::clamp(b, 0, 9);
    ++bins[b];
  }
  return bins;
}

}  // namespace enscal
