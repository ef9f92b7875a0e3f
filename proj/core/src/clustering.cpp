#include "enscal/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "enscal/math_util.hpp"

namespace enscal {

int ClusterAssignment::group_of(int station_id) const {
  for (size_t g = 0; g < groups.size(); ++g) {
    if (std::find(groups[g].begin(), groups[g].end(), station_id) != groups[g].end()) {
      return int(g);
    }
  }
  return -1;
}

std::string cluster_method_name(const ClusterAssignment& a) {
  switch (a.method) {
    case ClusterMethod::kRegional:
      return "regional";
    case ClusterMethod::kKMeans:
      return "kmeans" + std::to_string(a.k);
    case ClusterMethod::kExpertAltitude:
      return "expert-altitude";
    case ClusterMethod::kLocal:
      return "local";
  }
  return "unknown";
}

StationFeatures build_features(const Dataset& ds, int station_id, const TrainingWindow& window) {
  StationFeatures f;
  f.station_id = station_id;

  std::vector<double> climatology;
  const Date window_end = window.target_date - std::chrono::days{1};
  for (const auto& c : ds.cases) {
    if (c.station_id == station_id && c.observation && c.date <= window_end) {
      climatology.push_back(*c.observation);
    }
  }
  std::vector<double> errors;
  for (const auto& c : window.cases) {
    if (c.station_id == station_id) {
      errors.push_back(*c.observation - ensemble_mean(c));
    }
  }
  if (int(climatology.size()) < kQuantilesPerBlock || int(errors.size()) < kQuantilesPerBlock) {
    throw FitError("build_features: station " + std::to_string(station_id) +
                   " has too few observed cases (" + std::to_string(climatology.size()) +
                   " climatology, " + std::to_string(errors.size()) + " window)");
  }
  for (int i = 1; i <= kQuantilesPerBlock; ++i) {
    const double p = double(i) / (kQuantilesPerBlock + 1);
    f.features[i - 1] = sample_quantile(climatology, p);
    f.features[kQuantilesPerBlock + i - 1] = sample_quantile(errors, p);
  }
  return f;
}

namespace {

using FeatureMatrix = std::vector<std::array<double, kFeatureCount>>;

double sq_dist(const std::array<double, kFeatureCount>& a,
               const std::array<double, kFeatureCount>& b) {
  double d = 0.0;
  for (int j = 0; j < kFeatureCount; ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
  return d;
}

FeatureMatrix standardize(const std::vector<StationFeatures>& features) {
  const size_t n = features.size();
  FeatureMatrix z(n);
  for (int j = 0; j < kFeatureCount; ++j) {
    double m = 0.0;
    for (const auto& f : features) m += f.features[j];
    m /= double(n);
    double ss = 0.0;
    for (const auto& f : features) ss += (f.features[j] - m) * (f.features[j] - m);
    const double sd = n > 1 ? std::sqrt(ss / double(n - 1)) : 0.0;
    for (size_t i = 0; i < n; ++i) {
      z[i][j] = sd > 0.0 ? (features[i].features[j] - m) / sd : 0.0;
    }
  }
  return z;
}

struct LloydResult {
  std::vector<int> labels;
  double wcss = std::numeric_limits<double>::infinity();
};

LloydResult lloyd_once(const FeatureMatrix& z, int k, std::mt19937_64& rng) {
  const size_t n = z.size();
  // k-means++ seeding
  std::vector<std::array<double, kFeatureCount>> centers;
  std::uniform_int_distribution<size_t> first(0, n - 1);
  centers.push_back(z[first(rng)]);
  std::vector<double> d2(n);
  while (int(centers.size()) < k) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(z[i], c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(z[first(rng)]);
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double r = u(rng);
    size_t pick = n - 1;
    for (size_t i = 0; i < n; ++i) {
      r -= d2[i];
      if (r <= 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(z[pick]);
  }

  LloydResult res;
  res.labels.assign(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(z[i], centers[c]);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (res.labels[i] != best) {
        res.labels[i] = best;
        changed = true;
      }
    }
    for (int c = 0; c < k; ++c) {
      std::array<double, kFeatureCount> m{};
      int count = 0;
      for (size_t i = 0; i < n; ++i) {
        if (res.labels[i] != c) continue;
        ++count;
        for (int j = 0; j < kFeatureCount; ++j) m[j] += z[i][j];
      }
      if (count > 0) {
        for (int j = 0; j < kFeatureCount; ++j) centers[c][j] = m[j] / double(count);
      }
    }
    if (!changed && iter > 0) break;
  }
  res.wcss = 0.0;
  for (size_t i = 0; i < n; ++i) res.wcss += sq_dist(z[i], centers[res.labels[i]]);
  return res;
}

}  // namespace

ClusterAssignment kmeans_cluster(const std::vector<StationFeatures>& features, int k,
                                 unsigned long long seed) {
  if (int(features.size()) < k) {
    throw std::invalid_argument("kmeans_cluster: fewer stations than clusters");
  }
  const FeatureMatrix z = standardize(features);
  std::mt19937_64 rng(seed);
  LloydResult best;
  for (int r = 0; r < 25; ++r) {
    LloydResult res = lloyd_once(z, k, rng);
    if (res.wcss < best.wcss) best = std::move(res);
  }

  ClusterAssignment a;
  a.method = ClusterMethod::kKMeans;
  a.k = k;
  a.groups.assign(k, {});
  for (size_t i = 0; i < features.size(); ++i) {
    a.groups[best.labels[i]].push_back(features[i].station_id);
  }
  // Drop empty groups and order by smallest member id for stable output.
  std::erase_if(a.groups, [](const auto& g) { return g.empty(); });
  for (auto& g : a.groups) std::sort(g.begin(), g.end());
  std::sort(a.groups.begin(), a.groups.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return a;
}

ClusterAssignment expert_altitude_clusters(const std::vector<Station>& stations) {
  ClusterAssignment a;
  a.method = ClusterMethod::kExpertAltitude;
  a.k = 3;
  a.groups.assign(3, {});
  for (const auto& s : stations) {
    if (s.altitude_m < 400.0) {
      a.groups[0].push_back(s.id);
    } else if (s.altitude_m <= 750.0) {
      a.groups[1].push_back(s.id);
    } else {
      a.groups[2].push_back(s.id);
    }
  }
  std::erase_if(a.groups, [](const auto& g) { return g.empty(); });
  for (auto& g : a.groups) std::sort(g.begin(), g.end());
  return a;
}

ClusterAssignment merge_small_clusters(const ClusterAssignment& a,
                                       const std::vector<StationFeatures>& features,
                                       int min_stations) {
  ClusterAssignment out = a;
  auto feature_of = [&](int sid) -> const std::array<double, kFeatureCount>* {
    for (const auto& f : features) {
      if (f.station_id == sid) return &f.features;
    }
    return nullptr;
  };
  auto centroid = [&](const std::vector<int>& group) {
    std::array<double, kFeatureCount> c{};
    int count = 0;
    for (int sid : group) {
      if (const auto* f = feature_of(sid)) {
        ++count;
        for (int j = 0; j < kFeatureCount; ++j) c[j] += (*f)[j];
      }
    }
    if (count > 0) {
      for (double& v : c) v /= double(count);
    }
    return c;
  };

  bool merged = true;
  while (merged && out.groups.size() > 1) {
    merged = false;
    for (size_t g = 0; g < out.groups.size(); ++g) {
      if (int(out.groups[g].size()) >= min_stations) continue;
      const auto cg = centroid(out.groups[g]);
      size_t nearest = g;
      double bd = std::numeric_limits<double>::infinity();
      for (size_t h = 0; h < out.groups.size(); ++h) {
        if (h == g) continue;
        const double d = sq_dist(cg, centroid(out.groups[h]));
        if (d < bd) {
          bd = d;
          nearest = h;
        }
      }
      auto& dst = out.groups[nearest];
      dst.insert(dst.end(), out.groups[g].begin(), out.groups[g].end());
      std::sort(dst.begin(), dst.end());
      out.groups.erase(out.groups.begin() + g);
      merged = true;
      break;
    }
  }
  return out;
}

}  // namespace enscal
