#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "enscal/clustering.hpp"
#include "enscal/synthetic.hpp"

using namespace enscal;

namespace {

Dataset single_station_dataset(int n_days, const std::vector<double>& obs,
                               const std::vector<double>& forecast_error) {
  Dataset ds;
  ds.stations.push_back({1, "S1", -70.0, -33.0, 500.0});
  const Date start = parse_date("2015-01-01");
  for (int i = 0; i < n_days; ++i) {
    ForecastCase c;
    c.date = start + std::chrono::days{i};
    c.hour = 0;
    c.station_id = 1;
    c.members.fill(obs[i] - forecast_error[i]);  // ensemble mean = obs - error
    c.observation = obs[i];
    ds.cases.push_back(std::move(c));
  }
  return ds;
}

std::vector<StationFeatures> blob_features(int n_per_blob, double separation,
                                           unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<StationFeatures> f;
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < n_per_blob; ++i) {
      StationFeatures s;
      s.station_id = b * n_per_blob + i + 1;
      for (auto& v : s.features) v = b * separation + g(rng);
      f.push_back(s);
    }
  }
  return f;
}

}  // namespace

TEST_CASE("build_features: constant observation series") {
  std::vector<double> obs(40, 283.0), err(40);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& e : err) e = g(rng);
  Dataset ds = single_station_dataset(40, obs, err);
  TrainingWindow w = select_window(ds, parse_date("2015-02-10"), 0, 40);
  StationFeatures f = build_features(ds, 1, w);
  for (int i = 0; i < kQuantilesPerBlock; ++i) CHECK(f.features[i] == doctest::Approx(283.0));
}

TEST_CASE("build_features: unbiased perfect forecasts give a zero error block") {
  std::vector<double> obs(40), err(40, 0.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(283.0, 4.0);
  for (auto& o : obs) o = g(rng);
  Dataset ds = single_station_dataset(40, obs, err);
  TrainingWindow w = select_window(ds, parse_date("2015-02-10"), 0, 40);
  StationFeatures f = build_features(ds, 1, w);
  for (int i = kQuantilesPerBlock; i < kFeatureCount; ++i) {
    CHECK(f.features[i] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("build_features: uniform errors recover the i/13 quantile grid") {
  const int n = 10000;
  std::vector<double> obs(n), err(n);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(283.0, 4.0);
  for (int i = 0; i < n; ++i) {
    obs[i] = g(rng);
    err[i] = u(rng);
  }
  Dataset ds = single_station_dataset(n, obs, err);
  TrainingWindow w = select_window(ds, parse_date("2015-01-01") + std::chrono::days{n}, 0, n);
  StationFeatures f = build_features(ds, 1, w);
  for (int i = 1; i <= kQuantilesPerBlock; ++i) {
    CHECK(std::abs(f.features[kQuantilesPerBlock + i - 1] - double(i) / 13.0) < 0.02);
  }
  // each block is nondecreasing
  for (int i = 1; i < kQuantilesPerBlock; ++i) {
    CHECK(f.features[i] >= f.features[i - 1]);
    CHECK(f.features[kQuantilesPerBlock + i] >= f.features[kQuantilesPerBlock + i - 1]);
  }
}

TEST_CASE("build_features: insufficient data is an error") {
  std::vector<double> obs(5, 283.0), err(5, 0.0);
  Dataset ds = single_station_dataset(5, obs, err);
  TrainingWindow w = select_window(ds, parse_date("2015-01-06"), 0, 5);
  CHECK_THROWS_AS(build_features(ds, 1, w), FitError);
}

TEST_CASE("kmeans: two well-separated blobs are recovered exactly") {
  auto feats = blob_features(6, 20.0, 4);
  ClusterAssignment a = kmeans_cluster(feats, 2, 99);
  REQUIRE(a.groups.size() == 2);
  std::set<int> g0(a.groups[0].begin(), a.groups[0].end());
  std::set<int> g1(a.groups[1].begin(), a.groups[1].end());
  std::set<int> blob1{1, 2, 3, 4, 5, 6}, blob2{7, 8, 9, 10, 11, 12};
  CHECK(((g0 == blob1 && g1 == blob2) || (g0 == blob2 && g1 == blob1)));
}

TEST_CASE("kmeans: k equal to station count gives singletons") {
  std::vector<StationFeatures> feats;
  for (int i = 0; i < 5; ++i) {
    StationFeatures s;
    s.station_id = i + 1;
    for (auto& v : s.features) v = 10.0 * i;
    feats.push_back(s);
  }
  ClusterAssignment a = kmeans_cluster(feats, 5, 7);
  CHECK(a.groups.size() == 5);
  for (const auto& g : a.groups) CHECK(g.size() == 1);
}

TEST_CASE("kmeans: duplicate feature vectors are co-clustered") {
  auto feats = blob_features(4, 15.0, 5);
  feats[1].features = feats[0].features;  // exact duplicate
  ClusterAssignment a = kmeans_cluster(feats, 2, 11);
  CHECK(a.group_of(feats[0].station_id) == a.group_of(feats[1].station_id));
}

TEST_CASE("kmeans: deterministic per seed") {
  auto feats = blob_features(6, 3.0, 6);
  ClusterAssignment a = kmeans_cluster(feats, 3, 123);
  ClusterAssignment b = kmeans_cluster(feats, 3, 123);
  CHECK(a.groups == b.groups);
}

TEST_CASE("cluster assignments partition the stations") {
  auto feats = blob_features(7, 2.0, 8);
  ClusterAssignment a = kmeans_cluster(feats, 3, 17);
  std::set<int> seen;
  size_t total = 0;
  for (const auto& g : a.groups) {
    total += g.size();
    seen.insert(g.begin(), g.end());
  }
  CHECK(total == feats.size());
  CHECK(seen.size() == feats.size());
}

TEST_CASE("expert altitude clusters match the bundled fixture partition") {
  ClusterAssignment a = expert_altitude_clusters(santiago_stations());
  REQUIRE(a.groups.size() == 3);
  CHECK(a.groups[0] == std::vector<int>{1, 10, 12, 17});
  CHECK(a.groups[1] == std::vector<int>{2, 3, 4, 5, 6, 7, 8, 13, 15, 16, 18});
  CHECK(a.groups[2] == std::vector<int>{9, 11, 14, 19});
}

TEST_CASE("expert altitude boundary rules") {
  std::vector<Station> s = {{1, "exact400", 0, 0, 400.0},
                            {2, "exact750", 0, 0, 750.0},
                            {3, "high", 0, 0, 2750.0},
                            {4, "low", 0, 0, 399.999}};
  ClusterAssignment a = expert_altitude_clusters(s);
  CHECK(a.group_of(1) == a.group_of(2));  // both in the mid band
  CHECK(a.group_of(3) != a.group_of(2));
  CHECK(a.group_of(4) != a.group_of(1));
}

TEST_CASE("expert clustering is invariant to station order") {
  auto stations = santiago_stations();
  auto shuffled = stations;
  std::mt19937_64 rng(9);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(expert_altitude_clusters(stations).groups == expert_altitude_clusters(shuffled).groups);
}

TEST_CASE("merge_small_clusters folds a singleton into its neighbour") {
  auto feats = blob_features(5, 10.0, 10);
  StationFeatures outlier;
  outlier.station_id = 99;
  for (auto& v : outlier.features) v = 100.0;
  feats.push_back(outlier);
  ClusterAssignment a = kmeans_cluster(feats, 3, 21);
  const bool has_singleton =
      std::any_of(a.groups.begin(), a.groups.end(), [](const auto& g) { return g.size() == 1; });
  CHECK(has_singleton);
  ClusterAssignment merged = merge_small_clusters(a, feats, 2);
  for (const auto& g : merged.groups) CHECK(g.size() >= 2);
  size_t total = 0;
  for (const auto& g : merged.groups) total += g.size();
  CHECK(total == feats.size());
}
