#ifndef ENSCAL_CLUSTERING_HPP_
#define ENSCAL_CLUSTERING_HPP_

#include <array>
#include <string>
#include <vector>

#include "enscal/errors.hpp"
#include "enscal/forecast_data.hpp"

namespace enscal {

inline constexpr int kFeatureCount = 24;
inline constexpr int kQuantilesPerBlock = 12;

// 12 equidistant quantiles (levels i/13) of the station's climatological
// observation CDF followed by 12 of the ensemble-mean forecast-error CDF
// over the training window.
struct StationFeatures {
  int station_id = 0;
  std::array<double, kFeatureCount> features{};
};

enum class ClusterMethod { kRegional, kKMeans, kExpertAltitude, kLocal };

struct ClusterAssignment {
  Date target_date{};
  int hour = 0;
  ClusterMethod method = ClusterMethod::kRegional;
  int k = 1;  // number of requested clusters (k-means only)
  std::vector<std::vector<int>> groups;  // disjoint station-id groups

  int group_of(int station_id) const;  // -1 when absent
};

std::string cluster_method_name(const ClusterAssignment& a);

// Climatology = all observed cases for the station up to the window end
// (expanding span); forecast errors come from the window itself.
StationFeatures build_features(const Dataset& ds, int station_id, const TrainingWindow& window);

// Lloyd iterations with k-means++ seeding on per-dimension standardized
// features, 25 restarts, best within-cluster sum of squares kept.
ClusterAssignment kmeans_cluster(const std::vector<StationFeatures>& features, int k,
                                 unsigned long long seed);

// Altitude bands: < 400 m, [400 m, 750 m], > 750 m.
ClusterAssignment expert_altitude_clusters(const std::vector<Station>& stations);

// Merges any group whose station count times window days cannot meet
// min_cases into the group with the nearest feature centroid. Only
// meaningful for k-means assignments with features available.
ClusterAssignment merge_small_clusters(const ClusterAssignment& a,
                                       const std::vector<StationFeatures>& features,
                                       int min_stations);

}  // namespace enscal

#endif  // ENSCAL_CLUSTERING_HPP_
