#ifndef ENSCAL_EXPERIMENT_HPP_
#define ENSCAL_EXPERIMENT_HPP_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enscal/bma.hpp"
#include "enscal/clustering.hpp"
#include "enscal/emos.hpp"
#include "enscal/forecast_data.hpp"
#include "enscal/verification.hpp"

namespace enscal {

enum class Method { kRaw, kEmos, kBma };

struct RunConfig {
  std::string forecast_file;
  std::string station_file;
  std::string output_dir;

  Method method = Method::kEmos;
  BiasMode bias_mode = BiasMode::kFull;       // BMA only
  ClusterMethod clustering = ClusterMethod::kRegional;
  int kmeans_k = 2;

  int training_length_days = 20;
  std::vector<int> training_sweep = {10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60};
  std::vector<int> hours;                     // empty = all 8 forecast hours
  std::optional<Date> verify_start;
  std::optional<Date> verify_end;

  unsigned long long seed = 1;
  int dm_horizon_days = 1;
  bool write_svg = false;
  bool allow_singleton_fallback = true;

  int emos_min_cases = 110;
  int bma_min_cases = 270;
  int cluster_min_cases = 60;  // relaxed per-cluster minimum for semi-local fits
};

// "raw", "emos", "emos-c", "bma"
std::string method_label(const RunConfig& cfg);

// Per-case predictive summary for forecasts.csv; pit is NaN on the raw path.
struct ForecastRow {
  Date date{};
  int hour = 0;
  int station_id = 0;
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double pit = 0.0;
};

struct RunResult {
  std::string model;                    // method label
  ScoreReport model_report;             // empty for raw-only runs
  ScoreReport raw_report;
  std::vector<ScoredCase> model_cases;
  std::vector<ScoredCase> raw_cases;
  std::vector<double> model_pits;
  std::vector<ForecastRow> forecast_rows;
  std::array<long, 10> rank_histogram{};
  int windows_processed = 0;
  int windows_skipped = 0;
};

// Rolling-window calibration over every verification (date, hour): cluster,
// fit per group, predict, score; the raw ensemble is always scored on the
// same case set. Writes artifact CSVs into cfg.output_dir when set.
RunResult run_experiment(const Dataset& ds, const RunConfig& cfg);
RunResult run_experiment(const RunConfig& cfg);  // loads data from the config paths

// CRPS-vs-training-length curves (one row per hour and length).
struct SweepPoint {
  int hour = 0;  // -1 = overall
  int length_days = 0;
  double crps = 0.0;
  long n_cases = 0;
};
std::vector<SweepPoint> run_sweep(const Dataset& ds, const RunConfig& cfg);

// Pairwise DM matrices across completed run directories. Runs must cover
// identical (date, hour, station) case sets.
void compare_runs(const std::vector<std::string>& report_dirs, const std::string& out_dir,
                  int dm_horizon_days = 1);

void write_run_artifacts(const RunResult& res, const RunConfig& cfg);

}  // namespace enscal

#endif  // ENSCAL_EXPERIMENT_HPP_
