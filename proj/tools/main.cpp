// Command-line driver: simulate, calibrate, verify, cluster, sweep, compare.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "enscal/experiment.hpp"
#include "enscal/synthetic.hpp"

namespace {

using namespace enscal;

struct CliOptions {
  RunConfig run;
  std::string method = "emos";
  std::string bias_mode = "full";
  std::string clustering;  // empty = derived from method
  std::string verify_start, verify_end;
  bool print_config = false;
};

void add_run_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--forecasts", o.run.forecast_file, "Forecast CSV path")->required();
  cmd->add_option("--stations", o.run.station_file, "Station CSV path")->required();
  cmd->add_option("--out", o.run.output_dir, "Output directory");
  cmd->add_option("--training-days", o.run.training_length_days,
                  "Rolling training window length")
      ->capture_default_str();
  cmd->add_option("--hours", o.run.hours, "Forecast hours to process (default: all 8)");
  cmd->add_option("--verify-start", o.verify_start, "First verification date (YYYY-MM-DD)");
  cmd->add_option("--verify-end", o.verify_end, "Last verification date (YYYY-MM-DD)");
  cmd->add_option("--seed", o.run.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--dm-lags", o.run.dm_horizon_days,
                  "DM variance truncation horizon in days")
      ->capture_default_str();
  cmd->add_flag("--svg", o.run.write_svg, "Also render histograms as SVG");
  cmd->add_option("--emos-min-cases", o.run.emos_min_cases,
                  "Minimum window size for regional EMOS")
      ->capture_default_str();
  cmd->add_option("--bma-min-cases", o.run.bma_min_cases, "Minimum window size for BMA")
      ->capture_default_str();
  cmd->add_option("--cluster-min-cases", o.run.cluster_min_cases,
                  "Minimum per-cluster window size for semi-local fits")
      ->capture_default_str();
}

void add_model_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--method", o.method, "raw | emos | emos-c | bma")->capture_default_str();
  cmd->add_option("--bias-mode", o.bias_mode, "BMA bias correction: full | additive | none")
      ->capture_default_str();
  cmd->add_option("--clustering", o.clustering,
                  "regional | kmeans | expert-altitude | local (default from method)");
  cmd->add_option("-k,--kmeans-k", o.run.kmeans_k, "Number of k-means clusters (2 or 3)")
      ->capture_default_str();
  cmd->add_flag("!--no-singleton-fallback", o.run.allow_singleton_fallback,
                "Disable merging of too-small clusters");
}

void resolve(CliOptions& o) {
  if (o.method == "raw") {
    o.run.method = Method::kRaw;
  } else if (o.method == "emos") {
    o.run.method = Method::kEmos;
  } else if (o.method == "emos-c") {
    o.run.method = Method::kEmos;
    if (o.clustering.empty()) o.clustering = "expert-altitude";
  } else if (o.method == "bma") {
    o.run.method = Method::kBma;
  } else {
    throw CLI::ValidationError("--method", "unknown method '" + o.method + "'");
  }

  if (o.bias_mode == "full") {
    o.run.bias_mode = BiasMode::kFull;
  } else if (o.bias_mode == "additive") {
    o.run.bias_mode = BiasMode::kAdditive;
  } else if (o.bias_mode == "none") {
    o.run.bias_mode = BiasMode::kNone;
  } else {
    throw CLI::ValidationError("--bias-mode", "unknown mode '" + o.bias_mode + "'");
  }

  if (o.clustering.empty() || o.clustering == "regional") {
    o.run.clustering = ClusterMethod::kRegional;
  } else if (o.clustering == "kmeans") {
    o.run.clustering = ClusterMethod::kKMeans;
  } else if (o.clustering == "expert-altitude") {
    o.run.clustering = ClusterMethod::kExpertAltitude;
  } else if (o.clustering == "local") {
    o.run.clustering = ClusterMethod::kLocal;
  } else {
    throw CLI::ValidationError("--clustering", "unknown clustering '" + o.clustering + "'");
  }

  if (!o.verify_start.empty()) o.run.verify_start = parse_date(o.verify_start);
  if (!o.verify_end.empty()) o.run.verify_end = parse_date(o.verify_end);
}

void print_report(const std::string& model, const ScoreReport& rep) {
  std::printf("%-8s %6s %10s %10s %10s %10s %8s\n", "model", "hour", "crps", "rmse", "mae",
              "cover%", "n");
  for (const auto& [hour, row] : rep.by_hour) {
    std::printf("%-8s %6d %10.4f %10.4f %10.4f %10.2f %8ld\n", model.c_str(), hour, row.crps,
                row.rmse, row.mae, row.coverage_pct, row.n_cases);
  }
  const auto& o = rep.overall;
  std::printf("%-8s %6s %10.4f %10.4f %10.4f %10.2f %8ld\n", model.c_str(), "all", o.crps,
              o.rmse, o.mae, o.coverage_pct, o.n_cases);
}

int cmd_simulate(const std::string& preset, const ScenarioSpec& custom, bool use_custom,
                 const std::string& out_forecasts, const std::string& out_stations) {
  ScenarioSpec spec = use_custom ? custom : preset_scenario(preset, custom.seed);
  if (use_custom && spec.stations.empty() && spec.n_stations == 19) {
    spec.stations = santiago_stations();
  }
  Dataset ds = generate(spec);
  save_dataset(ds, out_forecasts, out_stations);
  std::printf("wrote %zu cases for %zu stations to %s\n", ds.cases.size(), ds.stations.size(),
              out_forecasts.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble temperature forecast post-processing (EMOS / BMA) and verification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file");

  CliOptions o;

  // simulate
  std::string preset = "calibrated";
  ScenarioSpec spec;
  bool custom_scenario = false;
  std::string sim_forecasts = "forecasts.csv", sim_stations = "stations.csv";
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic forecast/observation dataset");
  sim->add_option("--preset", preset, "calibrated | underdispersed | andes")
      ->capture_default_str();
  sim->add_flag("--custom", custom_scenario, "Use the --n-* scenario flags instead of a preset");
  sim->add_option("--n-stations", spec.n_stations)->capture_default_str();
  sim->add_option("--n-days", spec.n_days)->capture_default_str();
  sim->add_option("--spread-factor", spec.spread_factor)->capture_default_str();
  sim->add_option("--altitude-bias-slope", spec.altitude_bias_slope, "kelvin per km")
      ->capture_default_str();
  sim->add_option("--seed", spec.seed)->capture_default_str();
  sim->add_option("--out-forecasts", sim_forecasts)->capture_default_str();
  sim->add_option("--out-stations", sim_stations)->capture_default_str();

  // calibrate
  auto* cal = app.add_subcommand("calibrate",
                                 "Fit per rolling window, predict, score, write reports");
  add_run_options(cal, o);
  add_model_options(cal, o);

  // verify: raw-ensemble scoring only
  auto* ver = app.add_subcommand("verify", "Score the raw ensemble and build rank histograms");
  add_run_options(ver, o);

  // cluster
  auto* clu = app.add_subcommand("cluster", "Emit station cluster assignments per window");
  add_run_options(clu, o);
  add_model_options(clu, o);

  // sweep
  auto* swp = app.add_subcommand("sweep", "CRPS vs training-window length curves");
  add_run_options(swp, o);
  add_model_options(swp, o);
  swp->add_option("--lengths", o.run.training_sweep, "Training lengths in days")
      ->capture_default_str();

  // compare
  std::vector<std::string> compare_dirs;
  std::string compare_out = "compare";
  int compare_lags = 1;
  auto* cmp = app.add_subcommand("compare", "Pairwise DM matrices across run directories");
  cmp->add_option("dirs", compare_dirs, "Run output directories")->required()->expected(-2);
  cmp->add_option("--out", compare_out)->capture_default_str();
  cmp->add_option("--dm-lags", compare_lags)->capture_default_str();

  for (auto* c : {cal, ver, clu, swp}) {
    c->add_flag("--print-config", o.print_config, "Print the resolved configuration and exit");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(preset, spec, custom_scenario, sim_forecasts, sim_stations);
    }
    if (cmp->parsed()) {
      compare_runs(compare_dirs, compare_out, compare_lags);
      std::printf("wrote DM matrices to %s\n", compare_out.c_str());
      return 0;
    }

    resolve(o);
    if (ver->parsed()) o.run.method = Method::kRaw;

    if (o.print_config) {
      std::printf("forecasts=%s\nstations=%s\nout=%s\nmethod=%s\nbias_mode=%s\n",
                  o.run.forecast_file.c_str(), o.run.station_file.c_str(),
                  o.run.output_dir.c_str(), method_label(o.run).c_str(), o.bias_mode.c_str());
      std::printf("clustering=%s\nkmeans_k=%d\ntraining_days=%d\nseed=%llu\ndm_lags=%d\n",
                  o.clustering.empty() ? "regional" : o.clustering.c_str(), o.run.kmeans_k,
                  o.run.training_length_days, (unsigned long long)o.run.seed,
                  o.run.dm_horizon_days);
      std::printf("emos_min_cases=%d\nbma_min_cases=%d\ncluster_min_cases=%d\nsweep=",
                  o.run.emos_min_cases, o.run.bma_min_cases, o.run.cluster_min_cases);
      for (size_t i = 0; i < o.run.training_sweep.size(); ++i) {
        std::printf("%s%d", i ? "," : "", o.run.training_sweep[i]);
      }
      std::printf("\n");
      return 0;
    }

    Dataset ds = load_dataset(o.run.forecast_file, o.run.station_file);

    if (clu->parsed()) {
      // Assignment CSV over every verification (date, hour).
      std::set<Date> dates;
      for (const auto& c : ds.cases) dates.insert(c.date);
      Date vstart = *dates.begin() + std::chrono::days{o.run.training_length_days};
      Date vend = *dates.rbegin();
      if (o.run.verify_start) vstart = std::max(vstart, *o.run.verify_start);
      if (o.run.verify_end) vend = std::min(vend, *o.run.verify_end);
      std::vector<int> hours = o.run.hours;
      if (hours.empty()) hours.assign(kForecastHours.begin(), kForecastHours.end());

      std::ostream* out = &std::cout;
      std::ofstream file;
      if (!o.run.output_dir.empty()) {
        std::filesystem::create_directories(o.run.output_dir);
        file.open(std::filesystem::path(o.run.output_dir) / "clusters.csv");
        out = &file;
      }
      *out << "target_date,hour,method,station_id,cluster_id\n";
      for (Date d = vstart; d <= vend; d += std::chrono::days{1}) {
        for (int hour : hours) {
          ClusterAssignment a;
          if (o.run.clustering == ClusterMethod::kExpertAltitude) {
            a = expert_altitude_clusters(ds.stations);
          } else if (o.run.clustering == ClusterMethod::kKMeans) {
            TrainingWindow w = select_window(ds, d, hour, o.run.training_length_days);
            std::vector<StationFeatures> feats;
            for (const auto& st : ds.stations) {
              try {
                feats.push_back(build_features(ds, st.id, w));
              } catch (const FitError&) {
              }
            }
            if (int(feats.size()) < o.run.kmeans_k) continue;
            a = kmeans_cluster(feats, o.run.kmeans_k, o.run.seed);
          } else {
            a.method = o.run.clustering;
            if (o.run.clustering == ClusterMethod::kLocal) {
              for (const auto& st : ds.stations) a.groups.push_back({st.id});
            } else {
              a.groups.emplace_back();
              for (const auto& st : ds.stations) a.groups.back().push_back(st.id);
            }
          }
          a.target_date = d;
          a.hour = hour;
          for (size_t g = 0; g < a.groups.size(); ++g) {
            for (int sid : a.groups[g]) {
              *out << format_date(d) << ',' << hour << ',' << cluster_method_name(a) << ','
                   << sid << ',' << g + 1 << '\n';
            }
          }
        }
      }
      return 0;
    }

    if (swp->parsed()) {
      auto points = run_sweep(ds, o.run);
      std::ostream* out = &std::cout;
      std::ofstream file;
      if (!o.run.output_dir.empty()) {
        std::filesystem::create_directories(o.run.output_dir);
        file.open(std::filesystem::path(o.run.output_dir) / "sweep.csv");
        out = &file;
      }
      *out << "model,hour,length_days,crps,n_cases\n";
      char buf[96];
      for (const auto& p : points) {
        std::string hour = p.hour < 0 ? "overall" : std::to_string(p.hour);
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.6f,%ld\n", method_label(o.run).c_str(),
                      hour.c_str(), p.length_days, p.crps, p.n_cases);
        *out << buf;
      }
      return 0;
    }

    // calibrate / verify
    RunResult res = run_experiment(ds, o.run);
    if (o.run.method != Method::kRaw) print_report(res.model, res.model_report);
    print_report("raw", res.raw_report);
    if (res.windows_skipped > 0) {
      std::fprintf(stderr, "warning: %d (date,hour) windows skipped\n", res.windows_skipped);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
