#include "enscal/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "enscal/math_util.hpp"
#include "enscal/synthetic.hpp"

namespace enscal {

namespace {

unsigned long long mix_seed(unsigned long long seed, long a, long b, long c) {
  unsigned long long z = seed ^ (0x9e3779b97f4a7c15ULL * (unsigned long long)(a + 1));
  z ^= 0xbf58476d1ce4e5b9ULL * (unsigned long long)(b + 7);
  z ^= 0x94d049bb133111ebULL * (unsigned long long)(c + 13);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string method_label(const RunConfig& cfg) {
  switch (cfg.method) {
    case Method::kRaw:
      return "raw";
    case Method::kBma:
      return "bma";
    case Method::kEmos:
      return cfg.clustering == ClusterMethod::kRegional ? "emos" : "emos-c";
  }
  return "unknown";
}

namespace {

// One fitted model per station group for a single (date, hour).
struct GroupFit {
  std::vector<int> station_ids;
  std::optional<EmosParams> emos;
  std::optional<BmaParams> bma;
};

std::vector<std::vector<int>> station_groups(const Dataset& ds, const RunConfig& cfg,
                                             Date target, int hour) {
  std::vector<int> all_ids;
  for (const auto& s : ds.stations) all_ids.push_back(s.id);
  std::sort(all_ids.begin(), all_ids.end());

  switch (cfg.clustering) {
    case ClusterMethod::kRegional:
      return {all_ids};
    case ClusterMethod::kLocal: {
      std::vector<std::vector<int>> g;
      for (int id : all_ids) g.push_back({id});
      return g;
    }
    case ClusterMethod::kExpertAltitude:
      return expert_altitude_clusters(ds.stations).groups;
    case ClusterMethod::kKMeans: {
      TrainingWindow w = select_window(ds, target, hour, cfg.training_length_days);
      std::vector<StationFeatures> feats;
      std::vector<int> unfeatured;
      for (int id : all_ids) {
        try {
          feats.push_back(build_features(ds, id, w));
        } catch (const FitError&) {
          unfeatured.push_back(id);
        }
      }
      if (int(feats.size()) < cfg.kmeans_k) return {all_ids};
      ClusterAssignment a =
          kmeans_cluster(feats, cfg.kmeans_k, mix_seed(cfg.seed, target.time_since_epoch().count(), hour, 0));
      if (cfg.allow_singleton_fallback) {
        const int min_stations =
            (cfg.cluster_min_cases + cfg.training_length_days - 1) / cfg.training_length_days;
        a = merge_small_clusters(a, feats, min_stations);
      }
      if (!unfeatured.empty()) {
        // Stations without enough history ride along with the largest group.
        auto largest = std::max_element(
            a.groups.begin(), a.groups.end(),
            [](const auto& x, const auto& y) { return x.size() < y.size(); });
        largest->insert(largest->end(), unfeatured.begin(), unfeatured.end());
        std::sort(largest->begin(), largest->end());
      }
      return a.groups;
    }
  }
  return {all_ids};
}

}  // namespace

RunResult run_experiment(const Dataset& ds, const RunConfig& cfg) {
  if (cfg.method == Method::kBma && cfg.clustering != ClusterMethod::kRegional) {
    throw std::invalid_argument("BMA supports regional estimation only");
  }
  RunResult res;
  res.model = method_label(cfg);

  std::vector<int> hours(cfg.hours);
  if (hours.empty()) hours.assign(kForecastHours.begin(), kForecastHours.end());
  std::sort(hours.begin(), hours.end());

  std::set<Date> all_dates;
  for (const auto& c : ds.cases) all_dates.insert(c.date);
  if (all_dates.empty()) throw DataError("run_experiment: dataset has no cases");
  Date vstart = *all_dates.begin() + std::chrono::days{cfg.training_length_days};
  Date vend = *all_dates.rbegin();
  if (cfg.verify_start) vstart = std::max(vstart, *cfg.verify_start);
  if (cfg.verify_end) vend = std::min(vend, *cfg.verify_end);

  // Today's cases indexed for fast lookup.
  std::map<std::pair<long, int>, std::vector<const ForecastCase*>> by_date_hour;
  for (const auto& c : ds.cases) {
    if (!c.observation) continue;
    if (c.date < vstart || c.date > vend) continue;
    by_date_hour[{c.date.time_since_epoch().count(), c.hour}].push_back(&c);
  }
  for (auto& [key, v] : by_date_hour) {
    std::sort(v.begin(), v.end(), [](const ForecastCase* a, const ForecastCase* b) {
      return a->station_id < b->station_id;
    });
  }

  RankHistogram rank_hist(cfg.seed);
  std::vector<ForecastRow>& rows = res.forecast_rows;

  for (Date d = vstart; d <= vend; d += std::chrono::days{1}) {
    for (int hour : hours) {
      auto it = by_date_hour.find({d.time_since_epoch().count(), hour});
      if (it == by_date_hour.end() || it->second.empty()) continue;
      const auto& today = it->second;

      std::vector<GroupFit> fits;
      bool skipped = false;
      if (cfg.method != Method::kRaw) {
        const auto groups = station_groups(ds, cfg, d, hour);
        for (const auto& g : groups) {
          TrainingWindow w = select_window(ds, d, hour, cfg.training_length_days, {g});
          GroupFit gf;
          gf.station_ids = g;
          try {
            if (cfg.method == Method::kEmos) {
              EmosFitOptions o;
              o.min_cases = cfg.clustering == ClusterMethod::kRegional ? cfg.emos_min_cases
                                                                       : cfg.cluster_min_cases;
              o.seed = mix_seed(cfg.seed, d.time_since_epoch().count(), hour, g.front());
              gf.emos = fit_emos(w, o);
            } else {
              EmOptions o;
              o.min_cases = cfg.bma_min_cases;
              gf.bma = fit_bma(w, cfg.bias_mode, o);
            }
          } catch (const FitError& e) {
            std::cerr << "warning: skipping " << format_date(d) << " hour " << hour << ": "
                      << e.what() << "\n";
            skipped = true;
            break;
          }
          fits.push_back(std::move(gf));
        }
        if (skipped) {
          ++res.windows_skipped;
          continue;
        }
      }
      ++res.windows_processed;

      for (const ForecastCase* c : today) {
        res.raw_cases.push_back(score_case_ensemble(*c));
        rank_hist.add(*c);
        if (cfg.method == Method::kRaw) {
          auto sorted = c->members;
          std::sort(sorted.begin(), sorted.end());
          rows.push_back({c->date, c->hour, c->station_id, ensemble_mean(*c),
                          sorted[kEnsembleSize / 2], sorted.front(), sorted.back(),
                          std::numeric_limits<double>::quiet_NaN()});
          continue;
        }
        const GroupFit* gf = nullptr;
        for (const auto& f : fits) {
          if (std::find(f.station_ids.begin(), f.station_ids.end(), c->station_id) !=
              f.station_ids.end()) {
            gf = &f;
            break;
          }
        }
        if (!gf) continue;  // station outside every fitted group
        ScoredCase s;
        ForecastRow row{c->date, c->hour, c->station_id, 0, 0, 0, 0, 0};
        if (gf->emos) {
          const NormalPredictive pred = predict_emos(*gf->emos, *c);
          s = score_case(pred, *c);
          row.mean = predictive_mean(pred);
          row.median = quantile(pred, 0.5);
          row.q10 = quantile(pred, 0.1);
          row.q90 = quantile(pred, 0.9);
        } else {
          const MixturePredictive pred = predict_bma(*gf->bma, *c);
          s = score_case(pred, *c);
          row.mean = predictive_mean(pred);
          row.median = quantile(pred, 0.5);
          row.q10 = quantile(pred, 0.1);
          row.q90 = quantile(pred, 0.9);
        }
        row.pit = s.pit;
        rows.push_back(row);
        res.model_pits.push_back(s.pit);
        res.model_cases.push_back(s);
      }
    }
  }

  res.rank_histogram = {};
  const auto& counts = rank_hist.counts();
  for (int i = 0; i < 10; ++i) res.rank_histogram[i] = counts[i];
  res.raw_report = build_report(res.raw_cases);
  if (cfg.method != Method::kRaw) res.model_report = build_report(res.model_cases);

  if (!cfg.output_dir.empty()) write_run_artifacts(res, cfg);
  return res;
}

RunResult run_experiment(const RunConfig& cfg) {
  Dataset ds = load_dataset(cfg.forecast_file, cfg.station_file);
  return run_experiment(ds, cfg);
}

std::vector<SweepPoint> run_sweep(const Dataset& ds, const RunConfig& cfg) {
  std::vector<SweepPoint> points;
  // Hold the verification range fixed across lengths so curves are comparable.
  RunConfig base = cfg;
  base.output_dir.clear();
  if (!base.verify_start) {
    std::set<Date> dates;
    for (const auto& c : ds.cases) dates.insert(c.date);
    int max_len = *std::max_element(cfg.training_sweep.begin(), cfg.training_sweep.end());
    base.verify_start = *dates.begin() + std::chrono::days{max_len};
  }
  for (int len : cfg.training_sweep) {
    RunConfig c = base;
    c.training_length_days = len;
    RunResult r = run_experiment(ds, c);
    const ScoreReport& rep = cfg.method == Method::kRaw ? r.raw_report : r.model_report;
    for (const auto& [hour, row] : rep.by_hour) {
      points.push_back({hour, len, row.crps, row.n_cases});
    }
    points.push_back({-1, len, rep.overall.crps, rep.overall.n_cases});
  }
  return points;
}

namespace {

void write_scores_csv(std::ofstream& out, const std::string& model, const ScoreReport& rep) {
  char buf[160];
  for (const auto& [hour, row] : rep.by_hour) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%.6f,%.2f,%ld\n", model.c_str(), hour,
                  row.crps, row.rmse, row.mae, row.coverage_pct, row.n_cases);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%s,overall,%.6f,%.6f,%.6f,%.2f,%ld\n", model.c_str(),
                rep.overall.crps, rep.overall.rmse, rep.overall.mae, rep.overall.coverage_pct,
                rep.overall.n_cases);
  out << buf;
}

void write_histogram_csv(const std::string& path, const std::array<long, 10>& bins) {
  std::ofstream out(path);
  long total = 0;
  for (long b : bins) total += b;
  out << "bin,count,relative_frequency\n";
  char buf[64];
  for (int i = 0; i < 10; ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%ld,%.6f\n", i + 1, bins[i],
                  total > 0 ? double(bins[i]) / double(total) : 0.0);
    out << buf;
  }
}

void write_histogram_svg(const std::string& path, const std::array<long, 10>& bins,
                         const std::string& title) {
  long total = 0, peak = 1;
  for (long b : bins) {
    total += b;
    peak = std::max(peak, b);
  }
  const int w = 400, h = 260, pad = 30;
  std::ofstream out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  out << "<text x=\"" << w / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">" << title
      << "</text>\n";
  const double bw = double(w - 2 * pad) / 10.0;
  for (int i = 0; i < 10; ++i) {
    const double bh = double(bins[i]) / double(peak) * (h - 2 * pad - 10);
    out << "<rect x=\"" << pad + i * bw + 1 << "\" y=\"" << h - pad - bh << "\" width=\""
        << bw - 2 << "\" height=\"" << bh << "\" fill=\"steelblue\"/>\n";
    out << "<text x=\"" << pad + (i + 0.5) * bw << "\" y=\"" << h - pad + 14
        << "\" text-anchor=\"middle\" font-size=\"10\">" << i + 1 << "</text>\n";
  }
  // Uniform reference line.
  const double uy = h - pad - (double(total) / 10.0) / double(peak) * (h - 2 * pad - 10);
  out << "<line x1=\"" << pad << "\" y1=\"" << uy << "\" x2=\"" << w - pad << "\" y2=\"" << uy
      << "\" stroke=\"firebrick\" stroke-dasharray=\"4,3\"/>\n";
  out << "</svg>\n";
}

std::vector<double> daily_series(const std::vector<ScoredCase>& cases, bool use_crps,
                                 const std::vector<long>& days) {
  std::map<long, std::pair<double, long>> acc;
  for (const auto& s : cases) {
    auto& a = acc[s.date.time_since_epoch().count()];
    a.first += use_crps ? s.crps : s.abs_err_median;
    a.second += 1;
  }
  std::vector<double> out;
  for (long day : days) {
    const auto& a = acc.at(day);
    out.push_back(a.first / double(a.second));
  }
  return out;
}

void write_dm_matrix(const std::string& path,
                     const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& stats,
                     const std::vector<std::vector<double>>& pvals) {
  std::ofstream out(path);
  out << "model";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  char buf[64];
  for (size_t i = 0; i < names.size(); ++i) {
    out << names[i];
    for (size_t j = 0; j < names.size(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.6f%s", stats[i][j],
                    (i != j && pvals[i][j] < 0.05) ? "*" : "");
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace

void write_run_artifacts(const RunResult& res, const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  {
    std::ofstream out(dir / "scores.csv");
    out << "model,hour,crps,rmse,mae,coverage_pct,n_cases\n";
    if (cfg.method != Method::kRaw) write_scores_csv(out, res.model, res.model_report);
    write_scores_csv(out, "raw", res.raw_report);
  }

  {
    std::ofstream out(dir / "case_scores.csv");
    out << "model,date,hour,station_id,crps,ae_median\n";
    char buf[128];
    auto dump = [&](const std::string& model, const std::vector<ScoredCase>& cases) {
      for (const auto& s : cases) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%.6f,%.6f\n", model.c_str(),
                      format_date(s.date).c_str(), s.hour, s.station_id, s.crps,
                      s.abs_err_median);
        out << buf;
      }
    };
    if (cfg.method != Method::kRaw) dump(res.model, res.model_cases);
    dump("raw", res.raw_cases);
  }

  {
    std::ofstream out(dir / "forecasts.csv");
    out << "model,date,hour,station_id,mean,median,q10,q90,pit\n";
    char buf[192];
    const std::string model = res.model;
    for (const auto& r : res.forecast_rows) {
      if (std::isnan(r.pit)) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%.6f,%.6f,%.6f,%.6f,NA\n", model.c_str(),
                      format_date(r.date).c_str(), r.hour, r.station_id, r.mean, r.median, r.q10,
                      r.q90);
      } else {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", model.c_str(),
                      format_date(r.date).c_str(), r.hour, r.station_id, r.mean, r.median, r.q10,
                      r.q90, r.pit);
      }
      out << buf;
    }
  }

  write_histogram_csv((dir / "hist_rank_raw.csv").string(), res.rank_histogram);
  if (cfg.write_svg) {
    write_histogram_svg((dir / "hist_rank_raw.svg").string(), res.rank_histogram,
                        "Verification rank histogram (raw)");
  }
  if (cfg.method != Method::kRaw) {
    std::array<long, 10> pit_bins = pit_histogram(res.model_pits);
    write_histogram_csv((dir / ("hist_pit_" + res.model + ".csv")).string(), pit_bins);
    if (cfg.write_svg) {
      write_histogram_svg((dir / ("hist_pit_" + res.model + ".svg")).string(), pit_bins,
                          "PIT histogram (" + res.model + ")");
    }

    // Model-vs-raw DM matrices over the shared daily score series.
    std::vector<long> days;
    {
      std::set<long> ds;
      for (const auto& s : res.model_cases) ds.insert(s.date.time_since_epoch().count());
      days.assign(ds.begin(), ds.end());
    }
    if (days.size() >= 10) {
      const std::vector<std::string> names = {res.model, "raw"};
      for (bool use_crps : {true, false}) {
        auto a = daily_series(res.model_cases, use_crps, days);
        auto b = daily_series(res.raw_cases, use_crps, days);
        std::vector<std::vector<double>> stats(2, std::vector<double>(2, 0.0));
        std::vector<std::vector<double>> pvals(2, std::vector<double>(2, 1.0));
        DmResult dm = dm_test(a, b, cfg.dm_horizon_days);
        stats[0][1] = dm.statistic;
        stats[1][0] = -dm.statistic;
        pvals[0][1] = pvals[1][0] = dm.p_value;
        write_dm_matrix((dir / (use_crps ? "dm_matrix_crps.csv" : "dm_matrix_ae.csv")).string(),
                        names, stats, pvals);
      }
    }
  }
}

namespace {

struct CaseScoreFile {
  std::string model;
  // keyed by (day, hour, station)
  std::map<std::tuple<long, int, int>, std::pair<double, double>> scores;  // crps, ae
};

CaseScoreFile read_case_scores(const std::string& dir) {
  std::ifstream in(std::filesystem::path(dir) / "case_scores.csv");
  if (!in) throw DataError("compare_runs: missing case_scores.csv in '" + dir + "'");
  std::string line;
  std::getline(in, line);
  CaseScoreFile f;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string model, date, field;
    std::getline(ss, model, ',');
    std::getline(ss, date, ',');
    std::getline(ss, field, ',');
    int hour = std::stoi(field);
    std::getline(ss, field, ',');
    int station = std::stoi(field);
    std::getline(ss, field, ',');
    double crps_v = std::stod(field);
    std::getline(ss, field, ',');
    double ae = std::stod(field);
    if (f.model.empty() && model != "raw") f.model = model;
    // Prefer the post-processed model's rows; fall back to raw-only runs.
    if (model == "raw" && !f.model.empty() && f.model != "raw") continue;
    if (model == "raw" && f.model.empty()) f.model = "raw";
    if (model != f.model) continue;
    f.scores[{parse_date(date).time_since_epoch().count(), hour, station}] = {crps_v, ae};
  }
  if (f.scores.empty()) throw DataError("compare_runs: no scores found in '" + dir + "'");
  return f;
}

}  // namespace

void compare_runs(const std::vector<std::string>& report_dirs, const std::string& out_dir,
                  int dm_horizon_days) {
  std::vector<CaseScoreFile> runs;
  for (const auto& d : report_dirs) runs.push_back(read_case_scores(d));

  // Case sets must align exactly.
  for (size_t i = 1; i < runs.size(); ++i) {
    auto it_a = runs[0].scores.begin();
    auto it_b = runs[i].scores.begin();
    while (it_a != runs[0].scores.end() && it_b != runs[i].scores.end()) {
      if (it_a->first != it_b->first) break;
      ++it_a;
      ++it_b;
    }
    if (it_a != runs[0].scores.end() || it_b != runs[i].scores.end()) {
      const auto& k = it_a != runs[0].scores.end() ? it_a->first : it_b->first;
      throw DataError("compare_runs: case sets misaligned between '" + report_dirs[0] +
                      "' and '" + report_dirs[i] + "', first mismatch at (" +
                      format_date(Date{std::chrono::days{std::get<0>(k)}}) + "," +
                      std::to_string(std::get<1>(k)) + "," + std::to_string(std::get<2>(k)) +
                      ")");
    }
  }

  // Daily means over stations and hours.
  std::vector<long> days;
  {
    std::set<long> ds;
    for (const auto& [k, v] : runs[0].scores) ds.insert(std::get<0>(k));
    days.assign(ds.begin(), ds.end());
  }
  const size_t n = runs.size();
  std::vector<std::vector<double>> crps_series(n), ae_series(n);
  for (size_t i = 0; i < n; ++i) {
    std::map<long, std::pair<std::array<double, 2>, long>> acc;
    for (const auto& [k, v] : runs[i].scores) {
      auto& a = acc[std::get<0>(k)];
      a.first[0] += v.first;
      a.first[1] += v.second;
      a.second += 1;
    }
    for (long day : days) {
      const auto& a = acc.at(day);
      crps_series[i].push_back(a.first[0] / double(a.second));
      ae_series[i].push_back(a.first[1] / double(a.second));
    }
  }

  std::vector<std::string> names;
  for (size_t i = 0; i < n; ++i) {
    std::string nm = runs[i].model;
    // Disambiguate duplicate labels with the run index.
    if (std::count_if(runs.begin(), runs.end(),
                      [&](const CaseScoreFile& r) { return r.model == runs[i].model; }) > 1) {
      nm += "#" + std::to_string(i + 1);
    }
    names.push_back(nm);
  }

  std::filesystem::create_directories(out_dir);
  for (bool use_crps : {true, false}) {
    const auto& series = use_crps ? crps_series : ae_series;
    std::vector<std::vector<double>> stats(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> pvals(n, std::vector<double>(n, 1.0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        DmResult dm = dm_test(series[i], series[j], dm_horizon_days);
        stats[i][j] = dm.statistic;
        stats[j][i] = -dm.statistic;
        pvals[i][j] = pvals[j][i] = dm.p_value;
      }
    }
    write_dm_matrix((std::filesystem::path(out_dir) /
                     (use_crps ? "dm_matrix_crps.csv" : "dm_matrix_ae.csv"))
                        .string(),
                    names, stats, pvals);
  }
}

}  // namespace enscal
