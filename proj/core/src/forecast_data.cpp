#include "enscal/forecast_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace enscal {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& s, const std::string& what, size_t line_no) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line_no) + ": unparsable " + what + " '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) {
    throw FormatError("line " + std::to_string(line_no) + ": unparsable " + what + " '" + s + "'");
  }
  return v;
}

void expect_header(const std::string& got, const std::string& want, const std::string& file) {
  auto g = split_csv_line(got);
  auto w = split_csv_line(want);
  if (g.size() != w.size()) {
    throw FormatError(file + ": malformed header, expected '" + want + "'");
  }
  for (size_t i = 0; i < w.size(); ++i) {
    if (g[i] != w[i]) {
      throw FormatError(file + ": malformed header, bad column '" + g[i] + "' (expected '" +
                        w[i] + "')");
    }
  }
}

}  // namespace

Date parse_date(const std::string& iso) {
  int y, m, d;
  char dash1, dash2;
  std::istringstream is(iso);
  if (!(is >> y >> dash1 >> m >> dash2 >> d) || dash1 != '-' || dash2 != '-') {
    throw FormatError("bad date '" + iso + "', expected YYYY-MM-DD");
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                  std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) throw FormatError("invalid calendar date '" + iso + "'");
  return std::chrono::sys_days{ymd};
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

double ensemble_mean(const ForecastCase& c) {
  double s = 0.0;
  for (double m : c.members) s += m;
  return s / kEnsembleSize;
}

double ensemble_variance(const ForecastCase& c) {
  const double mean = ensemble_mean(c);
  double ss = 0.0;
  for (double m : c.members) ss += (m - mean) * (m - mean);
  return ss / (kEnsembleSize - 1);
}

const Station* Dataset::find_station(int id) const {
  for (const auto& s : stations) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

bool StationIdSet::contains(int id) const {
  if (ids.empty()) return true;
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

Dataset load_dataset(const std::string& forecast_file, const std::string& station_file) {
  Dataset ds;

  std::ifstream sf(station_file);
  if (!sf) throw DataError("cannot open station file '" + station_file + "'");
  std::string line;
  if (!std::getline(sf, line)) throw FormatError(station_file + ": empty file");
  expect_header(line, "station_id,name,longitude,latitude,altitude_m", station_file);
  size_t line_no = 1;
  std::set<int> seen_ids;
  while (std::getline(sf, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 5) {
      throw FormatError(station_file + ": line " + std::to_string(line_no) +
                        ": expected 5 fields, got " + std::to_string(f.size()));
    }
    Station st;
    st.id = int(parse_number(f[0], "station_id", line_no));
    st.name = f[1];
    st.longitude = parse_number(f[2], "longitude", line_no);
    st.latitude = parse_number(f[3], "latitude", line_no);
    st.altitude_m = parse_number(f[4], "altitude_m", line_no);
    if (!seen_ids.insert(st.id).second) {
      throw DuplicateRecordError(station_file + ": duplicate station id " + std::to_string(st.id));
    }
    if (st.altitude_m < 0) {
      throw FormatError(station_file + ": line " + std::to_string(line_no) +
                        ": negative altitude");
    }
    if (st.longitude < -180 || st.longitude > 180 || st.latitude < -90 || st.latitude > 90) {
      throw FormatError(station_file + ": line " + std::to_string(line_no) +
                        ": coordinates out of range");
    }
    ds.stations.push_back(std::move(st));
  }

  std::ifstream ff(forecast_file);
  if (!ff) throw DataError("cannot open forecast file '" + forecast_file + "'");
  if (!std::getline(ff, line)) throw FormatError(forecast_file + ": empty file");
  expect_header(line, "date,hour,station_id,obs,m1,m2,m3,m4,m5,m6,m7,m8,m9", forecast_file);
  line_no = 1;
  std::set<std::tuple<int, int, int>> seen_keys;  // (days, hour, station)
  while (std::getline(ff, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 13) {
      throw FormatError(forecast_file + ": line " + std::to_string(line_no) +
                        ": expected 13 fields, got " + std::to_string(f.size()));
    }
    ForecastCase c;
    c.date = parse_date(f[0]);
    c.hour = int(parse_number(f[1], "hour", line_no));
    if (std::find(kForecastHours.begin(), kForecastHours.end(), c.hour) == kForecastHours.end()) {
      throw FormatError(forecast_file + ": line " + std::to_string(line_no) + ": bad hour " +
                        f[1]);
    }
    c.station_id = int(parse_number(f[2], "station_id", line_no));
    if (!ds.find_station(c.station_id)) {
      throw ReferenceError(forecast_file + ": line " + std::to_string(line_no) +
                           ": unknown station id " + f[2]);
    }
    if (f[3] == "NA") {
      c.observation = std::nullopt;
    } else {
      double obs = parse_number(f[3], "obs", line_no);
      if (obs <= 0.0) {
        throw FormatError(forecast_file + ": line " + std::to_string(line_no) +
                          ": non-physical observation " + f[3] + " K");
      }
      c.observation = obs;
    }
    for (int k = 0; k < kEnsembleSize; ++k) {
      c.members[k] = parse_number(f[4 + k], "m" + std::to_string(k + 1), line_no);
    }
    auto key = std::make_tuple(int(c.date.time_since_epoch().count()), c.hour, c.station_id);
    if (!seen_keys.insert(key).second) {
      throw DuplicateRecordError(forecast_file + ": line " + std::to_string(line_no) +
                                 ": duplicate (date,hour,station) = (" + f[0] + "," + f[1] + "," +
                                 f[2] + ")");
    }
    ds.cases.push_back(std::move(c));
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& forecast_file,
                  const std::string& station_file) {
  std::ofstream sf(station_file);
  if (!sf) throw DataError("cannot write station file '" + station_file + "'");
  sf << "station_id,name,longitude,latitude,altitude_m\n";
  char buf[64];
  for (const auto& st : ds.stations) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%g", st.longitude, st.latitude, st.altitude_m);
    sf << st.id << ',' << st.name << ',' << buf << '\n';
  }

  std::ofstream ff(forecast_file);
  if (!ff) throw DataError("cannot write forecast file '" + forecast_file + "'");
  ff << "date,hour,station_id,obs,m1,m2,m3,m4,m5,m6,m7,m8,m9\n";
  for (const auto& c : ds.cases) {
    ff << format_date(c.date) << ',' << c.hour << ',' << c.station_id << ',';
    if (c.observation) {
      std::snprintf(buf, sizeof(buf), "%.6f", *c.observation);
      ff << buf;
    } else {
      ff << "NA";
    }
    for (double m : c.members) {
      std::snprintf(buf, sizeof(buf), ",%.6f", m);
      ff << buf;
    }
    ff << '\n';
  }
}

TrainingWindow select_window(const Dataset& ds, Date target_date, int hour, int n_days,
                             const StationIdSet& filter) {
  if (n_days < 1) throw std::invalid_argument("select_window: n_days must be >= 1");
  TrainingWindow w;
  w.target_date = target_date;
  w.hour = hour;
  w.length_days = n_days;
  const Date lo = target_date - std::chrono::days{n_days};
  const Date hi = target_date - std::chrono::days{1};
  for (const auto& c : ds.cases) {
    if (c.hour != hour || !c.observation) continue;
    if (c.date < lo || c.date > hi) continue;
    if (!filter.contains(c.station_id)) continue;
    w.cases.push_back(c);
  }
  // Canonical order: window contents depend only on (ds, target, hour, n, filter).
  std::sort(w.cases.begin(), w.cases.end(), [](const ForecastCase& a, const ForecastCase& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.station_id < b.station_id;
  });
  return w;
}

}  // namespace enscal
