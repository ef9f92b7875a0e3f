#ifndef ENSCAL_FORECAST_DATA_HPP_
#define ENSCAL_FORECAST_DATA_HPP_

#include <array>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace enscal {

inline constexpr int kEnsembleSize = 9;
inline constexpr std::array<int, 8> kForecastHours = {0, 3, 6, 9, 12, 15, 18, 21};

using Date = std::chrono::sys_days;

Date parse_date(const std::string& iso);        // "YYYY-MM-DD"
std::string format_date(Date d);

struct Station {
  int id = 0;
  std::string name;
  double longitude = 0.0;   // decimal degrees, [-180, 180]
  double latitude = 0.0;    // decimal degrees, [-90, 90]
  double altitude_m = 0.0;  // >= 0
};

// One (date, hour, station) record: 9 member forecasts plus the verifying
// observation, which may be missing. Temperatures are kelvin throughout.
struct ForecastCase {
  Date date{};
  int hour = 0;  // UTC, one of kForecastHours
  int station_id = 0;
  std::array<double, kEnsembleSize> members{};
  std::optional<double> observation;
};

double ensemble_mean(const ForecastCase& c);
// Unbiased sample variance of the 9 members (divisor 8).
double ensemble_variance(const ForecastCase& c);

struct Dataset {
  std::vector<Station> stations;
  std::vector<ForecastCase> cases;

  const Station* find_station(int id) const;
};

// The training sample for one (target_date, hour) fit: all cases with a
// present observation whose date falls in [target_date - n, target_date - 1].
struct TrainingWindow {
  Date target_date{};
  int hour = 0;
  int length_days = 0;
  std::vector<ForecastCase> cases;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class FormatError : public DataError {
 public:
  using DataError::DataError;
};
class DuplicateRecordError : public DataError {
 public:
  using DataError::DataError;
};
class ReferenceError : public DataError {
 public:
  using DataError::DataError;
};

// Forecast CSV header: date,hour,station_id,obs,m1,...,m9 ("NA" = missing obs).
// Station CSV header: station_id,name,longitude,latitude,altitude_m.
Dataset load_dataset(const std::string& forecast_file, const std::string& station_file);
void save_dataset(const Dataset& ds, const std::string& forecast_file,
                  const std::string& station_file);

struct StationIdSet {
  std::vector<int> ids;  // empty = all stations
  bool contains(int id) const;
};

TrainingWindow select_window(const Dataset& ds, Date target_date, int hour, int n_days,
                             const StationIdSet& filter = {});

}  // namespace enscal

#endif  // ENSCAL_FORECAST_DATA_HPP_
