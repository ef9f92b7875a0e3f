#ifndef ENSCAL_SYNTHETIC_HPP_
#define ENSCAL_SYNTHETIC_HPP_

#include <array>
#include <string>
#include <vector>

#include "enscal/forecast_data.hpp"

namespace enscal {

// Controls for the synthetic ensemble/observation generator. Truth follows a
// diurnal sinusoid plus a linear seasonal trend plus per-station AR(1)
// day-to-day noise; members add per-member bias, an altitude-proportional
// bias and noise whose scale is spread_factor times the observation error.
struct ScenarioSpec {
  int n_stations = 19;                       // ignored when stations given
  std::vector<Station> stations;             // empty = synthesize
  int n_days = 120;
  std::vector<int> hours = {0, 3, 6, 9, 12, 15, 18, 21};
  std::array<double, kEnsembleSize> member_biases{};
  double spread_factor = 1.0;                // ensemble spread / error spread
  double altitude_bias_slope = 0.0;          // kelvin per km, negative = cold at height
  unsigned long long seed = 1;

  Date start_date = parse_date("2017-10-01");
  double base_temp_k = 288.0;
  double diurnal_amplitude_k = 5.0;
  double seasonal_trend_k_per_day = 0.05;
  double error_sd_k = 1.5;
  double ar1_rho = 0.6;
  double ar1_sd_k = 1.0;
  double lapse_rate_k_per_km = -6.5;         // applied to truth and members alike
};

Dataset generate(const ScenarioSpec& spec);

// Named presets: "calibrated", "underdispersed", "andes". All use the
// 19-station Santiago fixture.
ScenarioSpec preset_scenario(const std::string& name, unsigned long long seed = 1);

// The bundled 19-station metadata fixture.
std::vector<Station> santiago_stations();

}  // namespace enscal

#endif  // ENSCAL_SYNTHETIC_HPP_
