#include "enscal/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace enscal {

std::vector<Station> santiago_stations() {
  return {
      {1, "Talagante", -70.9528, -33.6733, 390},
      {2, "Puente Alto", -70.5944, -33.5908, 670},
      {3, "El Bosque", -70.6660, -33.5465, 580},
      {4, "La Florida", -70.5881, -33.5161, 601},
      {5, "Parque O'Higgins", -70.6606, -33.4637, 549},
      {6, "Pudahuel", -70.7501, -33.4373, 494},
      {7, "Cerro Navia", -70.7319, -33.4326, 500},
      {8, "Independencia", -70.6511, -33.4217, 560},
      {9, "Las Condes", -70.5232, -33.3763, 798},
      {10, "El Paico", -71.0079, -33.7059, 275},
      {11, "San Jose Guayacan", -70.3505, -33.6148, 928},
      {12, "Chorombo Hacienda", -71.2291, -33.5289, 145},
      {13, "Aguas Andinas", -70.5483, -33.5445, 665},
      {14, "Lo Prado", -70.9485, -33.4575, 1068},
      {15, "Quinta Normal", -70.6827, -33.4445, 534},
      {16, "San Pablo", -70.7466, -33.4417, 490},
      {17, "Curacavi", -71.1676, -33.4106, 208},
      {18, "Lo Pinto", -70.7321, -33.2675, 512},
      {19, "El Colorado", -70.2935, -33.3495, 2750},
  };
}

Dataset generate(const ScenarioSpec& spec) {
  if (spec.spread_factor <= 0.0) throw std::invalid_argument("generate: spread_factor must be > 0");
  if (spec.n_days < 1) throw std::invalid_argument("generate: n_days must be >= 1");

  Dataset ds;
  if (!spec.stations.empty()) {
    ds.stations = spec.stations;
  } else {
    for (int i = 1; i <= spec.n_stations; ++i) {
      Station s;
      s.id = i;
      s.name = "S" + std::to_string(i);
      s.longitude = -71.0 + 0.05 * i;
      s.latitude = -33.5 + 0.02 * i;
      s.altitude_m = 100.0 + 2650.0 * double(i - 1) / std::max(1, spec.n_stations - 1);
      ds.stations.push_back(std::move(s));
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double pi = 3.14159265358979323846;
  const double spread_sd = spec.spread_factor * spec.error_sd_k;

  for (const auto& st : ds.stations) {
    const double alt_km = st.altitude_m / 1000.0;
    double ar1 = gauss(rng) * spec.ar1_sd_k / std::sqrt(1.0 - spec.ar1_rho * spec.ar1_rho);
    for (int d = 0; d < spec.n_days; ++d) {
      ar1 = spec.ar1_rho * ar1 + spec.ar1_sd_k * gauss(rng);
      for (int hour : spec.hours) {
        const double signal = spec.base_temp_k + spec.seasonal_trend_k_per_day * d +
                              spec.diurnal_amplitude_k * std::sin(2.0 * pi * (hour - 9) / 24.0) +
                              spec.lapse_rate_k_per_km * alt_km + ar1;
        ForecastCase c;
        c.date = spec.start_date + std::chrono::days{d};
        c.hour = hour;
        c.station_id = st.id;
        c.observation = signal + spec.error_sd_k * gauss(rng);
        for (int k = 0; k < kEnsembleSize; ++k) {
          c.members[k] = signal + spec.member_biases[k] +
                         spec.altitude_bias_slope * alt_km + spread_sd * gauss(rng);
        }
        ds.cases.push_back(std::move(c));
      }
    }
  }
  return ds;
}

ScenarioSpec preset_scenario(const std::string& name, unsigned long long seed) {
  ScenarioSpec s;
  s.stations = santiago_stations();
  s.seed = seed;
  if (name == "calibrated") {
    return s;
  }
  if (name == "underdispersed") {
    s.spread_factor = 0.5;
    return s;
  }
  if (name == "andes") {
    s.spread_factor = 0.5;
    s.altitude_bias_slope = -2.0;
    s.member_biases = {0.3, -0.2, 0.1, 0.0, -0.1, 0.2, -0.6, -0.5, 0.1};
    return s;
  }
  throw std::invalid_argument("unknown scenario preset '" + name + "'");
}

}  // namespace enscal
