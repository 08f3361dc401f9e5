#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "iaqsim/environment.hpp"
#include "iaqsim/rng.hpp"
#include "iaqsim/time.hpp"

namespace iaqsim {

/// MOX gas sensor response: normalized resistance ratio follows a power law
/// in concentration with negative exponent (conductivity rises with pollution).
struct GasSensorModel {
  double r0_baseline_ppm = 400.0;  // concentration at which the ratio is 1
  double exponent = -0.5;          // must be < 0
  Tick warmup_ms = 30 * kMsPerSecond;
  double measurement_sigma_ppm = 0.0;
};

struct WarmupViolation : std::logic_error {
  using std::logic_error::logic_error;
};

inline double gas_ratio(const GasSensorModel& model, double gas_ppm) {
  if (gas_ppm <= 0.0)
    throw std::domain_error("gas_ratio: concentration must be > 0");
  return std::pow(gas_ppm / model.r0_baseline_ppm, model.exponent);
}

/// Piecewise-linear concentration -> AQI table. Strictly increasing in both
/// coordinates; clamped below the first and above the last breakpoint.
struct AqiMapping {
  std::vector<std::pair<double, double>> breakpoints;  // (ppm, index)

  bool valid() const {
    if (breakpoints.empty()) return false;
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
      if (breakpoints[i].first <= breakpoints[i - 1].first ||
          breakpoints[i].second <= breakpoints[i - 1].second)
        return false;
    return true;
  }
};

inline double aqi_from_gas(const AqiMapping& mapping, double gas_ppm) {
  const auto& bp = mapping.breakpoints;
  if (bp.empty()) throw std::invalid_argument("aqi_from_gas: empty mapping");
  if (gas_ppm <= bp.front().first) return bp.front().second;
  if (gas_ppm >= bp.back().first) return bp.back().second;
  for (std::size_t i = 1; i < bp.size(); ++i) {
    if (gas_ppm <= bp[i].first) {
      double f = (gas_ppm - bp[i - 1].first) / (bp[i].first - bp[i - 1].first);
      return bp[i - 1].second + f * (bp[i].second - bp[i - 1].second);
    }
  }
  return bp.back().second;  // unreachable
}

/// The full sensing stack a node carries.
struct SensorModels {
  GasSensorModel gas;
  double temp_sigma_c = 0.0;
  double humidity_sigma_pct = 0.0;
  AqiMapping aqi;
};

/// What the node reads at one sampling instant.
struct SensorSample {
  Tick t = 0;
  double temp_c = 0.0;
  double humidity_pct = 0.0;
  double aqi = 0.0;
};

/// Ground truth -> measured values. Requires the sensors to have been powered
/// for at least the gas sensor's warm-up; a shorter window is a scheduling bug
/// in the caller, reported as WarmupViolation. Draw order is fixed: temp,
/// humidity, gas.
inline SensorSample read_sensors(Tick powered_for_ms, const EnvReading& env,
                                 const SensorModels& models, Pcg32& rng) {
  if (powered_for_ms < models.gas.warmup_ms)
    throw WarmupViolation("read_sensors: sensors powered for " +
                          std::to_string(powered_for_ms) + " ms, warm-up is " +
                          std::to_string(models.gas.warmup_ms) + " ms");
  SensorSample s;
  s.t = env.t;
  s.temp_c = env.temp_c;
  if (models.temp_sigma_c > 0) s.temp_c += rng.normal(0.0, models.temp_sigma_c);
  s.humidity_pct = env.humidity_pct;
  if (models.humidity_sigma_pct > 0)
    s.humidity_pct += rng.normal(0.0, models.humidity_sigma_pct);
  s.humidity_pct = std::clamp(s.humidity_pct, 0.0, 100.0);
  double gas = env.gas_ppm;
  if (models.gas.measurement_sigma_ppm > 0)
    gas += rng.normal(0.0, models.gas.measurement_sigma_ppm);
  s.aqi = aqi_from_gas(models.aqi, std::max(gas, 0.0));
  return s;
}

}  // namespace iaqsim
