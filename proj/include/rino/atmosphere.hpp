#pragma once

#include <cmath>
#include <stdexcept>

namespace rino {

// 1976 standard atmosphere, troposphere layer.
inline constexpr double kStdTemperature = 288.15;     // K
inline constexpr double kLapseRate = 0.0065;          // K/m
inline constexpr double kStdPressure = 101325.0;      // Pa
inline constexpr double kGasConstant = 8.31446;       // J/(mol K)
inline constexpr double kStdGravity = 9.80665;        // m/s^2
inline constexpr double kMolarMassAir = 0.0289652;    // kg/mol

/// Altitude as a function of pressure.
inline double altitude_from_pressure(double pressure_pa) {
  if (pressure_pa <= 0.0) {
    throw std::invalid_argument("pressure must be positive");
  }
  const double exponent = kGasConstant * kLapseRate / (kStdGravity * kMolarMassAir);
  return kStdTemperature / kLapseRate *
         (1.0 - std::pow(pressure_pa / kStdPressure, exponent));
}

/// Inverse of altitude_from_pressure; valid within the troposphere.
inline double pressure_from_altitude(double altitude_m) {
  const double base = 1.0 - kLapseRate * altitude_m / kStdTemperature;
  if (base <= 0.0) {
    throw std::invalid_argument("altitude outside standard-atmosphere validity");
  }
  const double exponent = kStdGravity * kMolarMassAir / (kGasConstant * kLapseRate);
  return kStdPressure * std::pow(base, exponent);
}

}  // namespace rino
