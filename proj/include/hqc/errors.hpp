#pragma once

#include <stdexcept>
#include <string>

namespace hqc {

/// Invalid run or schedule configuration, detected before any computation.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// The adiabatically tracked dark frame jumped between neighbouring path points.
class GaugeTrackingError : public std::runtime_error {
public:
  explicit GaugeTrackingError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hqc
