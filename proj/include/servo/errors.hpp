#pragma once

#include <stdexcept>
#include <string>

namespace servo {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sensor drifted beyond its valid sensing distance of the contour.
class ContactLost : public Error {
 public:
  explicit ContactLost(double distance_mm)
      : Error("contact lost: sensor is " + std::to_string(distance_mm) +
              " mm from the contour"),
        distance_mm_(distance_mm) {}
  double distance_mm() const { return distance_mm_; }

 private:
  double distance_mm_;
};

/// A measurement fed to the filter was NaN or infinite.
class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

/// NLL evaluation received a non-positive variance.
class ZeroVariance : public Error {
 public:
  using Error::Error;
};

/// Configuration file is malformed; message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// CSV input is malformed; message carries row/column context.
class CsvError : public Error {
 public:
  using Error::Error;
};

}  // namespace servo
