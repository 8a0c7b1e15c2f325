#pragma once

#include <stdexcept>
#include <string>

namespace windtwin {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV header does not match the channel schema.
struct SchemaError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (bad timestamp, duplicate rows, ...).
struct DataError : Error {
  using Error::Error;
};

// Invalid or incomplete configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Not enough usable samples to train or split.
struct InsufficientDataError : Error {
  using Error::Error;
};

// A channel whose value range collapses (max == min) cannot be normalized.
struct DegenerateChannelError : Error {
  using Error::Error;
};

// Non-finite gradients or otherwise broken training state.
struct TrainingError : Error {
  using Error::Error;
};

// Threshold calibration could not produce a usable threshold.
struct CalibrationError : Error {
  using Error::Error;
};

// Out-of-order or corrupt frames in a streaming consumer.
struct StreamError : Error {
  using Error::Error;
};

// Model file cannot be loaded: bad version, checksum, or structure.
struct ModelFormatError : Error {
  using Error::Error;
};

// Coincidence probability is undefined (no eligible timesteps).
struct ProbabilityError : Error {
  using Error::Error;
};

// Invalid synthetic scenario specification.
struct ScenarioError : Error {
  using Error::Error;
};

// Every configured alert sink failed.
struct DeliveryError : Error {
  using Error::Error;
};

// Wrong CLI usage or missing input artifact; maps to exit code 2.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace windtwin
