#pragma once

#include <stdexcept>
#include <string>

namespace mobgen {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (times, files, records).
class ParseError : public Error {
public:
  using Error::Error;
};

/// Invalid or inconsistent configuration; raised at load time, not mid-run.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Prompt rendering failure (unbound placeholder).
class TemplateError : public Error {
public:
  using Error::Error;
};

/// No balanced JSON object could be extracted from a model reply.
class ExtractError : public Error {
public:
  using Error::Error;
};

/// Backend unreachable after all retries.
class BackendError : public Error {
public:
  using Error::Error;
};

/// Provider returned a payload we cannot interpret; carries the raw body.
class ProtocolError : public Error {
public:
  ProtocolError(const std::string& what, std::string raw_body)
      : Error(what), raw_body_(std::move(raw_body)) {}
  const std::string& raw_body() const noexcept { return raw_body_; }

private:
  std::string raw_body_;
};

/// A semantic activity could not be grounded to any POI.
class GroundingError : public Error {
public:
  using Error::Error;
};

/// No transport mode can complete a trip within its time budget.
class FeasibilityError : public Error {
public:
  using Error::Error;
};

/// Non-finite value in a numeric kernel.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Evaluation-metric contract violation (support mismatch, bad range).
class MetricError : public Error {
public:
  using Error::Error;
};

}  // namespace mobgen
