#pragma once

#include <stdexcept>
#include <string>

namespace langcheck {

// Root of every error thrown by the library. Callers that only need to
// distinguish "usage/config" from "runtime" failures can switch on the
// subclass.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller handed us something that violates a documented precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// Missing or invalid configuration (credentials, provider selection).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Authentication rejected by a remote provider. Never retried.
class AuthError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A completion or entailment provider failed.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// A provider failure that may succeed on retry (timeouts, 429, 5xx).
class TransientProviderError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// Source corpus could not be turned into records.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Inconsistent data between files (e.g. result ids missing from gold).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace langcheck
