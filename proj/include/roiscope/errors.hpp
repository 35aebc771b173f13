#pragma once

#include <stdexcept>
#include <string>

namespace roiscope {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Viewport whose center latitude makes cos(gamma) vanish.
class DegenerateViewport : public Error {
public:
  using Error::Error;
};

// Event arrived with a timestamp earlier than the last accepted one.
class OrderingError : public Error {
public:
  using Error::Error;
};

// Dataset file could not be ingested (parse failure, bad geometry, out of bounds).
class IngestError : public Error {
public:
  using Error::Error;
};

class NotFound : public Error {
public:
  using Error::Error;
};

// Invalid configuration values or malformed config documents.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace roiscope
