// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace atm {

/// Coarse classification of failures; the CLI maps each kind to an exit code.
enum class ErrorKind {
  io,         // missing or unwritable files
  format,     // malformed input or model files
  data,       // data-dependent failures (empty vocabulary, empty corpus, ...)
  config,     // invalid hyperparameters or thresholds
  not_found,  // lookups by name or label that do not resolve
  usage,      // invalid argument combinations
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::data: return "data";
    case ErrorKind::config: return "config";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Non-fatal diagnostics (clamped settings, degenerate inputs). Defaults to
// stderr; tests and the CLI may install their own sink.
using WarningHandler = std::function<void(std::string_view)>;

inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}

inline void warn(std::string_view msg) {
  if (warning_handler()) warning_handler()(msg);
}

}  // namespace atm
