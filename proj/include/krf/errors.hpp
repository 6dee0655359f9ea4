#pragma once

#include <stdexcept>
#include <string>

namespace krf {

/// Malformed or inconsistent scenario input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation called outside its mathematical domain (non-Kähler class, t >= T, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not provided by this backend.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The evaluated metric left the positive cone at some node.
class PositivityBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A report was asked for on a trajectory that cannot support it.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace krf
