#pragma once

#include <stdexcept>
#include <string>

namespace censbo {

/// Precondition violated by the caller (bad argument, empty input, size mismatch).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A model could not be fitted from the supplied data.
class UnfitError : public std::runtime_error {
 public:
  explicit UnfitError(const std::string& what) : std::runtime_error(what) {}
};

/// Invariant broken inside an algorithm. Indicates a bug, never bad input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

/// File or stream could not be read, written or parsed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace censbo
