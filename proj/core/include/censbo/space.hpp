#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "censbo/random.hpp"

namespace censbo {

/// A point in a ConfigurationSpace. Categorical coordinates hold the level
/// index as an integral double.
using Configuration = std::vector<double>;

struct Continuous {
  double low = 0.0;
  double high = 1.0;
};

struct Categorical {
  std::size_t num_levels = 2;
};

using Dimension = std::variant<Continuous, Categorical>;

class ConfigurationSpace {
 public:
  ConfigurationSpace() = default;
  /// Throws DomainError if empty, low >= high, or num_levels < 2.
  explicit ConfigurationSpace(std::vector<Dimension> dims);

  static ConfigurationSpace unit_cube(std::size_t d);

  std::size_t size() const { return dims_.size(); }
  const Dimension& operator[](std::size_t i) const { return dims_[i]; }
  const std::vector<Dimension>& dims() const { return dims_; }

  bool is_categorical(std::size_t i) const {
    return std::holds_alternative<Categorical>(dims_[i]);
  }
  bool is_all_continuous() const;

  bool contains(const Configuration& theta) const;
  /// Throws DomainError unless contains(theta).
  void require_contains(const Configuration& theta) const;

  Configuration sample_uniform(Rng& rng) const;

  /// Clamp continuous coordinates into bounds; categorical coordinates are
  /// rounded to the nearest level.
  Configuration clamp(Configuration theta) const;

  friend bool operator==(const ConfigurationSpace&, const ConfigurationSpace&);

 private:
  std::vector<Dimension> dims_;
};

bool operator==(const Continuous& a, const Continuous& b);
bool operator==(const Categorical& a, const Categorical& b);

/// One evaluated input. When censored, only f(theta) >= y is known.
struct Observation {
  Configuration theta;
  double y = 0.0;
  bool censored = false;
  double cost = 0.0;
};

}  // namespace censbo
