#include "censbo/space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "censbo/error.hpp"

namespace censbo {

bool operator==(const Continuous& a, const Continuous& b) {
  return a.low == b.low && a.high == b.high;
}
bool operator==(const Categorical& a, const Categorical& b) {
  return a.num_levels == b.num_levels;
}
bool operator==(const ConfigurationSpace& a, const ConfigurationSpace& b) {
  return a.dims_ == b.dims_;
}

ConfigurationSpace::ConfigurationSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("ConfigurationSpace: at least one dimension required");
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (const auto* c = std::get_if<Continuous>(&dims_[i])) {
      if (!std::isfinite(c->low) || !std::isfinite(c->high) || !(c->low < c->high)) {
        throw DomainError("ConfigurationSpace: dimension " + std::to_string(i) +
                          " needs finite low < high");
      }
    } else if (std::get<Categorical>(dims_[i]).num_levels < 2) {
      throw DomainError("ConfigurationSpace: dimension " + std::to_string(i) +
                        " needs at least 2 levels");
    }
  }
}

ConfigurationSpace ConfigurationSpace::unit_cube(std::size_t d) {
  return ConfigurationSpace(std::vector<Dimension>(d, Continuous{0.0, 1.0}));
}

bool ConfigurationSpace::is_all_continuous() const {
  return std::all_of(dims_.begin(), dims_.end(),
                     [](const Dimension& d) { return std::holds_alternative<Continuous>(d); });
}

bool ConfigurationSpace::contains(const Configuration& theta) const {
  if (theta.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const double v = theta[i];
    if (!std::isfinite(v)) return false;
    if (const auto* c = std::get_if<Continuous>(&dims_[i])) {
      if (v < c->low || v > c->high) return false;
    } else {
      const auto levels = std::get<Categorical>(dims_[i]).num_levels;
      if (v < 0.0 || v != std::floor(v) || v >= static_cast<double>(levels)) return false;
    }
  }
  return true;
}

void ConfigurationSpace::require_contains(const Configuration& theta) const {
  if (!contains(theta)) {
    throw DomainError("configuration outside its space (dimension " +
                      std::to_string(theta.size()) + " vs " + std::to_string(dims_.size()) + ")");
  }
}

Configuration ConfigurationSpace::sample_uniform(Rng& rng) const {
  Configuration theta(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (const auto* c = std::get_if<Continuous>(&dims_[i])) {
      theta[i] = c->low + uniform01(rng) * (c->high - c->low);
    } else {
      const auto levels = std::get<Categorical>(dims_[i]).num_levels;
      theta[i] = static_cast<double>(rng() % levels);
    }
  }
  return theta;
}

Configuration ConfigurationSpace::clamp(Configuration theta) const {
  for (std::size_t i = 0; i < dims_.size() && i < theta.size(); ++i) {
    if (const auto* c = std::get_if<Continuous>(&dims_[i])) {
      theta[i] = std::clamp(theta[i], c->low, c->high);
    } else {
      const auto top = static_cast<double>(std::get<Categorical>(dims_[i]).num_levels - 1);
      theta[i] = std::clamp(std::round(theta[i]), 0.0, top);
    }
  }
  return theta;
}

}  // namespace censbo
