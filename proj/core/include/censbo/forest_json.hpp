#pragma once

#include <string>
#include <string_view>

#include "censbo/forest.hpp"

namespace censbo {

/// Versioned JSON form of a fitted forest: space, config and nested tree
/// nodes. The bootstrap ledger is not stored; a loaded forest predicts but
/// cannot be refit.
struct ForestDocument {
  static constexpr int kVersion = 1;

  Forest forest;
  /// Space the responses were modeled in: "identity" or "log10".
  std::string response_transform = "identity";
};

std::string forest_to_json(const ForestDocument& doc, int indent = -1);

/// Throws IoError on malformed documents or unsupported versions.
ForestDocument forest_from_json(std::string_view text);

std::string space_to_json(const ConfigurationSpace& space);
ConfigurationSpace space_from_json(std::string_view text);

}  // namespace censbo
