#pragma once

#include <json.hpp>

#include "censbo/space.hpp"

namespace censbo::detail {

nlohmann::json space_to_json_value(const ConfigurationSpace& space);
ConfigurationSpace space_from_json_value(const nlohmann::json& j);

}  // namespace censbo::detail
