#include "censbo/forest_json.hpp"

#include <json.hpp>

#include "censbo/error.hpp"
#include "json_space.hpp"

namespace censbo {

using nlohmann::json;

namespace detail {

json space_to_json_value(const ConfigurationSpace& space) {
  json dims = json::array();
  for (const auto& d : space.dims()) {
    if (const auto* c = std::get_if<Continuous>(&d)) {
      dims.push_back({{"type", "continuous"}, {"low", c->low}, {"high", c->high}});
    } else {
      dims.push_back({{"type", "categorical"}, {"levels", std::get<Categorical>(d).num_levels}});
    }
  }
  return json{{"dims", dims}};
}

ConfigurationSpace space_from_json_value(const json& j) {
  std::vector<Dimension> dims;
  for (const auto& d : j.at("dims")) {
    const auto type = d.at("type").get<std::string>();
    if (type == "continuous") {
      dims.emplace_back(Continuous{d.at("low").get<double>(), d.at("high").get<double>()});
    } else if (type == "categorical") {
      dims.emplace_back(Categorical{d.at("levels").get<std::size_t>()});
    } else {
      throw IoError("unknown dimension type '" + type + "'");
    }
  }
  return ConfigurationSpace(std::move(dims));
}

}  // namespace detail

namespace {

json node_to_json(const std::vector<TreeNode>& nodes, std::size_t at) {
  const TreeNode& n = nodes[at];
  if (n.is_leaf()) return json{{"leaf", n.value}, {"count", n.count}};
  json out{{"dim", n.dim}, {"value", n.value}, {"count", n.count}};
  if (n.left_levels.empty()) {
    out["threshold"] = n.threshold;
  } else {
    json levels = json::array();
    for (std::size_t l = 0; l < n.left_levels.size(); ++l) {
      if (n.left_levels[l]) levels.push_back(l);
    }
    out["left_levels"] = levels;
  }
  out["left"] = node_to_json(nodes, static_cast<std::size_t>(n.left));
  out["right"] = node_to_json(nodes, static_cast<std::size_t>(n.right));
  return out;
}

std::int32_t node_from_json(const json& j, const ConfigurationSpace& space,
                            std::vector<TreeNode>& nodes) {
  const auto id = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  TreeNode node;
  node.count = j.value("count", 0u);
  if (j.contains("leaf")) {
    node.value = j.at("leaf").get<double>();
    nodes[static_cast<std::size_t>(id)] = std::move(node);
    return id;
  }
  node.dim = j.at("dim").get<std::uint32_t>();
  if (node.dim >= space.size()) throw IoError("forest json: split dimension out of range");
  node.value = j.value("value", 0.0);
  if (j.contains("left_levels")) {
    if (!space.is_categorical(node.dim)) throw IoError("forest json: level set on continuous dim");
    node.left_levels.assign(std::get<Categorical>(space[node.dim]).num_levels, 0);
    for (const auto& l : j.at("left_levels")) {
      const auto level = l.get<std::size_t>();
      if (level >= node.left_levels.size()) throw IoError("forest json: level out of range");
      node.left_levels[level] = 1;
    }
  } else {
    node.threshold = j.at("threshold").get<double>();
  }
  node.left = node_from_json(j.at("left"), space, nodes);
  node.right = node_from_json(j.at("right"), space, nodes);
  nodes[static_cast<std::size_t>(id)] = std::move(node);
  return id;
}

}  // namespace

std::string forest_to_json(const ForestDocument& doc, int indent) {
  const Forest& f = doc.forest;
  json trees = json::array();
  for (const auto& t : f.trees()) trees.push_back(node_to_json(t.nodes(), 0));
  const auto& cfg = f.config();
  json out{
      {"format", "censbo-forest"},
      {"version", ForestDocument::kVersion},
      {"response_transform", doc.response_transform},
      {"space", detail::space_to_json_value(f.space())},
      {"config",
       {{"num_trees", cfg.num_trees},
        {"min_leaf_size", cfg.min_leaf_size},
        {"split_candidate_fraction", cfg.split_candidate_fraction},
        {"seed", cfg.seed}}},
      {"trees", trees},
  };
  return out.dump(indent);
}

ForestDocument forest_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string{}) != "censbo-forest") {
      throw IoError("forest json: missing or wrong 'format' tag");
    }
    const int version = j.at("version").get<int>();
    if (version != ForestDocument::kVersion) {
      throw IoError("forest json: unsupported version " + std::to_string(version));
    }
    ConfigurationSpace space = detail::space_from_json_value(j.at("space"));
    ForestConfig cfg;
    const auto& c = j.at("config");
    cfg.min_leaf_size = c.value("min_leaf_size", std::size_t{1});
    cfg.split_candidate_fraction = c.value("split_candidate_fraction", 1.0);
    cfg.seed = c.value("seed", std::uint64_t{0});
    std::vector<RegressionTree> trees;
    for (const auto& t : j.at("trees")) {
      std::vector<TreeNode> nodes;
      node_from_json(t, space, nodes);
      trees.emplace_back(std::move(nodes));
    }
    return ForestDocument{Forest(std::move(space), cfg, std::move(trees)),
                          j.value("response_transform", std::string{"identity"})};
  } catch (const json::exception& e) {
    throw IoError(std::string("forest json: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("forest json: ") + e.what());
  }
}

std::string space_to_json(const ConfigurationSpace& space) {
  return detail::space_to_json_value(space).dump();
}

ConfigurationSpace space_from_json(std::string_view text) {
  try {
    return detail::space_from_json_value(json::parse(text));
  } catch (const json::exception& e) {
    throw IoError(std::string("space json: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("space json: ") + e.what());
  }
}

}  // namespace censbo
