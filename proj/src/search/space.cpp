#include "augforge/search/space.hpp"

#include "augforge/augment/chain.hpp"
#include "augforge/error.hpp"

#include <fstream>
#include <set>

namespace augforge::search {

SearchSpace SearchSpace::all_kinds() {
    std::vector<std::string> names;
    names.reserve(augment::kCatalogSize);
    for (int i = 0; i < augment::kCatalogSize; ++i) {
        names.push_back(
            augment::kind_name(static_cast<augment::AugmentationKind>(i)));
    }
    return from_names(std::move(names));
}

SearchSpace SearchSpace::from_names(std::vector<std::string> names) {
    if (names.empty()) {
        throw ConfigError("search space must contain at least one parameter");
    }
    std::set<std::string> seen;
    for (const std::string& name : names) {
        augment::kind_from_name(name); // throws on unknown kinds
        if (!seen.insert(name).second) {
            throw ConfigError("duplicate search-space parameter: " + name);
        }
    }
    SearchSpace out;
    out.names_ = std::move(names);
    return out;
}

SearchSpace SearchSpace::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open search space file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid search space JSON in " + path.string() +
                          ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("params") || !doc["params"].is_array()) {
        throw ConfigError("search space must be {\"params\": [...]}");
    }
    std::vector<std::string> names;
    for (const auto& j : doc["params"]) names.push_back(j.get<std::string>());
    return from_names(std::move(names));
}

bool SearchSpace::contains(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

augment::ChainConfig SearchSpace::to_chain(const Assignment& assignment) const {
    validate_assignment(assignment);
    augment::ChainConfig cfg = augment::ChainConfig::defaults();
    for (const std::string& name : names_) {
        cfg.spec(augment::kind_from_name(name)).active = assignment.at(name);
    }
    return cfg;
}

void SearchSpace::validate_assignment(const Assignment& assignment) const {
    if (assignment.size() != names_.size()) {
        throw ConfigError("assignment does not cover the search space");
    }
    for (const std::string& name : names_) {
        if (!assignment.count(name)) {
            throw ConfigError("assignment missing parameter: " + name);
        }
    }
}

} // namespace augforge::search
