#pragma once

#include "augforge/augment/catalog.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace augforge::augment {
class ChainConfig;
}

namespace augforge::search {

/// Binary assignment over the search space: name -> active?
using Assignment = std::map<std::string, bool>;

/// One binary categorical parameter per augmentation kind. A space may
/// cover any subset of the catalog; names must be unique catalog kinds.
class SearchSpace {
public:
    static SearchSpace all_kinds();
    static SearchSpace from_names(std::vector<std::string> names);
    /// JSON file {"params": ["invert", "snow", ...]}.
    static SearchSpace load(const std::filesystem::path& path);

    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    bool contains(const std::string& name) const;

    /// Assignment -> chain: named kinds take the given activation with
    /// default params and probability 0.30; kinds outside the space stay
    /// inactive.
    augment::ChainConfig to_chain(const Assignment& assignment) const;

    void validate_assignment(const Assignment& assignment) const;

private:
    std::vector<std::string> names_;
};

} // namespace augforge::search
