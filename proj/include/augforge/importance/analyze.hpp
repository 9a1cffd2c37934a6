#pragma once

#include "augforge/importance/forest.hpp"
#include "augforge/search/study.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace augforge::importance {

struct ParamImportance {
    std::string name;
    double mean = 0.0;
    double std_dev = 0.0;
};

struct ImportanceReport {
    std::vector<ParamImportance> params; // sorted descending by mean
    bool zero_variance = false;

    /// Truncation to the top-n entries (the usual chart shows 20).
    std::vector<ParamImportance> top(std::size_t n) const;

    nlohmann::ordered_json to_json() const;
};

/// fANOVA over a finished study: fits n_repeats forests with derived seeds
/// and reports mean +- std first-order importance per parameter. Requires at
/// least max(10, 2 * d) complete trials.
ImportanceReport analyze_study(const std::vector<search::TrialRecord>& trials,
                               const search::SearchSpace& space,
                               const ForestSettings& settings);

/// Core entry for already-extracted observations; names give column order.
ImportanceReport analyze_data(const std::vector<DataPoint>& data,
                              const std::vector<std::string>& names,
                              const ForestSettings& settings);

} // namespace augforge::importance
