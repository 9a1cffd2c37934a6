#include "augforge/importance/analyze.hpp"

#include "augforge/error.hpp"
#include "augforge/imaging/rng.hpp"

#include <algorithm>
#include <cmath>

namespace augforge::importance {

namespace {

const std::uint64_t kRepeatTag = imaging::hash_id("fanova-repeat");

} // namespace

std::vector<ParamImportance> ImportanceReport::top(std::size_t n) const {
    std::vector<ParamImportance> out(
        params.begin(), params.begin() + std::min(n, params.size()));
    return out;
}

nlohmann::ordered_json ImportanceReport::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ParamImportance& p : params) {
        arr.push_back(nlohmann::ordered_json{
            {"name", p.name}, {"mean", p.mean}, {"std", p.std_dev}});
    }
    return nlohmann::ordered_json{{"params", std::move(arr)},
                                  {"zero_variance", zero_variance}};
}

ImportanceReport analyze_data(const std::vector<DataPoint>& data,
                              const std::vector<std::string>& names,
                              const ForestSettings& settings) {
    settings.validate();
    const auto d = names.size();
    const auto threshold =
        std::max<std::size_t>(10, 2 * d);
    if (data.size() < threshold) {
        throw AnalysisError("importance analysis needs at least " +
                            std::to_string(threshold) +
                            " complete trials, have " +
                            std::to_string(data.size()));
    }

    // Canonical data order: the report depends on the data *set*, never on
    // the order trials arrived in (bootstrap draws index into this vector).
    std::vector<DataPoint> canonical = data;
    std::sort(canonical.begin(), canonical.end(),
              [](const DataPoint& a, const DataPoint& b) {
                  if (a.x != b.x) return a.x < b.x;
                  return a.y < b.y;
              });

    std::vector<std::vector<double>> per_repeat; // [repeat][feature]
    bool all_zero_variance = true;
    for (int r = 0; r < settings.n_repeats; ++r) {
        const std::uint64_t seed =
            imaging::RngStream(settings.seed, static_cast<std::uint64_t>(r),
                               kRepeatTag, 0)
                .next_u64();
        const Forest forest = fit_forest(canonical, settings, seed);
        ForestImportances imps = all_importances(forest);
        if (!imps.zero_variance) all_zero_variance = false;
        per_repeat.push_back(std::move(imps.per_feature));
    }

    ImportanceReport report;
    report.zero_variance = all_zero_variance;
    for (std::size_t f = 0; f < d; ++f) {
        double mean = 0.0;
        for (const auto& rep : per_repeat) mean += rep[f];
        mean /= static_cast<double>(per_repeat.size());
        double var = 0.0;
        for (const auto& rep : per_repeat) {
            var += (rep[f] - mean) * (rep[f] - mean);
        }
        var /= static_cast<double>(per_repeat.size());
        report.params.push_back({names[f], mean, std::sqrt(var)});
    }
    std::stable_sort(report.params.begin(), report.params.end(),
                     [](const ParamImportance& a, const ParamImportance& b) {
                         return a.mean > b.mean;
                     });
    return report;
}

ImportanceReport analyze_study(const std::vector<search::TrialRecord>& trials,
                               const search::SearchSpace& space,
                               const ForestSettings& settings) {
    std::vector<DataPoint> data;
    for (const search::TrialRecord& r : trials) {
        if (r.state != search::TrialState::complete) continue;
        DataPoint p;
        p.x.reserve(space.size());
        for (const std::string& name : space.names()) {
            const auto it = r.params.find(name);
            if (it == r.params.end()) {
                throw AnalysisError("trial " + std::to_string(r.trial_id) +
                                    " is missing parameter " + name);
            }
            p.x.push_back(it->second ? 1 : 0);
        }
        p.y = r.value.value();
        data.push_back(std::move(p));
    }
    return analyze_data(data, space.names(), settings);
}

} // namespace augforge::importance
