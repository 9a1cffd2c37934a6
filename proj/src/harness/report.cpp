#include "augforge/harness/report.hpp"

#include "augforge/search/study.hpp"

#include <algorithm>
#include <map>

namespace augforge::harness {

nlohmann::ordered_json report_study(const std::filesystem::path& db_path) {
    const std::vector<search::TrialRecord> trials =
        search::read_trial_log(db_path);

    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    struct CountAgg {
        double sum = 0.0;
        double max = 0.0;
        std::int64_t n = 0;
    };
    std::map<int, CountAgg> per_count;
    const search::TrialRecord* best = nullptr;
    std::int64_t n_complete = 0;
    std::int64_t n_failed = 0;

    for (const search::TrialRecord& r : trials) {
        if (r.state == search::TrialState::failed) ++n_failed;
        if (r.state != search::TrialState::complete) continue;
        ++n_complete;
        const int active = static_cast<int>(
            std::count_if(r.params.begin(), r.params.end(),
                          [](const auto& kv) { return kv.second; }));
        const double value = r.value.value();
        points.push_back(nlohmann::ordered_json{{"trial_id", r.trial_id},
                                                {"active_count", active},
                                                {"value", value}});
        CountAgg& agg = per_count[active];
        agg.sum += value;
        agg.max = agg.n == 0 ? value : std::max(agg.max, value);
        ++agg.n;
        if (!best || value > best->value.value()) best = &r;
    }

    nlohmann::ordered_json report{{"n_trials", trials.size()},
                                  {"n_complete", n_complete},
                                  {"n_failed", n_failed}};
    if (best) {
        nlohmann::ordered_json params;
        for (const auto& [name, active] : best->params) {
            params[name] = active ? "active" : "inactive";
        }
        report["best"] = nlohmann::ordered_json{
            {"trial_id", best->trial_id},
            {"value", best->value.value()},
            {"params", std::move(params)}};
    } else {
        report["best"] = nullptr;
    }
    report["points"] = std::move(points);

    nlohmann::ordered_json by_count = nlohmann::ordered_json::array();
    for (const auto& [count, agg] : per_count) {
        by_count.push_back(nlohmann::ordered_json{
            {"active_count", count},
            {"n", agg.n},
            {"mean", agg.sum / static_cast<double>(agg.n)},
            {"max", agg.max}});
    }
    report["per_count"] = std::move(by_count);
    return report;
}

} // namespace augforge::harness
