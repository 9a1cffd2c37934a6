#pragma once

#include "augforge/augment/chain.hpp"
#include "augforge/search/study.hpp"

#include <functional>
#include <memory>

namespace augforge::search {

struct ObjectiveOutcome {
    bool ok = false;
    double value = 0.0;
    std::string fail_reason;
    nlohmann::json metrics;

    static ObjectiveOutcome success(double value,
                                    nlohmann::json metrics = nlohmann::json()) {
        return {true, value, {}, std::move(metrics)};
    }
    static ObjectiveOutcome failure(std::string reason) {
        return {false, 0.0, std::move(reason), {}};
    }
};

/// Evaluates one chain configuration; a thrown exception counts as a failed
/// trial with the exception message as reason.
using ObjectiveFn = std::function<ObjectiveOutcome(
    const augment::ChainConfig& cfg, std::int64_t trial_id)>;

/// Executes trials until n_trials have been issued, fanning objective calls
/// out to settings.parallelism workers. Suggestion and recording serialize
/// behind the study lock. Aborts with a StateError diagnostic when more than
/// half of the finished trials failed (once min(10, n_trials) finished).
void run_trials(Study& study, const ObjectiveFn& objective);

/// Opens (or resumes) a study at db_path and runs it to completion.
std::unique_ptr<Study> run_study(const SearchSettings& settings,
                                 const SearchSpace& space,
                                 const ObjectiveFn& objective,
                                 const std::filesystem::path& db_path);

} // namespace augforge::search
