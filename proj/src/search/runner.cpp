#include "augforge/search/runner.hpp"

#include "augforge/error.hpp"

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

namespace augforge::search {

void run_trials(Study& study, const ObjectiveFn& objective) {
    const SearchSettings& settings = study.settings();
    const auto n_trials = static_cast<std::int64_t>(settings.n_trials);

    std::atomic<std::int64_t> issued{study.n_trials_issued()};
    std::atomic<bool> abort{false};
    std::mutex error_mutex;
    std::string abort_diagnostic;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (!abort.load()) {
            const std::int64_t claim = issued.fetch_add(1);
            if (claim >= n_trials) return;
            try {
                const Assignment assignment = study.suggest();
                const std::int64_t trial_id = study.begin_trial(assignment);
                const augment::ChainConfig cfg =
                    study.space().to_chain(assignment);

                ObjectiveOutcome outcome;
                try {
                    outcome = objective(cfg, trial_id);
                } catch (const std::exception& e) {
                    outcome = ObjectiveOutcome::failure(e.what());
                }
                if (outcome.ok) {
                    study.complete_trial(trial_id, outcome.value,
                                         std::move(outcome.metrics));
                } else {
                    study.fail_trial(trial_id, outcome.fail_reason);
                }

                const std::int64_t failed = study.n_failed();
                const std::int64_t finished = failed + study.n_complete();
                if (finished >= std::min<std::int64_t>(10, n_trials) &&
                    2 * failed > finished) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    abort_diagnostic = "objective failed in " +
                                       std::to_string(failed) + " of " +
                                       std::to_string(finished) +
                                       " finished trials";
                    abort.store(true);
                    return;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                abort.store(true);
                return;
            }
        }
    };

    if (settings.parallelism <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(settings.parallelism));
        for (int i = 0; i < settings.parallelism; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) t.join();
    }

    if (first_error) std::rethrow_exception(first_error);
    if (!abort_diagnostic.empty()) {
        throw StateError("study aborted: " + abort_diagnostic);
    }
}

std::unique_ptr<Study> run_study(const SearchSettings& settings,
                                 const SearchSpace& space,
                                 const ObjectiveFn& objective,
                                 const std::filesystem::path& db_path) {
    auto study = std::make_unique<Study>(settings, space, db_path);
    run_trials(*study, objective);
    return study;
}

} // namespace augforge::search
