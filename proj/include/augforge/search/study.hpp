#pragma once

#include "augforge/search/space.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace augforge::search {

struct SearchSettings {
    int n_trials = 400;
    int n_startup_trials = 64;
    int n_candidates = 24;
    double prior_weight = 1.0;
    // Good-set size rule: gamma = min(ceil(gamma_factor * n), gamma_cap).
    double gamma_factor = 0.1;
    int gamma_cap = 25;
    std::uint64_t study_seed = 0;
    int parallelism = 1;

    void validate() const;
};

enum class TrialState { running, complete, failed };

const std::string& trial_state_name(TrialState state);
TrialState trial_state_from_name(const std::string& name);

struct TrialRecord {
    std::int64_t trial_id = -1;
    Assignment params;
    TrialState state = TrialState::running;
    std::optional<double> value;
    std::string started_at;
    std::optional<std::string> finished_at;
    std::string fail_reason; // failed trials only
    nlohmann::json metrics;  // verbatim objective metrics, when reported
};

/// Good-set size for n completed trials.
int gamma_size(const SearchSettings& settings, std::int64_t n_completed);

/// One TPE proposal. Uses only completed trials; before n_startup_trials
/// each parameter draws uniformly. Deterministic given (settings.study_seed,
/// trial_id, completed set).
Assignment tpe_suggest(const std::vector<TrialRecord>& completed,
                       const SearchSpace& space, const SearchSettings& settings,
                       std::int64_t trial_id);

/// Weighted categorical over {inactive, active} with an additive prior.
struct CategoricalEstimator {
    double p_inactive = 0.5;
    double p_active = 0.5;

    static CategoricalEstimator fit(std::int64_t count_inactive,
                                    std::int64_t count_active,
                                    double prior_weight);
    double prob(bool active) const { return active ? p_active : p_inactive; }
};

/// Append-only JSON-lines trial database. One event per line; later events
/// for a trial supersede earlier ones on replay. A partial trailing line
/// (crash during append) is discarded on open.
class Study {
public:
    Study(SearchSettings settings, SearchSpace space,
          std::filesystem::path db_path);

    const SearchSettings& settings() const { return settings_; }
    const SearchSpace& space() const { return space_; }
    const std::filesystem::path& db_path() const { return db_path_; }

    /// Next assignment to evaluate; thread safe.
    Assignment suggest();

    /// Appends a running record and returns the new dense trial id.
    std::int64_t begin_trial(const Assignment& params);

    void complete_trial(std::int64_t trial_id, double value,
                        nlohmann::json metrics = nlohmann::json());
    void fail_trial(std::int64_t trial_id, const std::string& reason);

    std::vector<TrialRecord> snapshot() const;
    std::int64_t n_trials_issued() const;
    std::int64_t n_complete() const;
    std::int64_t n_failed() const;
    std::optional<TrialRecord> best_trial() const;

private:
    void append_line(const nlohmann::ordered_json& event);
    std::vector<TrialRecord> completed_unlocked() const;

    SearchSettings settings_;
    SearchSpace space_;
    std::filesystem::path db_path_;
    std::ofstream out_;
    mutable std::mutex mutex_;
    std::vector<TrialRecord> records_; // index == trial_id
};

/// Replays a study database into final per-trial records. A corrupt line in
/// the middle raises a StateError naming the line; a partial trailing line
/// is discarded.
std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path);

/// The database with volatile fields (timestamps) stripped, for byte-level
/// determinism comparisons.
std::string normalized_db(const std::filesystem::path& path);

std::string iso8601_now();

} // namespace augforge::search
