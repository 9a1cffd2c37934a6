#pragma once

#include "augforge/augment/chain.hpp"
#include "augforge/search/runner.hpp"
#include "augforge/search/space.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace augforge::harness {

/// Deterministic quadratic pseudo-Boolean surrogate squashed to (0, 1):
///
///   value = sigmoid( sum_i w_i x_i + sum_{(i,j) in P} v_ij x_i x_j + eps )
///
/// with x the active indicators over the space, w_i ~ U(-1, 1), |P| =
/// max(1, d/2) distinct pairs with v_ij ~ U(-1.5, 1.5), all drawn from
/// weights_seed, and eps ~ N(0, noise) from the (study_seed, trial_id)
/// stream. With noise 0 the landscape is exactly enumerable.
class SurrogateModel {
public:
    SurrogateModel(const search::SearchSpace& space, std::uint64_t weights_seed);

    /// Pre-sigmoid score sum_i w_i x_i + sum_P v_ij x_i x_j.
    double raw_score(const std::vector<std::uint8_t>& active) const;

    /// Noiseless value for an activation vector in space order.
    double evaluate(const std::vector<std::uint8_t>& active) const;

    double evaluate(const search::Assignment& assignment) const;

    std::size_t dimension() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::vector<double> weights_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::vector<double> pair_weights_;
};

double surrogate_objective(const augment::ChainConfig& cfg,
                           const SurrogateModel& model, double noise,
                           std::uint64_t study_seed, std::int64_t trial_id);

struct ExternalObjectiveResult {
    double objective = 0.0;
    nlohmann::json metrics;
};

/// Spawns the command, writes one JSON request
/// {"trial_id": ..., "seed": ..., "chain": <chain JSON>} to its stdin and
/// reads one JSON response {"objective": ..., "metrics": {...}?} from its
/// stdout. Nonzero exit, timeout, or malformed output throw an Error whose
/// message becomes the trial's failure reason ("timeout" for timeouts).
ExternalObjectiveResult run_external_objective(const augment::ChainConfig& cfg,
                                               const std::string& command,
                                               double timeout_seconds,
                                               std::uint64_t seed,
                                               std::int64_t trial_id);

/// Exactly one variant is configured.
class ObjectiveRunner {
public:
    static ObjectiveRunner external(std::string command, double timeout_seconds);
    static ObjectiveRunner surrogate(std::uint64_t weights_seed, double noise);
    /// Augments the dataset per trial, then runs
    ///   command <augmented_dir> <detections_out.json>
    /// and scores the detections against the augmented ground truth (mAP).
    static ObjectiveRunner dataset_eval(std::filesystem::path dataset_root,
                                        std::string command,
                                        double timeout_seconds);

    /// Binds the runner to a study seed and space for use by run_study.
    search::ObjectiveFn bind(const search::SearchSpace& space,
                             std::uint64_t study_seed) const;

private:
    ObjectiveRunner() = default;

    enum class Variant { external, surrogate, dataset_eval };
    Variant variant_ = Variant::surrogate;
    std::string command_;
    double timeout_seconds_ = 600.0;
    std::uint64_t weights_seed_ = 0;
    double noise_ = 0.0;
    std::filesystem::path dataset_root_;
};

} // namespace augforge::harness
