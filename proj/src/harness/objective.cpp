#include "augforge/harness/objective.hpp"

#include "augforge/error.hpp"
#include "augforge/harness/dataset.hpp"
#include "augforge/imaging/rng.hpp"
#include "augforge/subprocess.hpp"

#include <cmath>
#include <set>

namespace augforge::harness {

using imaging::RngStream;

namespace {

const std::uint64_t kWeightsTag = imaging::hash_id("surrogate-weights");
const std::uint64_t kNoiseTag = imaging::hash_id("surrogate-noise");
const std::uint64_t kDatasetTag = imaging::hash_id("dataset-objective");

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (const char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += "'";
    return out;
}

} // namespace

SurrogateModel::SurrogateModel(const search::SearchSpace& space,
                               std::uint64_t weights_seed)
    : names_(space.names()) {
    RngStream rng(weights_seed, 0, kWeightsTag, 0);
    const std::size_t d = names_.size();
    weights_.reserve(d);
    for (std::size_t i = 0; i < d; ++i) weights_.push_back(rng.uniform(-1.0, 1.0));

    if (d >= 2) {
        const std::size_t n_pairs = std::max<std::size_t>(1, d / 2);
        std::set<std::pair<std::size_t, std::size_t>> seen;
        std::size_t attempts = 0;
        while (pairs_.size() < n_pairs && attempts < 100 * n_pairs) {
            ++attempts;
            auto i = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(d) - 1));
            auto j = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(d) - 1));
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            if (!seen.insert({i, j}).second) continue;
            pairs_.emplace_back(i, j);
            pair_weights_.push_back(rng.uniform(-1.5, 1.5));
        }
    }
}

double SurrogateModel::raw_score(const std::vector<std::uint8_t>& active) const {
    if (active.size() != names_.size()) {
        throw ConfigError("activation vector does not match the space");
    }
    double z = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (active[i]) z += weights_[i];
    }
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        const auto& [i, j] = pairs_[k];
        if (active[i] && active[j]) z += pair_weights_[k];
    }
    return z;
}

double SurrogateModel::evaluate(const std::vector<std::uint8_t>& active) const {
    return sigmoid(raw_score(active));
}

double SurrogateModel::evaluate(const search::Assignment& assignment) const {
    std::vector<std::uint8_t> active;
    active.reserve(names_.size());
    for (const std::string& name : names_) {
        const auto it = assignment.find(name);
        if (it == assignment.end()) {
            throw ConfigError("assignment missing parameter: " + name);
        }
        active.push_back(it->second ? 1 : 0);
    }
    return evaluate(active);
}

double surrogate_objective(const augment::ChainConfig& cfg,
                           const SurrogateModel& model, double noise,
                           std::uint64_t study_seed, std::int64_t trial_id) {
    std::vector<std::uint8_t> active;
    active.reserve(model.dimension());
    for (const std::string& name : model.names()) {
        active.push_back(
            cfg.spec(augment::kind_from_name(name)).active ? 1 : 0);
    }
    double z = model.raw_score(active);
    if (noise > 0.0) {
        RngStream rng(study_seed, static_cast<std::uint64_t>(trial_id),
                      kNoiseTag, 0);
        z += noise * rng.gaussian();
    }
    return sigmoid(z);
}

ExternalObjectiveResult run_external_objective(const augment::ChainConfig& cfg,
                                               const std::string& command,
                                               double timeout_seconds,
                                               std::uint64_t seed,
                                               std::int64_t trial_id) {
    nlohmann::ordered_json request{{"trial_id", trial_id},
                                   {"seed", seed},
                                   {"chain", cfg.to_json()}};
    const std::string input = request.dump() + "\n";

    const SubprocessResult result =
        run_subprocess(command, input, timeout_seconds);
    if (result.timed_out) {
        throw StateError("timeout");
    }
    if (result.exit_code != 0) {
        throw StateError("objective command exited with " +
                         std::to_string(result.exit_code));
    }
    const auto response =
        nlohmann::json::parse(result.stdout_bytes, nullptr, false);
    if (response.is_discarded() || !response.is_object() ||
        !response.contains("objective") || !response["objective"].is_number()) {
        throw StateError("malformed objective output");
    }
    ExternalObjectiveResult out;
    out.objective = response["objective"].get<double>();
    if (response.contains("metrics")) out.metrics = response["metrics"];
    return out;
}

ObjectiveRunner ObjectiveRunner::external(std::string command,
                                          double timeout_seconds) {
    if (timeout_seconds <= 0.0) {
        throw ConfigError("objective timeout must be positive");
    }
    ObjectiveRunner r;
    r.variant_ = Variant::external;
    r.command_ = std::move(command);
    r.timeout_seconds_ = timeout_seconds;
    return r;
}

ObjectiveRunner ObjectiveRunner::surrogate(std::uint64_t weights_seed,
                                           double noise) {
    ObjectiveRunner r;
    r.variant_ = Variant::surrogate;
    r.weights_seed_ = weights_seed;
    r.noise_ = noise;
    return r;
}

ObjectiveRunner ObjectiveRunner::dataset_eval(std::filesystem::path dataset_root,
                                              std::string command,
                                              double timeout_seconds) {
    if (timeout_seconds <= 0.0) {
        throw ConfigError("objective timeout must be positive");
    }
    ObjectiveRunner r;
    r.variant_ = Variant::dataset_eval;
    r.dataset_root_ = std::move(dataset_root);
    r.command_ = std::move(command);
    r.timeout_seconds_ = timeout_seconds;
    return r;
}

search::ObjectiveFn ObjectiveRunner::bind(const search::SearchSpace& space,
                                          std::uint64_t study_seed) const {
    switch (variant_) {
    case Variant::surrogate: {
        auto model = std::make_shared<SurrogateModel>(space, weights_seed_);
        const double noise = noise_;
        return [model, noise, study_seed](const augment::ChainConfig& cfg,
                                          std::int64_t trial_id) {
            return search::ObjectiveOutcome::success(
                surrogate_objective(cfg, *model, noise, study_seed, trial_id));
        };
    }
    case Variant::external: {
        const std::string command = command_;
        const double timeout = timeout_seconds_;
        return [command, timeout, study_seed](const augment::ChainConfig& cfg,
                                              std::int64_t trial_id) {
            try {
                ExternalObjectiveResult r = run_external_objective(
                    cfg, command, timeout, study_seed, trial_id);
                return search::ObjectiveOutcome::success(r.objective,
                                                         std::move(r.metrics));
            } catch (const Error& e) {
                return search::ObjectiveOutcome::failure(e.what());
            }
        };
    }
    case Variant::dataset_eval: {
        const auto manifest = DatasetManifest::discover(dataset_root_);
        const std::string command = command_;
        const double timeout = timeout_seconds_;
        return [manifest, command, timeout,
                study_seed](const augment::ChainConfig& cfg,
                            std::int64_t trial_id) {
            namespace fs = std::filesystem;
            const fs::path work =
                fs::temp_directory_path() /
                ("augforge-trial-" + std::to_string(study_seed) + "-" +
                 std::to_string(trial_id));
            const std::uint64_t trial_seed =
                RngStream(study_seed, static_cast<std::uint64_t>(trial_id),
                          kDatasetTag, 0)
                    .next_u64();
            try {
                fs::remove_all(work);
                augment_dataset(manifest, cfg, work, trial_seed);
                const fs::path det_path = work / "detections.json";
                const std::string cmdline = command + " " +
                                            shell_quote(work.string()) + " " +
                                            shell_quote(det_path.string());
                const SubprocessResult result =
                    run_subprocess(cmdline, {}, timeout);
                if (result.timed_out) {
                    throw StateError("timeout");
                }
                if (result.exit_code != 0) {
                    throw StateError("detector command exited with " +
                                     std::to_string(result.exit_code));
                }
                const auto gt = eval::GroundTruthSet::load(work / "gt.json");
                const auto det = eval::DetectionSet::load(det_path);
                const eval::MetricsReport report = eval::evaluate(gt, det);
                fs::remove_all(work);
                return search::ObjectiveOutcome::success(
                    report.map, report.to_json());
            } catch (const std::exception& e) {
                fs::remove_all(work);
                return search::ObjectiveOutcome::failure(e.what());
            }
        };
    }
    }
    throw ConfigError("objective runner not configured");
}

} // namespace augforge::harness
