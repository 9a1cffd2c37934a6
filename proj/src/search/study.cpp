#include "augforge/search/study.hpp"

#include "augforge/error.hpp"
#include "augforge/imaging/rng.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace augforge::search {

using imaging::RngStream;

namespace {

const std::uint64_t kSamplerTag = imaging::hash_id("sampler");

nlohmann::ordered_json record_to_event(const TrialRecord& r) {
    nlohmann::ordered_json params;
    for (const auto& [name, active] : r.params) {
        params[name] = active ? "active" : "inactive";
    }
    nlohmann::ordered_json e{{"trial_id", r.trial_id},
                             {"state", trial_state_name(r.state)},
                             {"params", std::move(params)}};
    if (r.value) e["value"] = *r.value;
    e["started_at"] = r.started_at;
    if (r.finished_at) e["finished_at"] = *r.finished_at;
    if (!r.fail_reason.empty()) e["reason"] = r.fail_reason;
    if (!r.metrics.is_null()) e["metrics"] = r.metrics;
    return e;
}

TrialRecord record_from_event(const nlohmann::json& e) {
    TrialRecord r;
    r.trial_id = e.at("trial_id").get<std::int64_t>();
    r.state = trial_state_from_name(e.at("state").get<std::string>());
    for (const auto& [name, value] : e.at("params").items()) {
        const std::string v = value.get<std::string>();
        if (v != "active" && v != "inactive") {
            throw StateError("invalid category '" + v + "' for parameter " + name);
        }
        r.params[name] = v == "active";
    }
    if (e.contains("value")) r.value = e["value"].get<double>();
    if (r.state == TrialState::complete && !r.value) {
        throw StateError("complete trial without a value");
    }
    if (r.state != TrialState::complete && r.value) {
        throw StateError("value on a non-complete trial");
    }
    r.started_at = e.value("started_at", std::string());
    if (e.contains("finished_at")) {
        r.finished_at = e["finished_at"].get<std::string>();
    }
    r.fail_reason = e.value("reason", std::string());
    if (e.contains("metrics")) r.metrics = e["metrics"];
    return r;
}

struct ReplayResult {
    std::vector<TrialRecord> records;
    std::uintmax_t valid_bytes = 0;
};

/// Applies one event to the in-order record list.
void apply_event(std::vector<TrialRecord>& records, TrialRecord event,
                 std::size_t line_no) {
    const auto line = std::to_string(line_no);
    if (event.trial_id < 0) {
        throw StateError("negative trial_id at line " + line);
    }
    const auto id = static_cast<std::size_t>(event.trial_id);
    if (event.state == TrialState::running) {
        if (id != records.size()) {
            throw StateError("non-dense trial_id " + std::to_string(event.trial_id) +
                             " at line " + line);
        }
        records.push_back(std::move(event));
        return;
    }
    if (id >= records.size()) {
        throw StateError("completion for unknown trial_id at line " + line);
    }
    TrialRecord& r = records[id];
    if (r.state != TrialState::running) {
        throw StateError("duplicate completion for trial " +
                         std::to_string(event.trial_id) + " at line " + line);
    }
    event.started_at = r.started_at.empty() ? event.started_at : r.started_at;
    r = std::move(event);
}

ReplayResult replay_file(const std::filesystem::path& path) {
    ReplayResult out;
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        const std::size_t nl = content.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const std::size_t end = terminated ? nl : content.size();
        const std::string line = content.substr(pos, end - pos);
        ++line_no;
        if (!line.empty()) {
            nlohmann::json event;
            bool parsed = true;
            try {
                event = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception&) {
                parsed = false;
            }
            if (!parsed) {
                const bool is_last = !terminated || end + 1 >= content.size();
                if (is_last) {
                    break; // partial trailing record from an interrupted append
                }
                throw StateError("corrupt study database " + path.string() +
                                 " at line " + std::to_string(line_no));
            }
            apply_event(out.records, record_from_event(event), line_no);
        }
        out.valid_bytes = terminated ? end + 1 : end;
        if (!terminated) break;
        pos = nl + 1;
    }
    return out;
}

} // namespace

void SearchSettings::validate() const {
    if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
    if (n_startup_trials < 1 || n_startup_trials > n_trials) {
        throw ConfigError("n_startup_trials must satisfy 0 < startup <= trials");
    }
    if (n_candidates < 1) throw ConfigError("n_candidates must be >= 1");
    if (prior_weight < 0.0) throw ConfigError("prior_weight must be >= 0");
    if (gamma_factor <= 0.0 || gamma_cap < 1) {
        throw ConfigError("invalid gamma rule");
    }
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
}

const std::string& trial_state_name(TrialState state) {
    static const std::string names[] = {"running", "complete", "failed"};
    return names[static_cast<int>(state)];
}

TrialState trial_state_from_name(const std::string& name) {
    if (name == "running") return TrialState::running;
    if (name == "complete") return TrialState::complete;
    if (name == "failed") return TrialState::failed;
    throw StateError("unknown trial state: " + name);
}

int gamma_size(const SearchSettings& settings, std::int64_t n_completed) {
    const auto by_factor = static_cast<std::int64_t>(
        std::ceil(settings.gamma_factor * static_cast<double>(n_completed)));
    return static_cast<int>(
        std::min<std::int64_t>(by_factor, settings.gamma_cap));
}

CategoricalEstimator CategoricalEstimator::fit(std::int64_t count_inactive,
                                               std::int64_t count_active,
                                               double prior_weight) {
    const double total = static_cast<double>(count_inactive + count_active) +
                         2.0 * prior_weight;
    CategoricalEstimator est;
    if (total <= 0.0) return est; // uniform
    est.p_inactive = (static_cast<double>(count_inactive) + prior_weight) / total;
    est.p_active = (static_cast<double>(count_active) + prior_weight) / total;
    return est;
}

Assignment tpe_suggest(const std::vector<TrialRecord>& completed,
                       const SearchSpace& space, const SearchSettings& settings,
                       std::int64_t trial_id) {
    RngStream rng(settings.study_seed, static_cast<std::uint64_t>(trial_id),
                  kSamplerTag, 0);
    Assignment out;

    const auto n = static_cast<std::int64_t>(completed.size());
    if (n < settings.n_startup_trials) {
        for (const std::string& name : space.names()) {
            out[name] = rng.bernoulli(0.5);
        }
        return out;
    }

    // Split into the good set (top gamma by value, ties to the earlier
    // trial) and the rest.
    std::vector<std::size_t> order(completed.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = completed[a].value.value();
        const double vb = completed[b].value.value();
        if (va != vb) return va > vb;
        return completed[a].trial_id < completed[b].trial_id;
    });
    const auto n_good = static_cast<std::size_t>(gamma_size(settings, n));

    std::vector<CategoricalEstimator> l_by_param;
    l_by_param.reserve(space.size());
    for (const std::string& name : space.names()) {
        std::int64_t good[2] = {0, 0};
        std::int64_t rest[2] = {0, 0};
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            const TrialRecord& r = completed[order[rank]];
            const auto it = r.params.find(name);
            if (it == r.params.end()) continue;
            (rank < n_good ? good : rest)[it->second ? 1 : 0] += 1;
        }
        const CategoricalEstimator l =
            CategoricalEstimator::fit(good[0], good[1], settings.prior_weight);
        const CategoricalEstimator g =
            CategoricalEstimator::fit(rest[0], rest[1], settings.prior_weight);
        l_by_param.push_back(l);

        bool best_cat = false;
        double best_ratio = -1.0;
        for (int c = 0; c < settings.n_candidates; ++c) {
            const bool cat = rng.uniform() >= l.p_inactive;
            const double ratio = l.prob(cat) / std::max(g.prob(cat), 1e-300);
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best_cat = cat;
            }
        }
        out[name] = best_cat;
    }

    // The density-ratio winner is nearly deterministic on binary categories,
    // so a noiseless objective would re-run the incumbent for the rest of
    // the budget. Re-evaluating an already-completed assignment has zero
    // information value; fall back to sampling the good-set densities until
    // the proposal is new.
    std::set<Assignment> seen;
    for (const TrialRecord& r : completed) seen.insert(r.params);
    for (int attempt = 0; attempt < 32 && seen.count(out); ++attempt) {
        Assignment draw;
        std::size_t i = 0;
        for (const std::string& name : space.names()) {
            draw[name] = rng.uniform() >= l_by_param[i].p_inactive;
            ++i;
        }
        out = std::move(draw);
    }
    return out;
}

Study::Study(SearchSettings settings, SearchSpace space,
             std::filesystem::path db_path)
    : settings_(std::move(settings)), space_(std::move(space)),
      db_path_(std::move(db_path)) {
    settings_.validate();

    if (std::filesystem::exists(db_path_)) {
        ReplayResult replay = replay_file(db_path_);
        records_ = std::move(replay.records);
        if (std::filesystem::file_size(db_path_) > replay.valid_bytes) {
            std::filesystem::resize_file(db_path_, replay.valid_bytes);
        }
    } else if (db_path_.has_parent_path()) {
        std::filesystem::create_directories(db_path_.parent_path());
    }

    out_.open(db_path_, std::ios::app | std::ios::binary);
    if (!out_) {
        throw IoError("cannot open study database: " + db_path_.string());
    }
}

Assignment Study::suggest() {
    std::lock_guard<std::mutex> lock(mutex_);
    return tpe_suggest(completed_unlocked(), space_, settings_,
                       static_cast<std::int64_t>(records_.size()));
}

std::int64_t Study::begin_trial(const Assignment& params) {
    space_.validate_assignment(params);
    std::lock_guard<std::mutex> lock(mutex_);
    TrialRecord r;
    r.trial_id = static_cast<std::int64_t>(records_.size());
    r.params = params;
    r.state = TrialState::running;
    r.started_at = iso8601_now();
    append_line(record_to_event(r));
    records_.push_back(std::move(r));
    return records_.back().trial_id;
}

void Study::complete_trial(std::int64_t trial_id, double value,
                           nlohmann::json metrics) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (trial_id < 0 || static_cast<std::size_t>(trial_id) >= records_.size()) {
        throw StateError("unknown trial_id: " + std::to_string(trial_id));
    }
    TrialRecord& r = records_[static_cast<std::size_t>(trial_id)];
    if (r.state != TrialState::running) {
        throw StateError("trial " + std::to_string(trial_id) +
                         " already finalized");
    }
    TrialRecord done = r;
    done.state = TrialState::complete;
    done.value = value;
    done.finished_at = iso8601_now();
    done.metrics = std::move(metrics);
    append_line(record_to_event(done)); // durable before visible
    r = std::move(done);
}

void Study::fail_trial(std::int64_t trial_id, const std::string& reason) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (trial_id < 0 || static_cast<std::size_t>(trial_id) >= records_.size()) {
        throw StateError("unknown trial_id: " + std::to_string(trial_id));
    }
    TrialRecord& r = records_[static_cast<std::size_t>(trial_id)];
    if (r.state != TrialState::running) {
        throw StateError("trial " + std::to_string(trial_id) +
                         " already finalized");
    }
    TrialRecord done = r;
    done.state = TrialState::failed;
    done.fail_reason = reason;
    done.finished_at = iso8601_now();
    append_line(record_to_event(done));
    r = std::move(done);
}

std::vector<TrialRecord> Study::snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_;
}

std::int64_t Study::n_trials_issued() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return static_cast<std::int64_t>(records_.size());
}

std::int64_t Study::n_complete() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return static_cast<std::int64_t>(completed_unlocked().size());
}

std::int64_t Study::n_failed() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return std::count_if(records_.begin(), records_.end(),
                         [](const TrialRecord& r) {
                             return r.state == TrialState::failed;
                         });
}

std::optional<TrialRecord> Study::best_trial() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::optional<TrialRecord> best;
    for (const TrialRecord& r : records_) {
        if (r.state != TrialState::complete) continue;
        if (!best || r.value.value() > best->value.value()) best = r;
    }
    return best;
}

void Study::append_line(const nlohmann::ordered_json& event) {
    out_ << event.dump() << '\n';
    out_.flush();
    if (!out_) {
        throw IoError("write to study database failed: " + db_path_.string());
    }
}

std::vector<TrialRecord> Study::completed_unlocked() const {
    std::vector<TrialRecord> out;
    for (const TrialRecord& r : records_) {
        if (r.state == TrialState::complete) out.push_back(r);
    }
    return out;
}

std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("study database not found: " + path.string());
    }
    return replay_file(path).records;
}

std::string normalized_db(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open study database: " + path.string());
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto event = nlohmann::ordered_json::parse(line, nullptr, false);
        if (event.is_discarded()) continue; // partial tail
        event.erase("started_at");
        event.erase("finished_at");
        out += event.dump();
        out += '\n';
    }
    return out;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        now.time_since_epoch())
                        .count() %
                    1000;
    std::tm tm_utc{};
    gmtime_r(&secs, &tm_utc);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm_utc);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

} // namespace augforge::search
