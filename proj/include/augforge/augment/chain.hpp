#pragma once

#include "augforge/augment/catalog.hpp"
#include "augforge/augment/ops.hpp"
#include "augforge/imaging/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace augforge::augment {

/// One catalog entry inside a chain: whether it participates, how often it
/// fires, and with which parameters.
struct AugmentationSpec {
    AugmentationKind kind;
    bool active = false;
    double probability = 0.30;
    ParamSet params;
};

/// Ordered set of specs covering every catalog kind exactly once, in
/// canonical catalog order.
class ChainConfig {
public:
    /// Every kind present, inactive, probability 0.30, default params.
    static ChainConfig defaults();

    /// Accepts a document listing any subset of kinds (in any order); the
    /// rest fill in as inactive defaults. Duplicate kinds are rejected.
    static ChainConfig from_json(const nlohmann::json& doc);
    static ChainConfig load(const std::filesystem::path& path);

    nlohmann::ordered_json to_json() const;

    const std::vector<AugmentationSpec>& specs() const { return specs_; }
    AugmentationSpec& spec(AugmentationKind kind);
    const AugmentationSpec& spec(AugmentationKind kind) const;

    int active_count() const;

private:
    ChainConfig() = default;
    std::vector<AugmentationSpec> specs_; // index == catalog position
};

/// Directory of PNGs used by the background augmentation.
class BackgroundPool {
public:
    static BackgroundPool from_directory(const std::filesystem::path& dir);
    explicit BackgroundPool(std::vector<Image> images)
        : images_(std::move(images)) {}

    bool empty() const { return images_.empty(); }
    std::size_t size() const { return images_.size(); }
    const Image& at(std::size_t i) const { return images_[i]; }

private:
    std::vector<Image> images_;
};

/// Slot for an out-of-process augmentation (PNG on stdin, PNG on stdout),
/// applied after the catalog entries when configured.
struct ExternalHook {
    std::string command;
    double probability = 0.30;
    double timeout_seconds = 60.0;
};

struct ChainOptions {
    const BackgroundPool* background_pool = nullptr;
    std::optional<ExternalHook> external_hook;
};

/// Applies every active spec in canonical order. Each entry derives its own
/// stream from (study_seed, trial_id, sample id, catalog index) and fires on
/// a Bernoulli(probability) draw; geometric entries transform mask and boxes
/// consistently. The input sample is never modified.
Sample apply_chain(const ChainConfig& cfg, const Sample& s,
                   std::uint64_t study_seed, std::uint64_t trial_id,
                   const ChainOptions& options = {});

/// Writes a tiled PNG: the source plus every catalog entry applied at
/// probability 1 with default parameters and a fixed seed. Entries whose
/// requirements are missing (mask, background pool) render the unmodified
/// source with a black marker square in the top-left corner. Returns the
/// tile count.
int preview_grid(const Sample& s, const std::filesystem::path& out_path);

} // namespace augforge::augment
