#pragma once

#include "augforge/augment/chain.hpp"
#include "augforge/eval/metrics.hpp"
#include "augforge/imaging/types.hpp"

#include <filesystem>

namespace augforge::harness {

/// SPEED+-style dataset on disk:
///   <root>/gt.json         ground-truth file (eval module schema)
///   <root>/images/<id>.png one image per ground-truth record
///   <root>/masks/<id>.png  optional foreground masks
struct DatasetManifest {
    std::filesystem::path root;
    std::filesystem::path images_dir;
    std::filesystem::path masks_dir; // empty when the dataset has no masks
    std::filesystem::path ground_truth;

    static DatasetManifest discover(const std::filesystem::path& root);

    bool has_masks() const { return !masks_dir.empty(); }

    /// Checks every referenced file exists and image dimensions match the
    /// ground-truth records; all failures are listed in one ConfigError
    /// before anything is written.
    eval::GroundTruthSet validate_and_load() const;

    imaging::Sample load_sample(const eval::GtImage& record) const;
};

/// Applies the chain to every sample and writes augmented images, masks,
/// and a rewritten ground-truth file under out_dir. Streams are keyed by
/// (seed, 0, sample id, augmentation index), so outputs are reproducible
/// and independent of the worker count.
void augment_dataset(const DatasetManifest& manifest,
                     const augment::ChainConfig& cfg,
                     const std::filesystem::path& out_dir, std::uint64_t seed,
                     const augment::ChainOptions& options = {},
                     int n_threads = 0);

} // namespace augforge::harness
