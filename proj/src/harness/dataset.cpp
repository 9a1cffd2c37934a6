#include "augforge/harness/dataset.hpp"

#include "augforge/error.hpp"
#include "augforge/imaging/png_io.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace augforge::harness {

namespace fs = std::filesystem;
using imaging::Sample;

DatasetManifest DatasetManifest::discover(const fs::path& root) {
    DatasetManifest m;
    m.root = root;
    m.images_dir = root / "images";
    m.ground_truth = root / "gt.json";
    if (fs::is_directory(root / "masks")) m.masks_dir = root / "masks";

    if (!fs::is_directory(root)) {
        throw ConfigError("dataset root is not a directory: " + root.string());
    }
    if (!fs::is_directory(m.images_dir)) {
        throw ConfigError("dataset has no images directory: " +
                          m.images_dir.string());
    }
    if (!fs::is_regular_file(m.ground_truth)) {
        throw ConfigError("dataset has no ground-truth file: " +
                          m.ground_truth.string());
    }
    return m;
}

eval::GroundTruthSet DatasetManifest::validate_and_load() const {
    const eval::GroundTruthSet gt = eval::GroundTruthSet::load(ground_truth);
    std::ostringstream failures;
    int n_failures = 0;
    for (const eval::GtImage& record : gt.images()) {
        const fs::path image_path = images_dir / (record.id + ".png");
        if (!fs::is_regular_file(image_path)) {
            failures << "\n  missing image: " << image_path.string();
            ++n_failures;
            continue;
        }
        try {
            const imaging::Image img = imaging::load_image(image_path);
            if (img.width() != record.width || img.height() != record.height) {
                failures << "\n  dimension mismatch for " << record.id << ": file "
                         << img.width() << "x" << img.height() << ", ground truth "
                         << record.width << "x" << record.height;
                ++n_failures;
            }
        } catch (const Error& e) {
            failures << "\n  " << e.what();
            ++n_failures;
        }
        if (has_masks()) {
            const fs::path mask_path = masks_dir / (record.id + ".png");
            if (!fs::is_regular_file(mask_path)) {
                failures << "\n  missing mask: " << mask_path.string();
                ++n_failures;
            }
        }
    }
    if (n_failures > 0) {
        throw ConfigError("dataset validation failed (" +
                          std::to_string(n_failures) + " problems):" +
                          failures.str());
    }
    return gt;
}

Sample DatasetManifest::load_sample(const eval::GtImage& record) const {
    Sample s;
    s.id = record.id;
    s.image = imaging::load_image(images_dir / (record.id + ".png"));
    if (has_masks()) {
        s.mask = imaging::load_mask(masks_dir / (record.id + ".png"));
        if (s.mask->width() != s.image.width() ||
            s.mask->height() != s.image.height()) {
            throw ConfigError("mask dimensions do not match image for sample " +
                              record.id);
        }
    }
    s.boxes = record.boxes;
    return s;
}

void augment_dataset(const DatasetManifest& manifest,
                     const augment::ChainConfig& cfg, const fs::path& out_dir,
                     std::uint64_t seed, const augment::ChainOptions& options,
                     int n_threads) {
    const eval::GroundTruthSet gt = manifest.validate_and_load();

    fs::create_directories(out_dir / "images");
    if (manifest.has_masks()) fs::create_directories(out_dir / "masks");

    const auto& records = gt.images();
    std::vector<eval::GtImage> out_records(records.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string error_message;

    auto process = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= records.size()) return;
            try {
                const eval::GtImage& record = records[i];
                const Sample in = manifest.load_sample(record);
                const Sample out = augment::apply_chain(cfg, in, seed, 0, options);

                imaging::save_image(out.image,
                                    out_dir / "images" / (record.id + ".png"));
                if (out.mask) {
                    imaging::save_mask(*out.mask,
                                       out_dir / "masks" / (record.id + ".png"));
                }
                eval::GtImage rewritten = record;
                rewritten.boxes = out.boxes;
                out_records[i] = std::move(rewritten);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (error_message.empty()) error_message = e.what();
                failed.store(true);
                return;
            }
        }
    };

    int workers = n_threads > 0
                      ? n_threads
                      : static_cast<int>(std::min<unsigned>(
                            8, std::max(1u, std::thread::hardware_concurrency())));
    workers = std::min<int>(workers, static_cast<int>(records.size()));
    if (workers <= 1) {
        process();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(process);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) {
        throw IoError("dataset augmentation failed: " + error_message);
    }

    eval::GroundTruthSet out_gt;
    for (auto& record : out_records) out_gt.add_image(std::move(record));
    std::ofstream out(out_dir / "gt.json", std::ios::trunc);
    if (!out) {
        throw IoError("cannot write ground truth: " +
                      (out_dir / "gt.json").string());
    }
    out << out_gt.to_json().dump(2) << '\n';
}

} // namespace augforge::harness
