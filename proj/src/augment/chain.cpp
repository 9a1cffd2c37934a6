#include "augforge/augment/chain.hpp"

#include "augforge/error.hpp"
#include "augforge/imaging/png_io.hpp"
#include "augforge/subprocess.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace augforge::augment {

using imaging::derive_stream;
using imaging::hash_id;

ChainConfig ChainConfig::defaults() {
    ChainConfig cfg;
    cfg.specs_.reserve(kCatalogSize);
    for (int i = 0; i < kCatalogSize; ++i) {
        const auto kind = static_cast<AugmentationKind>(i);
        cfg.specs_.push_back({kind, false, 0.30, default_params(kind)});
    }
    return cfg;
}

ChainConfig ChainConfig::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("augmentations") ||
        !doc["augmentations"].is_array()) {
        throw ConfigError("chain config must be {\"augmentations\": [...]}");
    }
    ChainConfig cfg = defaults();
    std::set<AugmentationKind> seen;
    for (const auto& entry : doc["augmentations"]) {
        if (!entry.contains("kind")) {
            throw ConfigError("chain entry without \"kind\"");
        }
        const AugmentationKind kind =
            kind_from_name(entry["kind"].get<std::string>());
        if (!seen.insert(kind).second) {
            throw ConfigError("duplicate augmentation kind: " + kind_name(kind));
        }
        AugmentationSpec& spec = cfg.spec(kind);
        if (entry.contains("active")) spec.active = entry["active"].get<bool>();
        if (entry.contains("probability")) {
            spec.probability = entry["probability"].get<double>();
            if (spec.probability < 0.0 || spec.probability > 1.0) {
                throw ConfigError("probability out of [0,1] for " +
                                  kind_name(kind));
            }
        }
        if (entry.contains("params")) {
            ParamSet overrides;
            for (const auto& [key, value] : entry["params"].items()) {
                if (!value.is_number() && !value.is_boolean()) {
                    throw ConfigError("parameter '" + key + "' must be numeric");
                }
                overrides[key] = value.is_boolean()
                                     ? (value.get<bool>() ? 1.0 : 0.0)
                                     : value.get<double>();
            }
            spec.params = merged_params(kind, overrides);
        }
    }
    return cfg;
}

ChainConfig ChainConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open chain config: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid chain config JSON in " + path.string() + ": " +
                          e.what());
    }
    return from_json(doc);
}

nlohmann::ordered_json ChainConfig::to_json() const {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const AugmentationSpec& spec : specs_) {
        nlohmann::ordered_json e;
        e["kind"] = kind_name(spec.kind);
        e["active"] = spec.active;
        e["probability"] = spec.probability;
        e["params"] = spec.params;
        entries.push_back(std::move(e));
    }
    return nlohmann::ordered_json{{"augmentations", std::move(entries)}};
}

AugmentationSpec& ChainConfig::spec(AugmentationKind kind) {
    return specs_[static_cast<std::size_t>(kind)];
}

const AugmentationSpec& ChainConfig::spec(AugmentationKind kind) const {
    return specs_[static_cast<std::size_t>(kind)];
}

int ChainConfig::active_count() const {
    return static_cast<int>(
        std::count_if(specs_.begin(), specs_.end(),
                      [](const AugmentationSpec& s) { return s.active; }));
}

BackgroundPool BackgroundPool::from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("background pool is not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Image> images;
    images.reserve(files.size());
    for (const auto& f : files) images.push_back(imaging::load_image(f));
    if (images.empty()) {
        throw ConfigError("background pool has no PNG files: " + dir.string());
    }
    return BackgroundPool(std::move(images));
}

namespace {

Image run_external_hook(const Image& img, const ExternalHook& hook) {
    const std::vector<std::uint8_t> in_bytes = imaging::encode_png(img);
    const SubprocessResult result = run_subprocess(
        hook.command,
        std::string_view(reinterpret_cast<const char*>(in_bytes.data()),
                         in_bytes.size()),
        hook.timeout_seconds);
    if (result.timed_out) {
        throw IoError("external augmentation timed out: " + hook.command);
    }
    if (result.exit_code != 0) {
        throw IoError("external augmentation exited with " +
                      std::to_string(result.exit_code) + ": " + hook.command);
    }
    const std::vector<std::uint8_t> out_bytes(result.stdout_bytes.begin(),
                                              result.stdout_bytes.end());
    Image out = imaging::decode_png(out_bytes);
    if (!out.same_size(img)) {
        throw IoError("external augmentation changed the image size");
    }
    return out;
}

} // namespace

Sample apply_chain(const ChainConfig& cfg, const Sample& s,
                   std::uint64_t study_seed, std::uint64_t trial_id,
                   const ChainOptions& options) {
    const auto& specs = cfg.specs();
    for (const AugmentationSpec& spec : specs) {
        validate_params(spec.kind, spec.params);
        if (spec.probability < 0.0 || spec.probability > 1.0) {
            throw ConfigError("probability out of [0,1] for " +
                              kind_name(spec.kind));
        }
    }
    {
        const AugmentationSpec& bg = cfg.spec(AugmentationKind::background);
        if (bg.active && bg.probability > 0.0) {
            if (options.background_pool == nullptr ||
                options.background_pool->empty()) {
                throw ConfigError(
                    "background augmentation active without a background pool");
            }
            if (!s.mask) {
                throw ConfigError(
                    "background augmentation active but the sample has no mask");
            }
        }
    }

    const std::uint64_t sid = hash_id(s.id);
    Sample out = s;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const AugmentationSpec& spec = specs[i];
        if (!spec.active || spec.probability <= 0.0) continue;
        RngStream rng = derive_stream(study_seed, trial_id, sid, i);
        if (!rng.bernoulli(spec.probability)) continue;

        switch (spec.kind) {
        case AugmentationKind::affine:
            out = apply_affine(out, spec.params, rng);
            break;
        case AugmentationKind::random_crop:
            if (!out.boxes.empty()) {
                out = apply_random_crop(out, spec.params, rng);
            }
            break;
        case AugmentationKind::background: {
            const auto idx = static_cast<std::size_t>(rng.uniform_int(
                0, static_cast<std::int64_t>(options.background_pool->size()) - 1));
            out = apply_background(out, options.background_pool->at(idx));
            break;
        }
        case AugmentationKind::specular:
            if (out.mask && out.mask->foreground_count() > 0) {
                out.image = apply_specular(out.image, *out.mask, spec.params, rng);
            }
            break;
        case AugmentationKind::shadow:
            if (out.mask && out.mask->foreground_count() > 0) {
                out.image = apply_shadow(out.image, *out.mask, spec.params, rng);
            }
            break;
        default:
            out.image = apply_pixel_op(spec.kind, out.image, spec.params, rng);
            break;
        }
    }

    if (options.external_hook) {
        RngStream rng = derive_stream(study_seed, trial_id, sid, kCatalogSize);
        if (rng.bernoulli(options.external_hook->probability)) {
            out.image = run_external_hook(out.image, *options.external_hook);
        }
    }
    return out;
}

} // namespace augforge::augment
