#include "augforge/augment/catalog.hpp"

#include "augforge/error.hpp"

#include <array>
#include <cmath>

namespace augforge::augment {

namespace {

struct ParamSpec {
    const char* key;
    double def;
    double lo;
    double hi;
    bool integral = false;
};

struct KindInfo {
    const char* name;
    AugmentationClass cls;
    std::array<ParamSpec, 5> params;
    int n_params;
};

// Canonical catalog. Parameter entries are (key, default, min, max); draw
// ranges are expressed as *_min / *_max pairs the sampler pulls from at
// application time.
const std::array<KindInfo, kCatalogSize>& table() {
    static const std::array<KindInfo, kCatalogSize> t = {{
        {"affine",
         AugmentationClass::geometric,
         {{{"rotation_min_deg", -45.0, -180.0, 180.0},
           {"rotation_max_deg", 45.0, -180.0, 180.0}}},
         2},
        {"shadow",
         AugmentationClass::space,
         {{{"threshold", 0.5, 1e-6, 1.0 - 1e-6},
           {"factor", 0.5, 1e-6, 1.0}}},
         2},
        {"specular",
         AugmentationClass::space,
         {{{"peak", 1.0, 0.0, 1.0}, {"sigma_frac", 0.25, 1e-6, 2.0}}},
         2},
        {"background", AugmentationClass::mixing, {{}}, 0},
        {"random_crop",
         AugmentationClass::geometric,
         {{{"min_visible", 0.5, 0.0, 1.0},
           {"scale_min", 0.5, 0.05, 1.0},
           {"scale_max", 1.0, 0.05, 1.0}}},
         3},
        {"fog",
         AugmentationClass::mixing,
         {{{"severity_min", 1.0, 1.0, 2.0, true},
           {"severity_max", 2.0, 1.0, 2.0, true}}},
         2},
        {"snow",
         AugmentationClass::mixing,
         {{{"severity_min", 1.0, 1.0, 2.0, true},
           {"severity_max", 2.0, 1.0, 2.0, true}}},
         2},
        {"emboss",
         AugmentationClass::kernel,
         {{{"alpha_min", 0.0, 0.0, 1.0},
           {"alpha_max", 1.0, 0.0, 1.0},
           {"strength_min", 0.5, 0.0, 3.0},
           {"strength_max", 1.5, 0.0, 3.0}}},
         4},
        {"invert",
         AugmentationClass::color,
         {{{"per_channel", 0.0, 0.0, 1.0, true}}},
         1},
        {"dropout",
         AugmentationClass::deletion,
         {{{"fraction_min", 0.01, 0.0, 1.0},
           {"fraction_max", 0.1, 0.0, 1.0},
           {"per_channel", 0.0, 0.0, 1.0, true}}},
         3},
        {"contrast",
         AugmentationClass::color,
         {{{"severity_min", 1.0, 1.0, 2.0, true},
           {"severity_max", 2.0, 1.0, 2.0, true}}},
         2},
        {"multiply",
         AugmentationClass::color,
         {{{"factor_min", 0.7, 0.0, 3.0},
           {"factor_max", 1.3, 0.0, 3.0},
           {"per_channel", 0.0, 0.0, 1.0, true}}},
         3},
        {"saturate",
         AugmentationClass::color,
         {{{"severity_min", 1.0, 1.0, 2.0, true},
           {"severity_max", 2.0, 1.0, 2.0, true}}},
         2},
        {"add_value",
         AugmentationClass::color,
         {{{"delta_min", -0.2, -1.0, 1.0},
           {"delta_max", 0.2, -1.0, 1.0},
           {"per_channel", 0.0, 0.0, 1.0, true}}},
         3},
        {"grayscale",
         AugmentationClass::color,
         {{{"alpha_min", 0.0, 0.0, 1.0}, {"alpha_max", 1.0, 0.0, 1.0}}},
         2},
        {"edge_detect",
         AugmentationClass::kernel,
         {{{"alpha_min", 0.0, 0.0, 1.0}, {"alpha_max", 1.0, 0.0, 1.0}}},
         2},
        {"median_blur",
         AugmentationClass::kernel,
         {{{"k_min", 3.0, 3.0, 15.0, true}, {"k_max", 7.0, 3.0, 15.0, true}}},
         2},
        {"motion_blur",
         AugmentationClass::kernel,
         {{{"k_min", 3.0, 3.0, 15.0, true}, {"k_max", 7.0, 3.0, 15.0, true}}},
         2},
        {"average_blur",
         AugmentationClass::kernel,
         {{{"k_min", 3.0, 3.0, 15.0, true}, {"k_max", 7.0, 3.0, 15.0, true}}},
         2},
        {"super_pixels",
         AugmentationClass::deletion,
         {{{"n_segments", 128.0, 1.0, 4096.0, true},
           {"replace_prob", 0.5, 0.0, 1.0}}},
         2},
        {"enhance_color",
         AugmentationClass::color,
         {{{"strength_min", 0.5, 0.0, 3.0}, {"strength_max", 1.5, 0.0, 3.0}}},
         2},
        {"gaussian_blur",
         AugmentationClass::kernel,
         {{{"sigma_min", 0.5, 0.0, 8.0}, {"sigma_max", 2.0, 0.0, 8.0}}},
         2},
        {"simplex_noise",
         AugmentationClass::deletion,
         {{{"octaves", 2.0, 1.0, 4.0, true},
           {"feature_scale", 64.0, 2.0, 1024.0}}},
         2},
        {"coarse_dropout",
         AugmentationClass::deletion,
         {{{"rect_count_min", 1.0, 1.0, 16.0, true},
           {"rect_count_max", 5.0, 1.0, 16.0, true},
           {"max_frac", 0.2, 0.01, 1.0},
           {"per_channel", 0.0, 0.0, 1.0, true}}},
         4},
        {"linear_contrast",
         AugmentationClass::color,
         {{{"strength_min", 0.5, 0.0, 3.0}, {"strength_max", 1.5, 0.0, 3.0}}},
         2},
        {"enhance_contrast",
         AugmentationClass::color,
         {{{"strength_min", 0.5, 0.0, 3.0}, {"strength_max", 1.5, 0.0, 3.0}}},
         2},
        {"enhance_sharpness",
         AugmentationClass::kernel,
         {{{"strength_min", 0.5, 0.0, 3.0}, {"strength_max", 1.5, 0.0, 3.0}}},
         2},
        {"enhance_brightness",
         AugmentationClass::color,
         {{{"strength_min", 0.5, 0.0, 3.0}, {"strength_max", 1.5, 0.0, 3.0}}},
         2},
        {"multiply_brightness",
         AugmentationClass::color,
         {{{"factor_min", 0.7, 0.0, 3.0}, {"factor_max", 1.3, 0.0, 3.0}}},
         2},
        {"additive_gaussian_noise",
         AugmentationClass::kernel,
         {{{"sigma_min", 0.01, 0.0, 1.0}, {"sigma_max", 0.1, 0.0, 1.0}}},
         2},
    }};
    return t;
}

const KindInfo& info(AugmentationKind kind) {
    return table()[static_cast<std::size_t>(kind)];
}

} // namespace

const std::string& kind_name(AugmentationKind kind) {
    static const std::array<std::string, kCatalogSize> names = [] {
        std::array<std::string, kCatalogSize> n;
        for (int i = 0; i < kCatalogSize; ++i) n[i] = table()[i].name;
        return n;
    }();
    return names[static_cast<std::size_t>(kind)];
}

AugmentationKind kind_from_name(std::string_view name) {
    for (int i = 0; i < kCatalogSize; ++i) {
        if (name == table()[static_cast<std::size_t>(i)].name) {
            return static_cast<AugmentationKind>(i);
        }
    }
    throw ConfigError("unknown augmentation kind: " + std::string(name));
}

AugmentationClass kind_class(AugmentationKind kind) { return info(kind).cls; }

bool transforms_annotations(AugmentationKind kind) {
    return kind_class(kind) == AugmentationClass::geometric;
}

bool requires_mask(AugmentationKind kind) {
    return kind == AugmentationKind::background ||
           kind == AugmentationKind::specular ||
           kind == AugmentationKind::shadow;
}

bool requires_background_pool(AugmentationKind kind) {
    return kind == AugmentationKind::background;
}

ParamSet default_params(AugmentationKind kind) {
    ParamSet out;
    const KindInfo& k = info(kind);
    for (int i = 0; i < k.n_params; ++i) {
        out[k.params[static_cast<std::size_t>(i)].key] =
            k.params[static_cast<std::size_t>(i)].def;
    }
    return out;
}

void validate_params(AugmentationKind kind, const ParamSet& params) {
    const KindInfo& k = info(kind);
    for (const auto& [key, value] : params) {
        const ParamSpec* found = nullptr;
        for (int i = 0; i < k.n_params; ++i) {
            if (key == k.params[static_cast<std::size_t>(i)].key) {
                found = &k.params[static_cast<std::size_t>(i)];
                break;
            }
        }
        if (!found) {
            throw ConfigError("unknown parameter '" + key + "' for " +
                              kind_name(kind));
        }
        if (!(value >= found->lo && value <= found->hi)) {
            throw ConfigError("parameter '" + key + "' for " + kind_name(kind) +
                              " out of range");
        }
        if (found->integral && value != std::floor(value)) {
            throw ConfigError("parameter '" + key + "' for " + kind_name(kind) +
                              " must be integral");
        }
    }
    // *_min must not exceed its *_max partner.
    for (const auto& [key, value] : params) {
        if (key.size() > 4 && key.ends_with("_min")) {
            const std::string max_key = key.substr(0, key.size() - 4) + "_max";
            const auto it = params.find(max_key);
            if (it != params.end() && value > it->second) {
                throw ConfigError("parameter '" + key + "' exceeds '" + max_key +
                                  "' for " + kind_name(kind));
            }
        }
    }
}

ParamSet merged_params(AugmentationKind kind, const ParamSet& overrides) {
    ParamSet out = default_params(kind);
    for (const auto& [key, value] : overrides) out[key] = value;
    validate_params(kind, out);
    return out;
}

double param(const ParamSet& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) {
        throw ConfigError("missing parameter '" + key + "'");
    }
    return it->second;
}

} // namespace augforge::augment
