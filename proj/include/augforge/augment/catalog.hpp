#pragma once

#include <map>
#include <string>
#include <string_view>

namespace augforge::augment {

/// The 30 catalog entries in canonical chain order. The order is fixed across
/// the project: configs, search-space parameters, reports and per-sample
/// random streams all index augmentations by this sequence.
enum class AugmentationKind : int {
    affine = 0,
    shadow,
    specular,
    background,
    random_crop,
    fog,
    snow,
    emboss,
    invert,
    dropout,
    contrast,
    multiply,
    saturate,
    add_value,
    grayscale,
    edge_detect,
    median_blur,
    motion_blur,
    average_blur,
    super_pixels,
    enhance_color,
    gaussian_blur,
    simplex_noise,
    coarse_dropout,
    linear_contrast,
    enhance_contrast,
    enhance_sharpness,
    enhance_brightness,
    multiply_brightness,
    additive_gaussian_noise,
};

inline constexpr int kCatalogSize = 30;

enum class AugmentationClass {
    color,
    geometric,
    mixing,
    kernel,
    deletion,
    space,
};

/// Kind-specific parameter record; every kind documents its keys, defaults
/// and legal ranges in the catalog table.
using ParamSet = std::map<std::string, double>;

const std::string& kind_name(AugmentationKind kind);
AugmentationKind kind_from_name(std::string_view name);

AugmentationClass kind_class(AugmentationKind kind);

/// Geometric kinds transform boxes and masks; every other kind leaves
/// annotations untouched.
bool transforms_annotations(AugmentationKind kind);

/// Kinds that can only run when the sample carries a foreground mask.
bool requires_mask(AugmentationKind kind);

/// background additionally needs a configured background pool.
bool requires_background_pool(AugmentationKind kind);

ParamSet default_params(AugmentationKind kind);

/// Throws ConfigError on unknown keys or out-of-range values.
void validate_params(AugmentationKind kind, const ParamSet& params);

/// Defaults overlaid with the given overrides, validated.
ParamSet merged_params(AugmentationKind kind, const ParamSet& overrides);

double param(const ParamSet& params, const std::string& key);

} // namespace augforge::augment
