#include "augforge/augment/ops.hpp"

#include "augforge/error.hpp"

#include <cmath>

namespace augforge::augment {

namespace {

std::array<Scalar, 3> draw_per_channel(RngStream& rng, bool per_channel,
                                       double lo, double hi) {
    if (per_channel) {
        return {static_cast<Scalar>(rng.uniform(lo, hi)),
                static_cast<Scalar>(rng.uniform(lo, hi)),
                static_cast<Scalar>(rng.uniform(lo, hi))};
    }
    const auto v = static_cast<Scalar>(rng.uniform(lo, hi));
    return {v, v, v};
}

int draw_odd_k(RngStream& rng, const ParamSet& p) {
    const int lo = static_cast<int>(param(p, "k_min"));
    const int hi = static_cast<int>(param(p, "k_max"));
    // Draw among the odd sizes in [k_min, k_max].
    const int n = (hi - lo) / 2 + 1;
    return lo + 2 * static_cast<int>(rng.uniform_int(0, n - 1));
}

int draw_severity(RngStream& rng, const ParamSet& p) {
    return static_cast<int>(rng.uniform_int(
        static_cast<std::int64_t>(param(p, "severity_min")),
        static_cast<std::int64_t>(param(p, "severity_max"))));
}

Scalar draw_range(RngStream& rng, const ParamSet& p, const char* stem) {
    return static_cast<Scalar>(rng.uniform(param(p, std::string(stem) + "_min"),
                                           param(p, std::string(stem) + "_max")));
}

} // namespace

Image apply_pixel_op(AugmentationKind kind, const Image& img,
                     const ParamSet& params, RngStream& rng) {
    validate_params(kind, params);
    switch (kind) {
    case AugmentationKind::add_value: {
        const bool pc = param(params, "per_channel") != 0.0;
        return add_value_core(img, draw_per_channel(rng, pc,
                                                    param(params, "delta_min"),
                                                    param(params, "delta_max")));
    }
    case AugmentationKind::invert: {
        const bool pc = param(params, "per_channel") != 0.0;
        std::array<bool, 3> channels = {true, true, true};
        if (pc) {
            for (auto& flag : channels) flag = rng.bernoulli(0.5);
        }
        return invert_core(img, channels);
    }
    case AugmentationKind::multiply: {
        const bool pc = param(params, "per_channel") != 0.0;
        return multiply_core(img, draw_per_channel(rng, pc,
                                                   param(params, "factor_min"),
                                                   param(params, "factor_max")));
    }
    case AugmentationKind::multiply_brightness:
        return multiply_brightness_core(img, draw_range(rng, params, "factor"));
    case AugmentationKind::enhance_color:
        return enhance_color_core(img, draw_range(rng, params, "strength"));
    case AugmentationKind::grayscale:
        return grayscale_core(img, draw_range(rng, params, "alpha"));
    case AugmentationKind::contrast:
        return contrast_severity_core(img, draw_severity(rng, params));
    case AugmentationKind::linear_contrast:
        return linear_contrast_core(img, draw_range(rng, params, "strength"));
    case AugmentationKind::enhance_contrast:
        return enhance_contrast_core(img, draw_range(rng, params, "strength"));
    case AugmentationKind::saturate:
        return saturate_severity_core(img, draw_severity(rng, params));
    case AugmentationKind::enhance_brightness:
        return enhance_brightness_core(img, draw_range(rng, params, "strength"));

    case AugmentationKind::gaussian_blur:
        return gaussian_blur_core(
            img, rng.uniform(param(params, "sigma_min"), param(params, "sigma_max")));
    case AugmentationKind::average_blur:
        return average_blur_core(img, draw_odd_k(rng, params));
    case AugmentationKind::median_blur:
        return median_blur_core(img, draw_odd_k(rng, params));
    case AugmentationKind::motion_blur:
        return motion_blur_core(img, draw_odd_k(rng, params),
                                rng.uniform(0.0, 2.0 * 3.14159265358979323846));
    case AugmentationKind::emboss: {
        const Scalar alpha = draw_range(rng, params, "alpha");
        const Scalar strength = draw_range(rng, params, "strength");
        return emboss_core(img, alpha, strength);
    }
    case AugmentationKind::edge_detect:
        return edge_detect_core(img, draw_range(rng, params, "alpha"));
    case AugmentationKind::enhance_sharpness:
        return enhance_sharpness_core(img, draw_range(rng, params, "strength"));
    case AugmentationKind::additive_gaussian_noise:
        return additive_gaussian_noise_core(
            img, rng.uniform(param(params, "sigma_min"), param(params, "sigma_max")),
            rng);

    case AugmentationKind::snow:
        return snow_core(img, draw_severity(rng, params), rng);
    case AugmentationKind::fog:
        return fog_core(img, draw_severity(rng, params), rng);

    case AugmentationKind::dropout: {
        const double fraction = rng.uniform(param(params, "fraction_min"),
                                            param(params, "fraction_max"));
        const bool pc = param(params, "per_channel") != 0.0;
        return dropout_core(img, fraction, pc, rng);
    }
    case AugmentationKind::coarse_dropout: {
        const int count = static_cast<int>(
            rng.uniform_int(static_cast<std::int64_t>(param(params, "rect_count_min")),
                            static_cast<std::int64_t>(param(params, "rect_count_max"))));
        const double max_frac = param(params, "max_frac");
        const int w = img.width();
        const int h = img.height();
        std::vector<DropRect> rects;
        rects.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const int rw = std::max(1, static_cast<int>(std::lround(
                                           rng.uniform(0.02, max_frac) * w)));
            const int rh = std::max(1, static_cast<int>(std::lround(
                                           rng.uniform(0.02, max_frac) * h)));
            const int x0 = static_cast<int>(rng.uniform_int(0, std::max(0, w - rw)));
            const int y0 = static_cast<int>(rng.uniform_int(0, std::max(0, h - rh)));
            rects.push_back({x0, y0, rw, rh});
        }
        return coarse_dropout_core(img, rects);
    }
    case AugmentationKind::super_pixels:
        return apply_super_pixels(img, params, rng);
    case AugmentationKind::simplex_noise:
        return apply_simplex_noise(img, params, rng);

    case AugmentationKind::affine:
    case AugmentationKind::random_crop:
    case AugmentationKind::background:
    case AugmentationKind::specular:
    case AugmentationKind::shadow:
        break;
    }
    throw ConfigError(kind_name(kind) + " is not a pixel-level augmentation");
}

} // namespace augforge::augment
