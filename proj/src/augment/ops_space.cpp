#include "augforge/augment/ops.hpp"

#include "augforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace augforge::augment {

namespace {

struct FgPixel {
    int x, y;
    Scalar lum;
};

std::vector<FgPixel> foreground_pixels(const Image& img, const Mask& mask) {
    if (mask.width() != img.width() || mask.height() != img.height()) {
        throw ConfigError("mask dimensions must match the image");
    }
    const Plane lum = imaging::luminance(img);
    std::vector<FgPixel> fg;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (mask.at(x, y)) fg.push_back({x, y, lum(y, x)});
        }
    }
    return fg;
}

} // namespace

Image apply_specular(const Image& img, const Mask& mask, const ParamSet& params,
                     RngStream& rng) {
    validate_params(AugmentationKind::specular, params);
    std::vector<FgPixel> fg = foreground_pixels(img, mask);
    if (fg.empty()) {
        throw ConfigError("specular needs a non-empty foreground mask");
    }
    const double peak = param(params, "peak");
    const double sigma_frac = param(params, "sigma_frac");

    // Bloom center: uniform among the top-decile-luminance foreground pixels.
    // Ties resolve by scan order so the draw stays reproducible.
    std::stable_sort(fg.begin(), fg.end(), [](const FgPixel& a, const FgPixel& b) {
        return a.lum > b.lum;
    });
    const auto decile = static_cast<std::size_t>(std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(0.1 * static_cast<double>(fg.size())))));
    const auto pick = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(decile) - 1));
    const FgPixel center = fg[pick];

    int min_x = center.x, max_x = center.x, min_y = center.y, max_y = center.y;
    for (const FgPixel& p : fg) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double bw = max_x - min_x + 1;
    const double bh = max_y - min_y + 1;
    const double sigma = sigma_frac * std::sqrt(bw * bw + bh * bh);

    Image out = img;
    if (peak == 0.0 || sigma <= 0.0) return out;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double dx = x - center.x;
            const double dy = y - center.y;
            const double bloom =
                peak * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            for (int c = 0; c < 3; ++c) {
                out.at(x, y, c) = std::min(
                    Scalar(1), out.at(x, y, c) + static_cast<Scalar>(bloom));
            }
        }
    }
    return out;
}

Image apply_shadow(const Image& img, const Mask& mask, const ParamSet& params,
                   RngStream& /*rng*/) {
    validate_params(AugmentationKind::shadow, params);
    if (mask.width() != img.width() || mask.height() != img.height()) {
        throw ConfigError("mask dimensions must match the image");
    }
    if (mask.foreground_count() == 0) {
        throw ConfigError("shadow needs a non-empty foreground mask");
    }
    const auto threshold = static_cast<Scalar>(param(params, "threshold"));
    const auto factor = static_cast<Scalar>(param(params, "factor"));

    const Plane lum = imaging::luminance(img);
    Image out = img;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            // Dim foreground gets darker; bright foreground and the whole
            // background stay untouched.
            if (mask.at(x, y) && lum(y, x) < threshold) {
                for (int c = 0; c < 3; ++c) out.at(x, y, c) *= factor;
            }
        }
    }
    return out;
}

} // namespace augforge::augment
