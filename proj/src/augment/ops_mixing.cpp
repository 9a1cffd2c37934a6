#include "augforge/augment/ops.hpp"

#include "augforge/error.hpp"

#include <cmath>
#include <vector>

namespace augforge::augment {

namespace {

void require_severity(int severity) {
    if (severity < 1 || severity > 2) {
        throw ConfigError("severity must be 1 or 2");
    }
}

/// out = 1 - (1 - img) * (1 - layer), per channel.
Image screen_blend(const Image& img, const Plane& layer) {
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) =
            Scalar(1) - (Scalar(1) - img.plane(c)) * (Scalar(1) - layer);
    }
    out.clamp01();
    return out;
}

/// Midpoint-displacement plasma on a (2^k + 1)^2 grid, normalized to [0, 1].
/// Displacement amplitude decays by `decay` per halving of the step.
Plane plasma_fractal(int width, int height, double decay, RngStream& rng) {
    int size = 1;
    while (size < std::max(width, height)) size *= 2;
    const int n = size + 1;

    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> grid(n, n);
    grid.setZero();
    grid(0, 0) = rng.uniform();
    grid(0, n - 1) = rng.uniform();
    grid(n - 1, 0) = rng.uniform();
    grid(n - 1, n - 1) = rng.uniform();

    double amp = 1.0;
    for (int step = size; step > 1; step /= 2) {
        const int half = step / 2;
        // Diamond step.
        for (int y = half; y < n; y += step) {
            for (int x = half; x < n; x += step) {
                const double avg = (grid(y - half, x - half) + grid(y - half, x + half) +
                                    grid(y + half, x - half) + grid(y + half, x + half)) /
                                   4.0;
                grid(y, x) = avg + amp * (rng.uniform() - 0.5);
            }
        }
        // Square step.
        for (int y = 0; y < n; y += half) {
            const int x_start = (y / half) % 2 == 0 ? half : 0;
            for (int x = x_start; x < n; x += step) {
                double sum = 0.0;
                int cnt = 0;
                if (y - half >= 0) sum += grid(y - half, x), ++cnt;
                if (y + half < n) sum += grid(y + half, x), ++cnt;
                if (x - half >= 0) sum += grid(y, x - half), ++cnt;
                if (x + half < n) sum += grid(y, x + half), ++cnt;
                grid(y, x) = sum / cnt + amp * (rng.uniform() - 0.5);
            }
        }
        amp *= decay;
    }

    const double lo = grid.minCoeff();
    const double hi = grid.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    Plane out(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            out(y, x) = static_cast<Scalar>((grid(y, x) - lo) / span);
        }
    }
    return out;
}

} // namespace

Image fog_core(const Image& img, int severity, RngStream& rng) {
    require_severity(severity);
    // Severity scales the screen-blend strength of the plasma layer.
    const Scalar strength = severity == 1 ? Scalar(0.35) : Scalar(0.5);
    const Plane plasma =
        plasma_fractal(img.width(), img.height(), 0.55, rng) * strength;
    return screen_blend(img, plasma);
}

Image snow_core(const Image& img, int severity, RngStream& rng) {
    require_severity(severity);
    const int w = img.width();
    const int h = img.height();

    // Sparse bright speckles, then a directional blur to draw flake streaks.
    const double density = severity == 1 ? 0.004 : 0.010;
    const int streak = severity == 1 ? 7 : 11;

    Plane speckles = Plane::Zero(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (rng.bernoulli(density)) {
                speckles(y, x) = static_cast<Scalar>(rng.uniform(0.5, 1.0));
            }
        }
    }
    const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);

    Image layer_rgb = Image::from_planes(speckles, speckles, speckles);
    layer_rgb = motion_blur_core(layer_rgb, streak, angle);
    // The normalized blur kernel spreads each speckle's mass along the
    // streak; scale back up so streaks stay visibly bright.
    Plane layer = (layer_rgb.plane(0) * static_cast<Scalar>(streak))
                      .min(Scalar(1))
                      .max(Scalar(0));

    return screen_blend(img, layer);
}

} // namespace augforge::augment
