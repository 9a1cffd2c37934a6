#include "augforge/augment/ops.hpp"

#include "augforge/error.hpp"

#include <array>
#include <cmath>
#include <numeric>

namespace augforge::augment {

namespace {

// Classic 2D simplex gradient noise over a per-stream permutation table.
class SimplexField {
public:
    explicit SimplexField(RngStream& rng) {
        std::vector<int> base(256);
        std::iota(base.begin(), base.end(), 0);
        rng.shuffle(base);
        for (int i = 0; i < 512; ++i) {
            perm_[static_cast<std::size_t>(i)] =
                base[static_cast<std::size_t>(i & 255)];
        }
    }

    /// Noise value in roughly [-1, 1].
    double noise(double x, double y) const {
        constexpr double f2 = 0.3660254037844386;  // (sqrt(3) - 1) / 2
        constexpr double g2 = 0.21132486540518713; // (3 - sqrt(3)) / 6

        const double s = (x + y) * f2;
        const int i = fast_floor(x + s);
        const int j = fast_floor(y + s);
        const double t = (i + j) * g2;
        const double x0 = x - (i - t);
        const double y0 = y - (j - t);

        const int i1 = x0 > y0 ? 1 : 0;
        const int j1 = 1 - i1;
        const double x1 = x0 - i1 + g2;
        const double y1 = y0 - j1 + g2;
        const double x2 = x0 - 1.0 + 2.0 * g2;
        const double y2 = y0 - 1.0 + 2.0 * g2;

        const int ii = i & 255;
        const int jj = j & 255;
        double total = 0.0;
        total += corner(x0, y0, hash(ii, jj));
        total += corner(x1, y1, hash(ii + i1, jj + j1));
        total += corner(x2, y2, hash(ii + 1, jj + 1));
        return 70.0 * total;
    }

private:
    static int fast_floor(double v) {
        const int i = static_cast<int>(v);
        return v < i ? i - 1 : i;
    }

    int hash(int i, int j) const {
        return perm_[static_cast<std::size_t>(
            (i + perm_[static_cast<std::size_t>(j & 255)]) & 255)];
    }

    static double corner(double x, double y, int h) {
        double t = 0.5 - x * x - y * y;
        if (t < 0.0) return 0.0;
        t *= t;
        static constexpr std::array<std::array<double, 2>, 8> grads = {{
            {1, 1}, {-1, 1}, {1, -1}, {-1, -1}, {1, 0}, {-1, 0}, {0, 1}, {0, -1},
        }};
        const auto& g = grads[static_cast<std::size_t>(h & 7)];
        return t * t * (g[0] * x + g[1] * y);
    }

    std::array<int, 512> perm_{};
};

} // namespace

Plane simplex_noise_field(int width, int height, int octaves,
                          double feature_scale, RngStream& rng) {
    if (octaves < 1 || octaves > 4) {
        throw ConfigError("simplex octaves must be in [1, 4]");
    }
    if (feature_scale <= 0.0) {
        throw ConfigError("feature_scale must be positive");
    }
    const SimplexField field(rng);

    Plane out(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double value = 0.0;
            double amp = 1.0;
            double amp_sum = 0.0;
            double freq = 1.0 / feature_scale;
            for (int o = 0; o < octaves; ++o) {
                value += amp * field.noise(x * freq, y * freq);
                amp_sum += amp;
                amp *= 0.5;
                freq *= 2.0;
            }
            out(y, x) = static_cast<Scalar>(
                std::clamp(0.5 * (value / amp_sum + 1.0), 0.0, 1.0));
        }
    }
    return out;
}

Image apply_simplex_noise(const Image& img, const ParamSet& params,
                          RngStream& rng) {
    validate_params(AugmentationKind::simplex_noise, params);
    const int octaves = static_cast<int>(param(params, "octaves"));
    const double feature_scale = param(params, "feature_scale");
    const Plane mask =
        simplex_noise_field(img.width(), img.height(), octaves, feature_scale, rng);
    return blend_with_edges(img, mask);
}

} // namespace augforge::augment
