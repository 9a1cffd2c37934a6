#include "augforge/augment/ops.hpp"

#include "augforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace augforge::augment {

namespace {

inline int reflect_clamp(int v, int n) { return std::clamp(v, 0, n - 1); }

/// Convolve one plane with an arbitrary odd-sized kernel, edge replicate.
Plane convolve(const Plane& src, const std::vector<double>& kernel, int k) {
    const int h = static_cast<int>(src.rows());
    const int w = static_cast<int>(src.cols());
    const int r = k / 2;
    Plane out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const int sy = reflect_clamp(y + dy, h);
                for (int dx = -r; dx <= r; ++dx) {
                    const int sx = reflect_clamp(x + dx, w);
                    acc += kernel[static_cast<std::size_t>((dy + r) * k + dx + r)] *
                           static_cast<double>(src(sy, sx));
                }
            }
            out(y, x) = static_cast<Scalar>(acc);
        }
    }
    return out;
}

Image convolve_rgb(const Image& img, const std::vector<double>& kernel, int k) {
    Image out = img;
    for (int c = 0; c < 3; ++c) out.plane(c) = convolve(img.plane(c), kernel, k);
    return out;
}

Plane separable_pass(const Plane& src, const std::vector<double>& taps,
                     bool horizontal) {
    const int h = static_cast<int>(src.rows());
    const int w = static_cast<int>(src.cols());
    const int r = static_cast<int>(taps.size()) / 2;
    Plane out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int d = -r; d <= r; ++d) {
                const int sy = horizontal ? y : reflect_clamp(y + d, h);
                const int sx = horizontal ? reflect_clamp(x + d, w) : x;
                acc += taps[static_cast<std::size_t>(d + r)] *
                       static_cast<double>(src(sy, sx));
            }
            out(y, x) = static_cast<Scalar>(acc);
        }
    }
    return out;
}

void require_odd_k(int k) {
    if (k < 1 || k % 2 == 0) {
        throw ConfigError("blur neighborhood must be odd and >= 1");
    }
}

} // namespace

Image gaussian_blur_core(const Image& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        taps[static_cast<std::size_t>(i + r)] = v;
        sum += v;
    }
    for (auto& t : taps) t /= sum;

    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = separable_pass(separable_pass(img.plane(c), taps, true),
                                      taps, false);
    }
    out.clamp01();
    return out;
}

Image average_blur_core(const Image& img, int k) {
    require_odd_k(k);
    const std::vector<double> taps(static_cast<std::size_t>(k), 1.0 / k);
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = separable_pass(separable_pass(img.plane(c), taps, true),
                                      taps, false);
    }
    out.clamp01();
    return out;
}

Image median_blur_core(const Image& img, int k) {
    require_odd_k(k);
    const int h = img.height();
    const int w = img.width();
    const int r = k / 2;
    Image out = img;
    std::vector<Scalar> window(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
    for (int c = 0; c < 3; ++c) {
        const Plane& src = img.plane(c);
        Plane& dst = out.plane(c);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                std::size_t n = 0;
                for (int dy = -r; dy <= r; ++dy) {
                    const int sy = reflect_clamp(y + dy, h);
                    for (int dx = -r; dx <= r; ++dx) {
                        window[n++] = src(sy, reflect_clamp(x + dx, w));
                    }
                }
                auto mid = window.begin() + static_cast<std::ptrdiff_t>(n / 2);
                std::nth_element(window.begin(), mid, window.begin() + static_cast<std::ptrdiff_t>(n));
                dst(y, x) = *mid;
            }
        }
    }
    return out;
}

Image motion_blur_core(const Image& img, int k, double angle_rad) {
    require_odd_k(k);
    // Line kernel through the center, bilinearly splatted, unit mass.
    std::vector<double> kernel(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0.0);
    const double cx = (k - 1) / 2.0;
    const double dirx = std::cos(angle_rad);
    const double diry = std::sin(angle_rad);
    for (int t = 0; t < k; ++t) {
        const double off = t - cx;
        const double px = cx + off * dirx;
        const double py = cx + off * diry;
        const int ix = static_cast<int>(std::floor(px));
        const int iy = static_cast<int>(std::floor(py));
        const double fx = px - ix;
        const double fy = py - iy;
        for (int dy = 0; dy <= 1; ++dy) {
            for (int dx = 0; dx <= 1; ++dx) {
                const int gx = ix + dx;
                const int gy = iy + dy;
                if (gx < 0 || gx >= k || gy < 0 || gy >= k) continue;
                const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
                kernel[static_cast<std::size_t>(gy * k + gx)] += wgt;
            }
        }
    }
    double sum = 0.0;
    for (const double v : kernel) sum += v;
    for (auto& v : kernel) v /= sum;

    Image out = convolve_rgb(img, kernel, k);
    out.clamp01();
    return out;
}

Image emboss_core(const Image& img, Scalar alpha, Scalar strength) {
    const double s = strength;
    // Emboss kernel blended with identity by alpha.
    std::vector<double> effect = {-1.0 - s, -s,  0.0, //
                                  -s,       1.0, s,   //
                                  0.0,      s,   1.0 + s};
    std::vector<double> kernel(9, 0.0);
    for (int i = 0; i < 9; ++i) {
        const double identity = i == 4 ? 1.0 : 0.0;
        kernel[static_cast<std::size_t>(i)] =
            (1.0 - alpha) * identity + alpha * effect[static_cast<std::size_t>(i)];
    }
    Image out = convolve_rgb(img, kernel, 3);
    out.clamp01();
    return out;
}

Image edge_image(const Image& img) {
    const std::vector<double> laplacian = {0, 1, 0, 1, -4, 1, 0, 1, 0};
    Image out = convolve_rgb(img, laplacian, 3);
    for (int c = 0; c < 3; ++c) out.plane(c) = out.plane(c).abs();
    out.clamp01();
    return out;
}

Image edge_detect_core(const Image& img, Scalar alpha) {
    const Image edges = edge_image(img);
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = alpha * edges.plane(c) + (Scalar(1) - alpha) * img.plane(c);
    }
    out.clamp01();
    return out;
}

Image blend_with_edges(const Image& img, const Plane& blend_mask) {
    if (blend_mask.rows() != img.height() || blend_mask.cols() != img.width()) {
        throw ConfigError("blend mask dimensions must match the image");
    }
    const Image edges = edge_image(img);
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) =
            blend_mask * edges.plane(c) + (Scalar(1) - blend_mask) * img.plane(c);
    }
    out.clamp01();
    return out;
}

Image enhance_sharpness_core(const Image& img, Scalar strength) {
    // Smooth with the PIL smoothing kernel, then move away from the smooth
    // version: strength 0 = fully smoothed, 1 = identity, >1 = sharpened.
    const std::vector<double> smooth = {1 / 13.0, 1 / 13.0, 1 / 13.0, //
                                        1 / 13.0, 5 / 13.0, 1 / 13.0, //
                                        1 / 13.0, 1 / 13.0, 1 / 13.0};
    const Image smoothed = convolve_rgb(img, smooth, 3);
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) =
            smoothed.plane(c) + strength * (img.plane(c) - smoothed.plane(c));
    }
    out.clamp01();
    return out;
}

Image additive_gaussian_noise_core(const Image& img, double sigma,
                                   RngStream& rng) {
    Image out = img;
    const int h = img.height();
    const int w = img.width();
    for (int c = 0; c < 3; ++c) {
        Plane& p = out.plane(c);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                p(y, x) += static_cast<Scalar>(sigma * rng.gaussian());
            }
        }
    }
    out.clamp01();
    return out;
}

} // namespace augforge::augment
