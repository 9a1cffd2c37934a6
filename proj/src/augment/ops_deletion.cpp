#include "augforge/augment/ops.hpp"

#include "augforge/error.hpp"

#include <cmath>
#include <vector>

namespace augforge::augment {

Image dropout_core(const Image& img, double fraction, bool per_channel,
                   RngStream& rng) {
    Image out = img;
    const int h = img.height();
    const int w = img.width();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (per_channel) {
                for (int c = 0; c < 3; ++c) {
                    if (rng.bernoulli(fraction)) out.at(x, y, c) = 0;
                }
            } else if (rng.bernoulli(fraction)) {
                for (int c = 0; c < 3; ++c) out.at(x, y, c) = 0;
            }
        }
    }
    return out;
}

Image coarse_dropout_core(const Image& img,
                          const std::vector<DropRect>& rects) {
    Image out = img;
    const int h = img.height();
    const int w = img.width();
    for (const DropRect& r : rects) {
        const int x0 = std::clamp(r.x0, 0, w);
        const int y0 = std::clamp(r.y0, 0, h);
        const int x1 = std::clamp(r.x0 + r.w, 0, w);
        const int y1 = std::clamp(r.y0 + r.h, 0, h);
        if (x1 <= x0 || y1 <= y0) continue;
        for (int c = 0; c < 3; ++c) {
            out.plane(c).block(y0, x0, y1 - y0, x1 - x0).setZero();
        }
    }
    return out;
}

SuperpixelLabels segment_superpixels(const Image& img, int n_segments) {
    if (n_segments < 1) throw ConfigError("n_segments must be >= 1");
    const int w = img.width();
    const int h = img.height();

    // Grid seeding close to the requested segment count.
    const double step = std::sqrt(static_cast<double>(w) * h / n_segments);
    const int gx = std::max(1, static_cast<int>(std::lround(w / step)));
    const int gy = std::max(1, static_cast<int>(std::lround(h / step)));
    const int k = gx * gy;

    struct Center {
        double x, y, r, g, b;
        double nx, ny, nr, ng, nb;
        std::int64_t count;
    };
    std::vector<Center> centers(static_cast<std::size_t>(k));
    for (int j = 0; j < gy; ++j) {
        for (int i = 0; i < gx; ++i) {
            Center& c = centers[static_cast<std::size_t>(j * gx + i)];
            c.x = (i + 0.5) * w / gx;
            c.y = (j + 0.5) * h / gy;
            const int px = std::clamp(static_cast<int>(c.x), 0, w - 1);
            const int py = std::clamp(static_cast<int>(c.y), 0, h - 1);
            c.r = img.at(px, py, 0);
            c.g = img.at(px, py, 1);
            c.b = img.at(px, py, 2);
        }
    }

    SuperpixelLabels out;
    out.labels.resize(h, w);
    out.segment_count = k;

    const double sx = static_cast<double>(w) / gx;
    const double sy = static_cast<double>(h) / gy;
    const double compactness = 0.5; // weight of spatial distance vs color

    for (int iter = 0; iter < 3; ++iter) {
        Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
            best(h, w);
        best.setConstant(std::numeric_limits<double>::max());
        out.labels.setConstant(-1);

        for (int ci = 0; ci < k; ++ci) {
            const Center& c = centers[static_cast<std::size_t>(ci)];
            const int x0 = std::max(0, static_cast<int>(c.x - sx));
            const int x1 = std::min(w - 1, static_cast<int>(c.x + sx));
            const int y0 = std::max(0, static_cast<int>(c.y - sy));
            const int y1 = std::min(h - 1, static_cast<int>(c.y + sy));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const double dr = img.at(x, y, 0) - c.r;
                    const double dg = img.at(x, y, 1) - c.g;
                    const double db = img.at(x, y, 2) - c.b;
                    const double dx = (x + 0.5 - c.x) / sx;
                    const double dy = (y + 0.5 - c.y) / sy;
                    const double d = dr * dr + dg * dg + db * db +
                                     compactness * (dx * dx + dy * dy);
                    if (d < best(y, x)) {
                        best(y, x) = d;
                        out.labels(y, x) = ci;
                    }
                }
            }
        }

        // Orphans (outside every search window) go to the nearest grid cell.
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (out.labels(y, x) < 0) {
                    const int gi = std::min(gx - 1, static_cast<int>(x / sx));
                    const int gj = std::min(gy - 1, static_cast<int>(y / sy));
                    out.labels(y, x) = gj * gx + gi;
                }
            }
        }

        for (auto& c : centers) {
            c.nx = c.ny = c.nr = c.ng = c.nb = 0.0;
            c.count = 0;
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                Center& c = centers[static_cast<std::size_t>(out.labels(y, x))];
                c.nx += x + 0.5;
                c.ny += y + 0.5;
                c.nr += img.at(x, y, 0);
                c.ng += img.at(x, y, 1);
                c.nb += img.at(x, y, 2);
                ++c.count;
            }
        }
        for (auto& c : centers) {
            if (c.count == 0) continue;
            const double n = static_cast<double>(c.count);
            c.x = c.nx / n;
            c.y = c.ny / n;
            c.r = c.nr / n;
            c.g = c.ng / n;
            c.b = c.nb / n;
        }
    }
    return out;
}

Image apply_super_pixels(const Image& img, const ParamSet& params,
                         RngStream& rng) {
    validate_params(AugmentationKind::super_pixels, params);
    const int n_segments = static_cast<int>(param(params, "n_segments"));
    const double replace_prob = param(params, "replace_prob");

    const SuperpixelLabels seg = segment_superpixels(img, n_segments);
    const int k = seg.segment_count;
    const int w = img.width();
    const int h = img.height();

    std::vector<double> sum_r(static_cast<std::size_t>(k), 0.0);
    std::vector<double> sum_g(static_cast<std::size_t>(k), 0.0);
    std::vector<double> sum_b(static_cast<std::size_t>(k), 0.0);
    std::vector<std::int64_t> count(static_cast<std::size_t>(k), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto ci = static_cast<std::size_t>(seg.labels(y, x));
            sum_r[ci] += img.at(x, y, 0);
            sum_g[ci] += img.at(x, y, 1);
            sum_b[ci] += img.at(x, y, 2);
            ++count[ci];
        }
    }

    // One replacement draw per cell, in cell order.
    std::vector<std::uint8_t> replace(static_cast<std::size_t>(k), 0);
    for (int ci = 0; ci < k; ++ci) {
        replace[static_cast<std::size_t>(ci)] = rng.bernoulli(replace_prob) ? 1 : 0;
    }

    Image out = img;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto ci = static_cast<std::size_t>(seg.labels(y, x));
            if (!replace[ci] || count[ci] == 0) continue;
            const double n = static_cast<double>(count[ci]);
            out.at(x, y, 0) = static_cast<Scalar>(sum_r[ci] / n);
            out.at(x, y, 1) = static_cast<Scalar>(sum_g[ci] / n);
            out.at(x, y, 2) = static_cast<Scalar>(sum_b[ci] / n);
        }
    }
    out.clamp01();
    return out;
}

} // namespace augforge::augment
