#include "augforge/augment/ops.hpp"

#include "augforge/error.hpp"
#include "augforge/imaging/resize.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace augforge::augment {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Rotation {
    double cx, cy;  // center of rotation
    double cos_t, sin_t;

    // Forward map: on a square frame, +90 degrees sends (x, y) to (y, w - x).
    void forward(double x, double y, double& ox, double& oy) const {
        const double dx = x - cx;
        const double dy = y - cy;
        ox = cx + cos_t * dx + sin_t * dy;
        oy = cy - sin_t * dx + cos_t * dy;
    }

    void inverse(double x, double y, double& ox, double& oy) const {
        const double dx = x - cx;
        const double dy = y - cy;
        ox = cx + cos_t * dx - sin_t * dy;
        oy = cy + sin_t * dx + cos_t * dy;
    }
};

/// Sutherland-Hodgman clip of a convex polygon against the frame
/// [0, w] x [0, h].
std::vector<std::array<double, 2>> clip_to_frame(
    std::vector<std::array<double, 2>> poly, double w, double h) {
    struct HalfPlane {
        int axis;
        double bound;
        bool keep_below;
    };
    const HalfPlane planes[4] = {
        {0, 0.0, false}, {0, w, true}, {1, 0.0, false}, {1, h, true}};
    for (const HalfPlane& hp : planes) {
        if (poly.empty()) break;
        std::vector<std::array<double, 2>> next;
        const auto inside = [&](const std::array<double, 2>& p) {
            return hp.keep_below ? p[static_cast<std::size_t>(hp.axis)] <= hp.bound
                                 : p[static_cast<std::size_t>(hp.axis)] >= hp.bound;
        };
        const auto intersect = [&](const std::array<double, 2>& a,
                                   const std::array<double, 2>& b) {
            const auto ax = static_cast<std::size_t>(hp.axis);
            const double t = (hp.bound - a[ax]) / (b[ax] - a[ax]);
            std::array<double, 2> p;
            p[ax] = hp.bound;
            p[1 - ax] = a[1 - ax] + t * (b[1 - ax] - a[1 - ax]);
            return p;
        };
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const auto& cur = poly[i];
            const auto& prev = poly[(i + poly.size() - 1) % poly.size()];
            if (inside(cur)) {
                if (!inside(prev)) next.push_back(intersect(prev, cur));
                next.push_back(cur);
            } else if (inside(prev)) {
                next.push_back(intersect(prev, cur));
            }
        }
        poly = std::move(next);
    }
    return poly;
}

Scalar sample_bilinear_zero(const Plane& p, double x, double y) {
    // Pixel (i, j) has its center at (i + 0.5, j + 0.5); outside is zero.
    const double fx = x - 0.5;
    const double fy = y - 0.5;
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double wx = fx - x0;
    const double wy = fy - y0;
    const int w = static_cast<int>(p.cols());
    const int h = static_cast<int>(p.rows());

    auto tap = [&](int xi, int yi) -> double {
        if (xi < 0 || xi >= w || yi < 0 || yi >= h) return 0.0;
        return static_cast<double>(p(yi, xi));
    };
    const double top = tap(x0, y0) * (1.0 - wx) + tap(x0 + 1, y0) * wx;
    const double bot = tap(x0, y0 + 1) * (1.0 - wx) + tap(x0 + 1, y0 + 1) * wx;
    return static_cast<Scalar>(top * (1.0 - wy) + bot * wy);
}

} // namespace

Sample rotate_sample(const Sample& s, double angle_deg) {
    const int w = s.image.width();
    const int h = s.image.height();

    Sample out = s;
    if (angle_deg == 0.0) return out;

    const double theta = angle_deg * kPi / 180.0;
    const Rotation rot{w / 2.0, h / 2.0, std::cos(theta), std::sin(theta)};

    Image img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sx, sy;
            rot.inverse(x + 0.5, y + 0.5, sx, sy);
            for (int c = 0; c < 3; ++c) {
                img.at(x, y, c) = sample_bilinear_zero(s.image.plane(c), sx, sy);
            }
        }
    }
    img.clamp01();
    out.image = std::move(img);

    if (s.mask) {
        Mask mask(w, h, 0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double sx, sy;
                rot.inverse(x + 0.5, y + 0.5, sx, sy);
                const int xi = static_cast<int>(std::floor(sx));
                const int yi = static_cast<int>(std::floor(sy));
                if (xi >= 0 && xi < w && yi >= 0 && yi < h) {
                    mask.set(x, y, s.mask->at(xi, yi));
                }
            }
        }
        out.mask = std::move(mask);
    }

    out.boxes.clear();
    for (const imaging::BBox& b : s.boxes) {
        // Rotate the box outline, clip the quad against the frame, and take
        // the hull of what remains visible. Corners that leave the frame do
        // not inflate the box.
        std::vector<std::array<double, 2>> quad = {{b.x_min, b.y_min},
                                                   {b.x_max, b.y_min},
                                                   {b.x_max, b.y_max},
                                                   {b.x_min, b.y_max}};
        for (auto& p : quad) {
            double ox, oy;
            rot.forward(p[0], p[1], ox, oy);
            p = {ox, oy};
        }
        const auto visible = clip_to_frame(std::move(quad), w, h);
        if (visible.empty()) continue;
        imaging::BBox nb;
        nb.class_id = b.class_id;
        nb.x_min = nb.y_min = std::numeric_limits<double>::max();
        nb.x_max = nb.y_max = std::numeric_limits<double>::lowest();
        for (const auto& p : visible) {
            nb.x_min = std::min(nb.x_min, p[0]);
            nb.y_min = std::min(nb.y_min, p[1]);
            nb.x_max = std::max(nb.x_max, p[0]);
            nb.y_max = std::max(nb.y_max, p[1]);
        }
        if (nb.valid()) out.boxes.push_back(nb);
    }
    return out;
}

Sample crop_resize_sample(const Sample& s, int x0, int y0, int crop_w,
                          int crop_h) {
    const int w = s.image.width();
    const int h = s.image.height();
    if (x0 == 0 && y0 == 0 && crop_w == w && crop_h == h) return s;

    Sample out = s;
    out.image = imaging::resize_bilinear(
        imaging::crop(s.image, x0, y0, crop_w, crop_h), w, h);
    if (s.mask) {
        out.mask = imaging::resize_nearest(
            imaging::crop(*s.mask, x0, y0, crop_w, crop_h), w, h);
    }

    const double sx = static_cast<double>(w) / crop_w;
    const double sy = static_cast<double>(h) / crop_h;
    out.boxes.clear();
    for (const imaging::BBox& b : s.boxes) {
        imaging::BBox nb;
        nb.class_id = b.class_id;
        nb.x_min = (b.x_min - x0) * sx;
        nb.x_max = (b.x_max - x0) * sx;
        nb.y_min = (b.y_min - y0) * sy;
        nb.y_max = (b.y_max - y0) * sy;
        nb = nb.clipped(w, h);
        if (nb.valid()) out.boxes.push_back(nb);
    }
    return out;
}

Sample apply_affine(const Sample& s, const ParamSet& params, RngStream& rng) {
    validate_params(AugmentationKind::affine, params);
    const double lo = param(params, "rotation_min_deg");
    const double hi = param(params, "rotation_max_deg");
    const double angle = rng.uniform(lo, hi);
    return rotate_sample(s, angle);
}

Sample apply_random_crop(const Sample& s, const ParamSet& params,
                         RngStream& rng) {
    validate_params(AugmentationKind::random_crop, params);
    if (s.boxes.empty()) {
        throw ConfigError("random_crop needs at least one box to protect");
    }
    const double min_visible = param(params, "min_visible");
    const double scale_lo = param(params, "scale_min");
    const double scale_hi = param(params, "scale_max");
    const int w = s.image.width();
    const int h = s.image.height();

    for (int attempt = 0; attempt < 20; ++attempt) {
        const double scale = rng.uniform(scale_lo, scale_hi);
        const int cw = std::clamp(static_cast<int>(std::lround(scale * w)), 1, w);
        const int ch = std::clamp(static_cast<int>(std::lround(scale * h)), 1, h);
        const int x0 = static_cast<int>(rng.uniform_int(0, w - cw));
        const int y0 = static_cast<int>(rng.uniform_int(0, h - ch));

        bool ok = true;
        for (const imaging::BBox& b : s.boxes) {
            const double ix = std::max(0.0, std::min(b.x_max, static_cast<double>(x0 + cw)) -
                                                std::max(b.x_min, static_cast<double>(x0)));
            const double iy = std::max(0.0, std::min(b.y_max, static_cast<double>(y0 + ch)) -
                                                std::max(b.y_min, static_cast<double>(y0)));
            const double visible = b.area() > 0.0 ? (ix * iy) / b.area() : 0.0;
            if (visible < min_visible) {
                ok = false;
                break;
            }
        }
        if (ok) return crop_resize_sample(s, x0, y0, cw, ch);
    }
    return s; // no acceptable window; the chain stays total
}

Sample apply_background(const Sample& s, const Image& pool_image) {
    if (!s.mask) {
        throw ConfigError("background replacement needs a foreground mask");
    }
    const int w = s.image.width();
    const int h = s.image.height();
    const Image bg = imaging::resize_bilinear(pool_image, w, h);

    Sample out = s;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!s.mask->at(x, y)) {
                for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = bg.at(x, y, c);
            }
        }
    }
    return out;
}

} // namespace augforge::augment
