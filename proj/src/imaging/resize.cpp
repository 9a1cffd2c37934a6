#include "augforge/imaging/resize.hpp"

#include "augforge/error.hpp"

#include <cmath>

namespace augforge::imaging {

Image resize_bilinear(const Image& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw ConfigError("resize target must be at least 1x1");
    }
    const int sw = img.width();
    const int sh = img.height();
    if (sw == out_w && sh == out_h) return img;

    const double sx = static_cast<double>(sw) / out_w;
    const double sy = static_cast<double>(sh) / out_h;

    Image out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, sh - 1);
        const int y1 = std::min(y0 + 1, sh - 1);
        const Scalar wy = static_cast<Scalar>(std::clamp(fy - y0, 0.0, 1.0));
        for (int x = 0; x < out_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, sw - 1);
            const int x1 = std::min(x0 + 1, sw - 1);
            const Scalar wx = static_cast<Scalar>(std::clamp(fx - x0, 0.0, 1.0));
            for (int c = 0; c < 3; ++c) {
                const Scalar top = img.at(x0, y0, c) * (Scalar(1) - wx) +
                                   img.at(x1, y0, c) * wx;
                const Scalar bot = img.at(x0, y1, c) * (Scalar(1) - wx) +
                                   img.at(x1, y1, c) * wx;
                out.at(x, y, c) = top * (Scalar(1) - wy) + bot * wy;
            }
        }
    }
    return out;
}

Mask resize_nearest(const Mask& mask, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw ConfigError("resize target must be at least 1x1");
    }
    const int sw = mask.width();
    const int sh = mask.height();
    if (sw == out_w && sh == out_h) return mask;

    const double sx = static_cast<double>(sw) / out_w;
    const double sy = static_cast<double>(sh) / out_h;

    MaskPlane out(out_h, out_w);
    for (int y = 0; y < out_h; ++y) {
        const int syi = std::clamp(
            static_cast<int>(std::floor((y + 0.5) * sy)), 0, sh - 1);
        for (int x = 0; x < out_w; ++x) {
            const int sxi = std::clamp(
                static_cast<int>(std::floor((x + 0.5) * sx)), 0, sw - 1);
            out(y, x) = mask.at(sxi, syi) ? 1 : 0;
        }
    }
    return Mask(std::move(out));
}

Image crop(const Image& img, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > img.width() ||
        y0 + h > img.height()) {
        throw ConfigError("crop window outside the frame");
    }
    Image out(w, h);
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = img.plane(c).block(y0, x0, h, w);
    }
    return out;
}

Mask crop(const Mask& mask, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > mask.width() ||
        y0 + h > mask.height()) {
        throw ConfigError("crop window outside the frame");
    }
    MaskPlane out = mask.data().block(y0, x0, h, w);
    return Mask(std::move(out));
}

} // namespace augforge::imaging
