#include "augforge/augment/ops.hpp"

#include "augforge/error.hpp"

#include <cmath>

namespace augforge::augment {

namespace {

struct Hsv {
    Scalar h; // degrees in [0, 360)
    Scalar s;
    Scalar v;
};

Hsv rgb_to_hsv(Scalar r, Scalar g, Scalar b) {
    const Scalar mx = std::max({r, g, b});
    const Scalar mn = std::min({r, g, b});
    const Scalar d = mx - mn;
    Hsv out{0, 0, mx};
    if (d > Scalar(0)) {
        if (mx == r) {
            out.h = Scalar(60) * std::fmod((g - b) / d + Scalar(6), Scalar(6));
        } else if (mx == g) {
            out.h = Scalar(60) * ((b - r) / d + Scalar(2));
        } else {
            out.h = Scalar(60) * ((r - g) / d + Scalar(4));
        }
        if (mx > Scalar(0)) out.s = d / mx;
    }
    return out;
}

void hsv_to_rgb(const Hsv& in, Scalar& r, Scalar& g, Scalar& b) {
    const Scalar c = in.v * in.s;
    const Scalar hp = in.h / Scalar(60);
    const Scalar x = c * (Scalar(1) - std::abs(std::fmod(hp, Scalar(2)) - Scalar(1)));
    const Scalar m = in.v - c;
    Scalar rp = 0, gp = 0, bp = 0;
    if (hp < 1) {
        rp = c, gp = x;
    } else if (hp < 2) {
        rp = x, gp = c;
    } else if (hp < 3) {
        gp = c, bp = x;
    } else if (hp < 4) {
        gp = x, bp = c;
    } else if (hp < 5) {
        rp = x, bp = c;
    } else {
        rp = c, bp = x;
    }
    r = rp + m;
    g = gp + m;
    b = bp + m;
}

template <typename Fn>
Image per_pixel_hsv(const Image& img, Fn&& fn) {
    Image out = img;
    const int w = img.width();
    const int h = img.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Hsv hsv = rgb_to_hsv(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
            fn(hsv);
            hsv.s = std::clamp(hsv.s, Scalar(0), Scalar(1));
            hsv.v = std::clamp(hsv.v, Scalar(0), Scalar(1));
            hsv_to_rgb(hsv, out.at(x, y, 0), out.at(x, y, 1), out.at(x, y, 2));
        }
    }
    out.clamp01();
    return out;
}

Image gray_image(const Image& img) {
    const Plane lum = imaging::luminance(img);
    return Image::from_planes(lum, lum, lum);
}

} // namespace

Image add_value_core(const Image& img, const std::array<Scalar, 3>& deltas) {
    Image out = img;
    for (int c = 0; c < 3; ++c) out.plane(c) += deltas[static_cast<std::size_t>(c)];
    out.clamp01();
    return out;
}

Image invert_core(const Image& img, const std::array<bool, 3>& channels) {
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        if (channels[static_cast<std::size_t>(c)]) {
            out.plane(c) = Scalar(1) - out.plane(c);
        }
    }
    return out;
}

Image multiply_core(const Image& img, const std::array<Scalar, 3>& factors) {
    Image out = img;
    for (int c = 0; c < 3; ++c) out.plane(c) *= factors[static_cast<std::size_t>(c)];
    out.clamp01();
    return out;
}

Image multiply_brightness_core(const Image& img, Scalar factor) {
    return per_pixel_hsv(img, [factor](Hsv& hsv) { hsv.v *= factor; });
}

Image saturate_severity_core(const Image& img, int severity) {
    if (severity < 1 || severity > 2) {
        throw ConfigError("saturate severity must be 1 or 2");
    }
    // Severity scale of the corruption benchmark: S *= {0.3, 0.1}.
    const Scalar scale = severity == 1 ? Scalar(0.3) : Scalar(0.1);
    return per_pixel_hsv(img, [scale](Hsv& hsv) { hsv.s *= scale; });
}

Image enhance_color_core(const Image& img, Scalar strength) {
    // strength 0 = grayscale, 1 = identity, >1 = oversaturated.
    const Image gray = gray_image(img);
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = gray.plane(c) + strength * (img.plane(c) - gray.plane(c));
    }
    out.clamp01();
    return out;
}

Image grayscale_core(const Image& img, Scalar alpha) {
    const Image gray = gray_image(img);
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = (Scalar(1) - alpha) * img.plane(c) + alpha * gray.plane(c);
    }
    out.clamp01();
    return out;
}

Image contrast_severity_core(const Image& img, int severity) {
    if (severity < 1 || severity > 2) {
        throw ConfigError("contrast severity must be 1 or 2");
    }
    // Severity scale of the corruption benchmark: x = (x - mean_c) * c + mean_c
    // with per-channel means and c = {0.4, 0.3}.
    const Scalar c = severity == 1 ? Scalar(0.4) : Scalar(0.3);
    Image out = img;
    for (int ch = 0; ch < 3; ++ch) {
        const Scalar mean = img.plane(ch).mean();
        out.plane(ch) = (img.plane(ch) - mean) * c + mean;
    }
    out.clamp01();
    return out;
}

Image linear_contrast_core(const Image& img, Scalar strength) {
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = Scalar(0.5) + strength * (img.plane(c) - Scalar(0.5));
    }
    out.clamp01();
    return out;
}

Image enhance_contrast_core(const Image& img, Scalar strength) {
    // Pull toward / push away from the scalar mean luminance.
    const Scalar mean = imaging::luminance(img).mean();
    Image out = img;
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = mean + strength * (img.plane(c) - mean);
    }
    out.clamp01();
    return out;
}

Image enhance_brightness_core(const Image& img, Scalar strength) {
    Image out = img;
    for (int c = 0; c < 3; ++c) out.plane(c) *= strength;
    out.clamp01();
    return out;
}

} // namespace augforge::augment
