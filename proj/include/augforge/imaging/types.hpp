#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace augforge::imaging {

using Scalar = float;
/// One image channel, indexed (row, col) = (y, x).
using Plane =
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskPlane =
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Three-channel raster with values in [0, 1], stored as planar Eigen arrays.
class Image {
public:
    Image() = default;

    Image(int width, int height, Scalar fill = Scalar(0)) {
        for (auto& p : planes_) p = Plane::Constant(height, width, fill);
    }

    static Image from_planes(Plane r, Plane g, Plane b) {
        Image img;
        img.planes_ = {std::move(r), std::move(g), std::move(b)};
        return img;
    }

    int width() const { return static_cast<int>(planes_[0].cols()); }
    int height() const { return static_cast<int>(planes_[0].rows()); }

    Plane& plane(int c) { return planes_[static_cast<std::size_t>(c)]; }
    const Plane& plane(int c) const {
        return planes_[static_cast<std::size_t>(c)];
    }

    Scalar& at(int x, int y, int c) {
        return planes_[static_cast<std::size_t>(c)](y, x);
    }
    Scalar at(int x, int y, int c) const {
        return planes_[static_cast<std::size_t>(c)](y, x);
    }

    /// Clamp every channel into [0, 1] in place.
    void clamp01() {
        for (auto& p : planes_)
            p = p.min(Scalar(1)).max(Scalar(0));
    }

    bool same_size(const Image& other) const {
        return width() == other.width() && height() == other.height();
    }

private:
    std::array<Plane, 3> planes_;
};

/// Binary foreground mask dimension-matched to its image; 1 = foreground.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, std::uint8_t fill = 0)
        : data_(MaskPlane::Constant(height, width, fill ? 1 : 0)) {}

    explicit Mask(MaskPlane data) : data_(std::move(data)) {
        data_ = (data_ != 0).cast<std::uint8_t>();
    }

    int width() const { return static_cast<int>(data_.cols()); }
    int height() const { return static_cast<int>(data_.rows()); }

    bool at(int x, int y) const { return data_(y, x) != 0; }
    void set(int x, int y, bool fg) { data_(y, x) = fg ? 1 : 0; }

    MaskPlane& data() { return data_; }
    const MaskPlane& data() const { return data_; }

    std::int64_t foreground_count() const {
        return (data_ != 0).count();
    }

private:
    MaskPlane data_;
};

/// Axis-aligned box with half-open float coordinates:
/// pixel area = (x_max - x_min) * (y_max - y_min).
struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    int class_id = 0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool valid() const { return x_min < x_max && y_min < y_max; }

    BBox clipped(double frame_w, double frame_h) const {
        BBox b = *this;
        b.x_min = std::clamp(b.x_min, 0.0, frame_w);
        b.x_max = std::clamp(b.x_max, 0.0, frame_w);
        b.y_min = std::clamp(b.y_min, 0.0, frame_h);
        b.y_max = std::clamp(b.y_max, 0.0, frame_h);
        return b;
    }
};

/// The unit every augmentation transforms: image + optional mask + boxes.
struct Sample {
    Image image;
    std::optional<Mask> mask;
    std::vector<BBox> boxes;
    std::string id;
};

/// Rec. 601 luma; the scalar brightness used across the project.
inline Plane luminance(const Image& img) {
    return Scalar(0.299) * img.plane(0) + Scalar(0.587) * img.plane(1) +
           Scalar(0.114) * img.plane(2);
}

inline bool images_equal(const Image& a, const Image& b) {
    if (!a.same_size(b)) return false;
    for (int c = 0; c < 3; ++c)
        if (!(a.plane(c) == b.plane(c)).all()) return false;
    return true;
}

inline bool masks_equal(const Mask& a, const Mask& b) {
    if (a.width() != b.width() || a.height() != b.height()) return false;
    return (a.data() == b.data()).all();
}

} // namespace augforge::imaging
