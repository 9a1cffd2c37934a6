#pragma once

#include "augforge/eval/metrics.hpp"
#include "augforge/imaging/rng.hpp"
#include "augforge/imaging/types.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using augforge::imaging::BBox;
using augforge::imaging::Image;
using augforge::imaging::Mask;
using augforge::imaging::RngStream;
using augforge::imaging::Sample;
using augforge::imaging::Scalar;

inline Image random_image(RngStream& rng, int w, int h, Scalar lo = 0,
                          Scalar hi = 1) {
    Image img(w, h);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                img.at(x, y, c) = static_cast<Scalar>(rng.uniform(lo, hi));
            }
        }
    }
    return img;
}

/// Synthetic sample with an integer box and a mask that exactly fills it.
inline Sample box_filled_sample(RngStream& rng, int w, int h, int min_side = 4) {
    Sample s;
    s.id = "synthetic";
    s.image = random_image(rng, w, h);
    const int bw = static_cast<int>(
        rng.uniform_int(min_side, std::max(min_side, w / 2)));
    const int bh = static_cast<int>(
        rng.uniform_int(min_side, std::max(min_side, h / 2)));
    const int x0 = static_cast<int>(rng.uniform_int(0, w - bw));
    const int y0 = static_cast<int>(rng.uniform_int(0, h - bh));
    Mask mask(w, h, 0);
    for (int y = y0; y < y0 + bh; ++y) {
        for (int x = x0; x < x0 + bw; ++x) mask.set(x, y, true);
    }
    s.mask = std::move(mask);
    s.boxes.push_back({static_cast<double>(x0), static_cast<double>(y0),
                       static_cast<double>(x0 + bw), static_cast<double>(y0 + bh),
                       0});
    return s;
}

/// Axis-aligned hull of mask foreground pixels in pixel-extent coordinates,
/// or an invalid box when the mask is empty.
inline BBox mask_hull(const Mask& mask) {
    int min_x = mask.width(), max_x = -1, min_y = mask.height(), max_y = -1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
        }
    }
    if (max_x < 0) return {};
    return {static_cast<double>(min_x), static_cast<double>(min_y),
            static_cast<double>(max_x + 1), static_cast<double>(max_y + 1), 0};
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("augforge-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Independent naive PR-curve evaluator. Deliberately straightforward: greedy
// matching re-coded from the metric definition and the 101 interpolation
// points each computed by a full scan over ranks.
// ---------------------------------------------------------------------------

inline double naive_average_precision(const augforge::eval::GroundTruthSet& gt,
                                      const augforge::eval::DetectionSet& det,
                                      int class_id, double threshold) {
    using augforge::eval::Detection;
    using augforge::eval::GtImage;

    std::int64_t n_gt = 0;
    for (const GtImage& img : gt.images()) {
        for (const BBox& b : img.boxes) {
            if (b.class_id == class_id) ++n_gt;
        }
    }
    if (n_gt == 0) return 0.0;

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < det.detections().size(); ++i) {
        if (det.detections()[i].box.class_id == class_id) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Detection& da = det.detections()[a];
        const Detection& db = det.detections()[b];
        if (da.score != db.score) return da.score > db.score;
        if (da.image_id != db.image_id) return da.image_id < db.image_id;
        return a < b;
    });

    std::map<std::string, std::vector<bool>> used;
    for (const GtImage& img : gt.images()) {
        used[img.id] = std::vector<bool>(img.boxes.size(), false);
    }
    std::vector<double> precision, recall;
    std::int64_t tp = 0;
    std::int64_t seen = 0;
    for (const std::size_t i : order) {
        const Detection& d = det.detections()[i];
        const GtImage* img = gt.find(d.image_id);
        double best = 0.0;
        std::ptrdiff_t best_g = -1;
        for (std::size_t g = 0; g < img->boxes.size(); ++g) {
            if (used[img->id][g] || img->boxes[g].class_id != class_id) continue;
            const double overlap = augforge::eval::iou(d.box, img->boxes[g]);
            if (overlap > best) {
                best = overlap;
                best_g = static_cast<std::ptrdiff_t>(g);
            }
        }
        if (best_g >= 0 && best >= threshold) {
            used[img->id][static_cast<std::size_t>(best_g)] = true;
            ++tp;
        }
        ++seen;
        precision.push_back(static_cast<double>(tp) / static_cast<double>(seen));
        recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
    }

    double total = 0.0;
    for (int r = 0; r <= 100; ++r) {
        const double target = r / 100.0;
        double best_prec = 0.0;
        for (std::size_t k = 0; k < precision.size(); ++k) {
            if (recall[k] >= target) best_prec = std::max(best_prec, precision[k]);
        }
        total += best_prec;
    }
    return total / 101.0;
}

struct NaiveMetrics {
    double map = 0.0;
    double map50 = 0.0;
    double map75 = 0.0;
};

inline NaiveMetrics naive_evaluate(const augforge::eval::GroundTruthSet& gt,
                                   const augforge::eval::DetectionSet& det) {
    NaiveMetrics out;
    const std::vector<int> classes = gt.class_ids();
    for (const int c : classes) {
        for (int i = 0; i < 10; ++i) {
            out.map += naive_average_precision(gt, det, c, 0.50 + 0.05 * i);
        }
        out.map50 += naive_average_precision(gt, det, c, 0.50);
        out.map75 += naive_average_precision(gt, det, c, 0.75);
    }
    const auto nc = static_cast<double>(classes.size());
    out.map /= nc * 10.0;
    out.map50 /= nc;
    out.map75 /= nc;
    return out;
}

/// Randomized detection fixture shared by the eval tests and the acceptance
/// suite: per ground-truth box a jittered detection with probability
/// hit_rate, plus a few false positives per image.
inline void random_detection_fixture(RngStream& rng, int n_images,
                                     augforge::eval::GroundTruthSet& gt,
                                     augforge::eval::DetectionSet& det,
                                     int n_classes = 2, double hit_rate = 0.8) {
    for (int i = 0; i < n_images; ++i) {
        augforge::eval::GtImage img;
        img.id = "img" + std::to_string(i);
        img.width = 100;
        img.height = 100;
        img.subset = i % 2 == 0 ? "lightbox" : "sunlamp";
        const int n_boxes = static_cast<int>(rng.uniform_int(1, 3));
        for (int b = 0; b < n_boxes; ++b) {
            const double x0 = rng.uniform(0.0, 70.0);
            const double y0 = rng.uniform(0.0, 70.0);
            const double w = rng.uniform(8.0, 28.0);
            const double h = rng.uniform(8.0, 28.0);
            img.boxes.push_back(
                {x0, y0, x0 + w, y0 + h,
                 static_cast<int>(rng.uniform_int(0, n_classes - 1))});
        }
        gt.add_image(img);

        for (const BBox& b : img.boxes) {
            if (rng.uniform() < hit_rate) {
                const double jx = rng.uniform(-4.0, 4.0);
                const double jy = rng.uniform(-4.0, 4.0);
                augforge::eval::Detection d;
                d.image_id = img.id;
                d.box = {b.x_min + jx, b.y_min + jy, b.x_max + jx, b.y_max + jy,
                         b.class_id};
                d.score = rng.uniform(0.05, 1.0);
                det.add(d);
            }
        }
        const int n_fp = static_cast<int>(rng.uniform_int(0, 2));
        for (int f = 0; f < n_fp; ++f) {
            const double x0 = rng.uniform(0.0, 80.0);
            const double y0 = rng.uniform(0.0, 80.0);
            augforge::eval::Detection d;
            d.image_id = img.id;
            d.box = {x0, y0, x0 + rng.uniform(5.0, 18.0),
                     y0 + rng.uniform(5.0, 18.0),
                     static_cast<int>(rng.uniform_int(0, n_classes - 1))};
            d.score = rng.uniform(0.05, 1.0);
            det.add(d);
        }
    }
}

// ---------------------------------------------------------------------------
// Brute-force functional-ANOVA over a fully enumerated binary space.
// ---------------------------------------------------------------------------

/// First-order variance fractions of fn over the uniform distribution on
/// {0,1}^d, from the full truth table.
inline std::vector<double> enumerated_first_order_fractions(
    const std::function<double(const std::vector<std::uint8_t>&)>& fn, int d) {
    const std::size_t n = std::size_t{1} << d;
    std::vector<double> values(n);
    std::vector<std::uint8_t> x(static_cast<std::size_t>(d));
    for (std::size_t m = 0; m < n; ++m) {
        for (int f = 0; f < d; ++f) x[static_cast<std::size_t>(f)] = (m >> f) & 1;
        values[m] = fn(x);
    }
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(n);
    double total_var = 0.0;
    for (const double v : values) total_var += (v - mean) * (v - mean);
    total_var /= static_cast<double>(n);

    std::vector<double> fractions(static_cast<std::size_t>(d), 0.0);
    if (total_var <= 0.0) return fractions;
    for (int f = 0; f < d; ++f) {
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            ((m >> f) & 1 ? m1 : m0) += values[m];
        }
        m0 /= static_cast<double>(n / 2);
        m1 /= static_cast<double>(n / 2);
        const double var_f =
            ((m0 - mean) * (m0 - mean) + (m1 - mean) * (m1 - mean)) / 2.0;
        fractions[static_cast<std::size_t>(f)] = var_f / total_var;
    }
    return fractions;
}

} // namespace testutil
