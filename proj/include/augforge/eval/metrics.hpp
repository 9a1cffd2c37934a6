#pragma once

#include "augforge/imaging/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace augforge::eval {

using imaging::BBox;

/// One scored box proposed by a detector.
struct Detection {
    std::string image_id;
    BBox box;
    double score = 0.0;
};

struct GtImage {
    std::string id;
    int width = 0;
    int height = 0;
    std::string subset; // empty = untagged
    std::vector<BBox> boxes;
};

class GroundTruthSet {
public:
    void add_image(GtImage image);

    static GroundTruthSet from_json(const nlohmann::json& doc);
    static GroundTruthSet load(const std::filesystem::path& path);
    nlohmann::ordered_json to_json() const;

    const std::vector<GtImage>& images() const { return images_; }
    const GtImage* find(const std::string& id) const;
    bool empty() const { return images_.empty(); }

    /// Sorted unique class ids over all boxes.
    std::vector<int> class_ids() const;

private:
    std::vector<GtImage> images_;
    std::map<std::string, std::size_t> index_;
};

class DetectionSet {
public:
    void add(Detection det);

    static DetectionSet from_json(const nlohmann::json& doc);
    static DetectionSet load(const std::filesystem::path& path);
    nlohmann::ordered_json to_json() const;

    const std::vector<Detection>& detections() const { return detections_; }

private:
    std::vector<Detection> detections_;
};

struct MetricsReport {
    double map = 0.0;      // mean AP over classes x thresholds 0.50..0.95
    double map50 = 0.0;    // single threshold 0.50
    double map75 = 0.0;    // single threshold 0.75
    double mean_iou = 0.0; // mean IoU of TP matches at threshold 0.50
    std::map<std::string, double> subset_map;

    nlohmann::ordered_json to_json() const;
};

/// Intersection over union; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

/// 101-point interpolated average precision for one class at one IoU
/// threshold. Detections sort by descending score (ties by image_id, then
/// insertion order) and greedily consume the unmatched ground-truth box with
/// the highest IoU.
double average_precision(const GroundTruthSet& gt, const DetectionSet& det,
                         int class_id, double threshold);

/// Full report over the 10 thresholds {0.50, 0.55, ..., 0.95}; per-subset
/// mAP computed by restricting both sets to the tagged images.
MetricsReport evaluate(const GroundTruthSet& gt, const DetectionSet& det);

} // namespace augforge::eval
