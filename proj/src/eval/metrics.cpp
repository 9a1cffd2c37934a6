#include "augforge/eval/metrics.hpp"

#include "augforge/error.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

namespace augforge::eval {

namespace {

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return doc;
}

BBox box_from_json(const nlohmann::json& j) {
    BBox b;
    b.x_min = j.at("x_min").get<double>();
    b.y_min = j.at("y_min").get<double>();
    b.x_max = j.at("x_max").get<double>();
    b.y_max = j.at("y_max").get<double>();
    b.class_id = j.value("class_id", 0);
    if (!b.valid()) {
        throw ConfigError("degenerate box (x_min >= x_max or y_min >= y_max)");
    }
    return b;
}

nlohmann::ordered_json box_to_json(const BBox& b) {
    return nlohmann::ordered_json{{"x_min", b.x_min}, {"y_min", b.y_min},
                                  {"x_max", b.x_max}, {"y_max", b.y_max},
                                  {"class_id", b.class_id}};
}

/// Ranked TP/FP flags for one class at one threshold, plus matched IoUs.
struct MatchResult {
    std::vector<bool> tp;          // per ranked detection
    std::vector<double> match_iou; // one entry per TP
    std::int64_t n_gt = 0;
};

MatchResult match_class(const GroundTruthSet& gt, const DetectionSet& det,
                        int class_id, double threshold) {
    if (threshold <= 0.0 || threshold > 1.0) {
        throw ConfigError("IoU threshold must be in (0, 1]");
    }
    const std::vector<int> classes = gt.class_ids();
    if (std::find(classes.begin(), classes.end(), class_id) == classes.end()) {
        throw EvalError("unknown class id: " + std::to_string(class_id));
    }

    MatchResult result;
    for (const GtImage& img : gt.images()) {
        for (const BBox& b : img.boxes) {
            if (b.class_id == class_id) ++result.n_gt;
        }
    }

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

    // Per-image bookkeeping of already-consumed ground truths.
    std::map<std::string, std::vector<bool>> used;
    for (const GtImage& img : gt.images()) {
        used[img.id] = std::vector<bool>(img.boxes.size(), false);
    }

    result.tp.reserve(order.size());
    for (const std::size_t i : order) {
        const Detection& d = det.detections()[i];
        const GtImage* img = gt.find(d.image_id);
        if (!img) {
            throw EvalError("detection references unknown image_id: " + d.image_id);
        }
        std::vector<bool>& consumed = used[img->id];
        double best_iou = 0.0;
        std::ptrdiff_t best_gt = -1;
        for (std::size_t g = 0; g < img->boxes.size(); ++g) {
            if (consumed[g] || img->boxes[g].class_id != class_id) continue;
            const double overlap = iou(d.box, img->boxes[g]);
            if (overlap > best_iou) {
                best_iou = overlap;
                best_gt = static_cast<std::ptrdiff_t>(g);
            }
        }
        if (best_gt >= 0 && best_iou >= threshold) {
            consumed[static_cast<std::size_t>(best_gt)] = true;
            result.tp.push_back(true);
            result.match_iou.push_back(best_iou);
        } else {
            result.tp.push_back(false);
        }
    }
    return result;
}

double interpolated_ap(const MatchResult& m) {
    if (m.n_gt == 0) return 0.0;
    const std::size_t n = m.tp.size();
    std::vector<double> precision(n), recall(n);
    std::int64_t tp_cum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (m.tp[i]) ++tp_cum;
        precision[i] = static_cast<double>(tp_cum) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp_cum) / static_cast<double>(m.n_gt);
    }
    // Monotone precision envelope from the right.
    for (std::size_t i = n; i-- > 1;) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double total = 0.0;
    std::size_t k = 0;
    for (int r = 0; r <= 100; ++r) {
        const double target = r / 100.0;
        while (k < n && recall[k] < target) ++k;
        if (k < n) total += precision[k];
    }
    return total / 101.0;
}

/// Restriction of both sets to one subset tag.
std::pair<GroundTruthSet, DetectionSet> restrict_to_subset(
    const GroundTruthSet& gt, const DetectionSet& det, const std::string& tag) {
    GroundTruthSet sub_gt;
    std::set<std::string> keep;
    for (const GtImage& img : gt.images()) {
        if (img.subset == tag) {
            sub_gt.add_image(img);
            keep.insert(img.id);
        }
    }
    DetectionSet sub_det;
    for (const Detection& d : det.detections()) {
        if (keep.count(d.image_id)) sub_det.add(d);
    }
    return {std::move(sub_gt), std::move(sub_det)};
}

double mean_ap(const GroundTruthSet& gt, const DetectionSet& det,
               const std::vector<double>& thresholds) {
    const std::vector<int> classes = gt.class_ids();
    if (classes.empty()) return 0.0;
    double total = 0.0;
    for (const int c : classes) {
        for (const double t : thresholds) {
            total += average_precision(gt, det, c, t);
        }
    }
    return total / (static_cast<double>(classes.size()) *
                    static_cast<double>(thresholds.size()));
}

} // namespace

void GroundTruthSet::add_image(GtImage image) {
    if (index_.count(image.id)) {
        throw ConfigError("duplicate image id in ground truth: " + image.id);
    }
    index_[image.id] = images_.size();
    images_.push_back(std::move(image));
}

GroundTruthSet GroundTruthSet::from_json(const nlohmann::json& doc) {
    GroundTruthSet out;
    if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array()) {
        throw ConfigError("ground truth must be {\"images\": [...]}");
    }
    for (const auto& j : doc["images"]) {
        GtImage img;
        img.id = j.at("id").get<std::string>();
        img.width = j.at("width").get<int>();
        img.height = j.at("height").get<int>();
        img.subset = j.value("subset", std::string());
        for (const auto& b : j.value("boxes", nlohmann::json::array())) {
            img.boxes.push_back(box_from_json(b));
        }
        out.add_image(std::move(img));
    }
    return out;
}

GroundTruthSet GroundTruthSet::load(const std::filesystem::path& path) {
    return from_json(load_json(path));
}

nlohmann::ordered_json GroundTruthSet::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const GtImage& img : images_) {
        nlohmann::ordered_json j{{"id", img.id},
                                 {"width", img.width},
                                 {"height", img.height}};
        if (!img.subset.empty()) j["subset"] = img.subset;
        nlohmann::ordered_json boxes = nlohmann::ordered_json::array();
        for (const BBox& b : img.boxes) boxes.push_back(box_to_json(b));
        j["boxes"] = std::move(boxes);
        arr.push_back(std::move(j));
    }
    return nlohmann::ordered_json{{"images", std::move(arr)}};
}

const GtImage* GroundTruthSet::find(const std::string& id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &images_[it->second];
}

std::vector<int> GroundTruthSet::class_ids() const {
    std::set<int> ids;
    for (const GtImage& img : images_) {
        for (const BBox& b : img.boxes) ids.insert(b.class_id);
    }
    return std::vector<int>(ids.begin(), ids.end());
}

void DetectionSet::add(Detection det) {
    if (det.score < 0.0 || det.score > 1.0) {
        throw ConfigError("detection score out of [0,1] for image " +
                          det.image_id);
    }
    if (!det.box.valid()) {
        throw ConfigError("degenerate detection box for image " + det.image_id);
    }
    detections_.push_back(std::move(det));
}

DetectionSet DetectionSet::from_json(const nlohmann::json& doc) {
    DetectionSet out;
    if (!doc.is_object() || !doc.contains("detections") ||
        !doc["detections"].is_array()) {
        throw ConfigError("detections must be {\"detections\": [...]}");
    }
    for (const auto& j : doc["detections"]) {
        Detection d;
        d.image_id = j.at("image_id").get<std::string>();
        d.box = box_from_json(j);
        d.score = j.at("score").get<double>();
        out.add(std::move(d));
    }
    return out;
}

DetectionSet DetectionSet::load(const std::filesystem::path& path) {
    return from_json(load_json(path));
}

nlohmann::ordered_json DetectionSet::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Detection& d : detections_) {
        nlohmann::ordered_json j{{"image_id", d.image_id}};
        j.update(box_to_json(d.box));
        j["score"] = d.score;
        arr.push_back(std::move(j));
    }
    return nlohmann::ordered_json{{"detections", std::move(arr)}};
}

nlohmann::ordered_json MetricsReport::to_json() const {
    nlohmann::ordered_json j{{"mAP", map},
                             {"mAP@50", map50},
                             {"mAP@75", map75},
                             {"mean_iou", mean_iou}};
    if (!subset_map.empty()) j["subsets"] = subset_map;
    return j;
}

double iou(const BBox& a, const BBox& b) {
    const double ix = std::max(0.0, std::min(a.x_max, b.x_max) -
                                        std::max(a.x_min, b.x_min));
    const double iy = std::max(0.0, std::min(a.y_max, b.y_max) -
                                        std::max(a.y_min, b.y_min));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double average_precision(const GroundTruthSet& gt, const DetectionSet& det,
                         int class_id, double threshold) {
    return interpolated_ap(match_class(gt, det, class_id, threshold));
}

MetricsReport evaluate(const GroundTruthSet& gt, const DetectionSet& det) {
    if (gt.empty()) throw ConfigError("ground truth set is empty");
    for (const Detection& d : det.detections()) {
        if (!gt.find(d.image_id)) {
            throw EvalError("detection references unknown image_id: " +
                            d.image_id);
        }
    }

    std::vector<double> thresholds;
    for (int i = 0; i < 10; ++i) thresholds.push_back(0.50 + 0.05 * i);

    MetricsReport report;
    report.map = mean_ap(gt, det, thresholds);
    report.map50 = mean_ap(gt, det, {0.50});
    report.map75 = mean_ap(gt, det, {0.75});

    // Mean IoU over TP matches at threshold 0.50, across classes.
    double iou_sum = 0.0;
    std::int64_t iou_count = 0;
    for (const int c : gt.class_ids()) {
        const MatchResult m = match_class(gt, det, c, 0.50);
        iou_sum = std::accumulate(m.match_iou.begin(), m.match_iou.end(), iou_sum);
        iou_count += static_cast<std::int64_t>(m.match_iou.size());
    }
    report.mean_iou = iou_count > 0 ? iou_sum / static_cast<double>(iou_count) : 0.0;

    std::set<std::string> tags;
    for (const GtImage& img : gt.images()) {
        if (!img.subset.empty()) tags.insert(img.subset);
    }
    for (const std::string& tag : tags) {
        const auto [sub_gt, sub_det] = restrict_to_subset(gt, det, tag);
        report.subset_map[tag] = mean_ap(sub_gt, sub_det, thresholds);
    }
    return report;
}

} // namespace augforge::eval
