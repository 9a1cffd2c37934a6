#include "augforge/importance/forest.hpp"

#include "augforge/error.hpp"
#include "augforge/imaging/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace augforge::importance {

using imaging::RngStream;

namespace {

const std::uint64_t kForestTag = imaging::hash_id("forest");

struct Subset {
    double sum = 0.0;
    double sum_sq = 0.0;
    double y_min = std::numeric_limits<double>::max();
    double y_max = std::numeric_limits<double>::lowest();
    std::int64_t count = 0;

    void add(double y) {
        sum += y;
        sum_sq += y * y;
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
        ++count;
    }
    bool pure() const { return count > 0 && y_min == y_max; }
    // Exact on pure nodes so deterministic targets reproduce bit-for-bit.
    double mean() const {
        if (count == 0) return 0.0;
        return pure() ? y_min : sum / static_cast<double>(count);
    }
    double sse() const {
        if (count == 0 || pure()) return 0.0;
        return sum_sq - sum * sum / static_cast<double>(count);
    }
};

struct TreeBuilder {
    const std::vector<DataPoint>& data;
    const ForestSettings& settings;
    RngStream& rng;
    int n_features;
    Tree tree;

    int build(std::vector<std::uint32_t>& indices, int depth) {
        Subset all;
        for (const std::uint32_t i : indices) all.add(data[i].y);

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<std::size_t>(node_id)].prediction = all.mean();

        // min_samples_leaf is the smallest node still eligible for a split;
        // splits themselves only need nonempty children, so a deterministic
        // target keeps splitting until its leaves are pure.
        if (depth >= settings.max_depth ||
            all.count < std::max<std::int64_t>(2, settings.min_samples_leaf) ||
            all.sse() <= 0.0) {
            return node_id;
        }

        // Uniform random candidate subset of ceil(sqrt(d)) parameters, drawn
        // among the features that still vary within this node.
        std::vector<int> varying;
        for (int f = 0; f < n_features; ++f) {
            const std::uint8_t first =
                data[indices.front()].x[static_cast<std::size_t>(f)];
            for (const std::uint32_t i : indices) {
                if (data[i].x[static_cast<std::size_t>(f)] != first) {
                    varying.push_back(f);
                    break;
                }
            }
        }
        if (varying.empty()) return node_id;
        const int k = std::min<int>(split_candidate_count(n_features),
                                    static_cast<int>(varying.size()));
        rng.shuffle(varying);

        // Evaluate the k-feature random subset; when none of them reduces
        // the error (a symmetric-counts fluke), keep walking the shuffled
        // list so an impure node still finds its informative split.
        int best_feature = -1;
        double best_gain = 0.0;
        for (std::size_t ci = 0; ci < varying.size(); ++ci) {
            if (ci >= static_cast<std::size_t>(k) && best_feature >= 0) break;
            const int f = varying[ci];
            Subset lo, hi;
            for (const std::uint32_t i : indices) {
                (data[i].x[static_cast<std::size_t>(f)] ? hi : lo).add(data[i].y);
            }
            if (lo.count == 0 || hi.count == 0) continue;
            const double gain = all.sse() - lo.sse() - hi.sse();
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = f;
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<std::uint32_t> lo_idx, hi_idx;
        for (const std::uint32_t i : indices) {
            (data[i].x[static_cast<std::size_t>(best_feature)] ? hi_idx : lo_idx)
                .push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        const int lo_child = build(lo_idx, depth + 1);
        const int hi_child = build(hi_idx, depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
        node.feature = best_feature;
        node.child = {lo_child, hi_child};
        return node_id;
    }
};

/// Depth-first walk over leaf cells carrying the path constraints
/// ((feature, value) pairs fixed along the way down).
template <typename Fn>
void walk_leaves(const Tree& tree, Fn&& fn) {
    struct Frame {
        int node;
        std::vector<std::pair<int, int>> fixed;
    };
    std::vector<Frame> frames;
    frames.push_back({0, {}});
    while (!frames.empty()) {
        Frame frame = std::move(frames.back());
        frames.pop_back();
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(frame.node)];
        if (node.feature < 0) {
            fn(node.prediction, frame.fixed);
            continue;
        }
        for (int v = 0; v < 2; ++v) {
            Frame next{node.child[static_cast<std::size_t>(v)], frame.fixed};
            next.fixed.emplace_back(node.feature, v);
            frames.push_back(std::move(next));
        }
    }
}

} // namespace

void ForestSettings::validate() const {
    if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (n_repeats < 1) throw ConfigError("n_repeats must be >= 1");
    if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
}

double Tree::predict(const std::vector<std::uint8_t>& x) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        node = n.child[x[static_cast<std::size_t>(n.feature)] ? 1 : 0];
    }
    return nodes[static_cast<std::size_t>(node)].prediction;
}

int split_candidate_count(int n_features) {
    return static_cast<int>(
        std::ceil(std::sqrt(static_cast<double>(n_features))));
}

Forest fit_forest(const std::vector<DataPoint>& data,
                  const ForestSettings& settings, std::uint64_t seed) {
    settings.validate();
    if (data.size() < 2) {
        throw AnalysisError("forest fitting needs at least 2 observations");
    }
    const int n_features = static_cast<int>(data.front().x.size());
    for (const DataPoint& p : data) {
        if (static_cast<int>(p.x.size()) != n_features) {
            throw AnalysisError("inconsistent feature dimensions");
        }
    }
    bool any_varies = false;
    for (int f = 0; f < n_features && !any_varies; ++f) {
        for (std::size_t i = 1; i < data.size(); ++i) {
            if (data[i].x[static_cast<std::size_t>(f)] !=
                data[0].x[static_cast<std::size_t>(f)]) {
                any_varies = true;
                break;
            }
        }
    }
    if (!any_varies) {
        throw AnalysisError("all observations share one assignment; nothing to fit");
    }

    Forest forest;
    forest.n_features = n_features;
    forest.trees.reserve(static_cast<std::size_t>(settings.n_trees));
    const auto n = static_cast<std::int64_t>(data.size());
    for (int t = 0; t < settings.n_trees; ++t) {
        RngStream rng(seed, static_cast<std::uint64_t>(t), kForestTag, 0);
        std::vector<std::uint32_t> indices;
        indices.reserve(data.size());
        if (settings.bootstrap) {
            for (std::int64_t i = 0; i < n; ++i) {
                indices.push_back(
                    static_cast<std::uint32_t>(rng.uniform_int(0, n - 1)));
            }
        } else {
            for (std::int64_t i = 0; i < n; ++i) {
                indices.push_back(static_cast<std::uint32_t>(i));
            }
        }
        TreeBuilder builder{data, settings, rng, n_features, {}};
        builder.build(indices, 0);
        forest.trees.push_back(std::move(builder.tree));
    }
    return forest;
}

double tree_total_variance(const Tree& tree) {
    double mean = 0.0;
    double mean_sq = 0.0;
    walk_leaves(tree, [&](double pred, const auto& fixed) {
        const double p = std::pow(0.5, static_cast<double>(fixed.size()));
        mean += p * pred;
        mean_sq += p * pred * pred;
    });
    return std::max(0.0, mean_sq - mean * mean);
}

std::array<double, 2> tree_marginal(const Tree& tree, int feature) {
    std::array<double, 2> m = {0.0, 0.0};
    walk_leaves(tree, [&](double pred, const auto& fixed) {
        int constrained = -1;
        for (const auto& [f, v] : fixed) {
            if (f == feature) {
                constrained = v;
                break;
            }
        }
        if (constrained >= 0) {
            // Cell probability with the feature's own 1/2 factor removed.
            const double p = std::pow(0.5, static_cast<double>(fixed.size()) - 1.0);
            m[static_cast<std::size_t>(constrained)] += p * pred;
        } else {
            const double p = std::pow(0.5, static_cast<double>(fixed.size()));
            m[0] += p * pred;
            m[1] += p * pred;
        }
    });
    return m;
}

ForestImportances all_importances(const Forest& forest) {
    ForestImportances out;
    out.per_feature.assign(static_cast<std::size_t>(forest.n_features), 0.0);
    int voting_trees = 0;
    for (const Tree& tree : forest.trees) {
        const double total = tree_total_variance(tree);
        if (total <= 0.0) continue; // constant tree carries no signal
        ++voting_trees;
        for (int f = 0; f < forest.n_features; ++f) {
            const std::array<double, 2> m = tree_marginal(tree, f);
            const double diff = m[1] - m[0];
            out.per_feature[static_cast<std::size_t>(f)] +=
                (diff * diff / 4.0) / total;
        }
    }
    if (voting_trees == 0) {
        out.zero_variance = true;
        return out;
    }
    for (double& v : out.per_feature) v /= voting_trees;
    return out;
}

double importance(const Forest& forest, int feature) {
    if (feature < 0 || feature >= forest.n_features) {
        throw AnalysisError("unknown feature index: " + std::to_string(feature));
    }
    return all_importances(forest).per_feature[static_cast<std::size_t>(feature)];
}

} // namespace augforge::importance
