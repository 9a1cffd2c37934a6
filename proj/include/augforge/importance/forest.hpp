#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace augforge::importance {

struct ForestSettings {
    int n_trees = 64;
    int max_depth = 64;
    int n_repeats = 8;
    int min_samples_leaf = 2;
    bool bootstrap = true;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One observation over a binary feature space.
struct DataPoint {
    std::vector<std::uint8_t> x; // 0 = inactive, 1 = active
    double y = 0.0;
};

struct TreeNode {
    int feature = -1; // -1 = leaf
    double prediction = 0.0;
    std::array<int, 2> child = {-1, -1}; // indexed by feature value
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    double predict(const std::vector<std::uint8_t>& x) const;
};

struct Forest {
    std::vector<Tree> trees;
    int n_features = 0;
};

/// Candidate subset size per split: ceil(sqrt(d)).
int split_candidate_count(int n_features);

/// Regression forest: bootstrap resample per tree, best variance-reduction
/// split among a random candidate subset, mean-prediction leaves.
Forest fit_forest(const std::vector<DataPoint>& data,
                  const ForestSettings& settings, std::uint64_t seed);

/// Variance of the tree's prediction under the uniform distribution over the
/// binary input space, computed exactly from the leaf cells.
double tree_total_variance(const Tree& tree);

/// Marginal predictions m(v) for v in {0, 1}, exact over leaf cells.
std::array<double, 2> tree_marginal(const Tree& tree, int feature);

/// First-order importance: Var_v[m(v)] / total variance, averaged over trees
/// with positive variance; 0 when every tree has zero variance.
double importance(const Forest& forest, int feature);

/// Importances for all features at once, sharing the per-tree pass.
struct ForestImportances {
    std::vector<double> per_feature;
    bool zero_variance = false; // every tree had zero total variance
};
ForestImportances all_importances(const Forest& forest);

} // namespace augforge::importance
