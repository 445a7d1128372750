#ifndef MQTTIDS_CLASSIFIERS_CART_HPP
#define MQTTIDS_CLASSIFIERS_CART_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mqttids/common.hpp"

namespace mqttids {

// Binary CART node. Internal nodes test x[feature] <= threshold; leaves
// carry the class frequency distribution of their training samples.
struct TreeNode {
    int feature = -1;   // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> dist;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    bool operator==(const TreeModel&) const = default;

    const std::vector<double>& leaf_dist(const std::vector<double>& x) const
    {
        size_t idx = 0;
        while (!nodes[idx].is_leaf()) {
            const TreeNode& nd = nodes[idx];
            idx = static_cast<size_t>(x[static_cast<size_t>(nd.feature)] <= nd.threshold
                                          ? nd.left
                                          : nd.right);
        }
        return nodes[idx].dist;
    }
};

struct ForestModel {
    std::vector<TreeModel> trees;
    int features_per_split = 0;  // 0 = all

    bool operator==(const ForestModel&) const = default;
};

struct CartConfig {
    int min_samples_split = 2;
    int features_per_split = 0;  // 0 = consider every feature
};

struct BestSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted Gini of the partition
};

namespace detail {

inline double gini_from_counts(const std::vector<double>& counts, double total)
{
    double g = 1.0;
    for (double c : counts) {
        double p = c / total;
        g -= p * p;
    }
    return g;
}

}  // namespace detail

// Scans candidate thresholds (midpoints of adjacent distinct values) over the
// given features and returns the split with minimal weighted Gini. Impurity
// depends only on the induced partition, so positive rescaling of a feature
// never changes the chosen partition. First (feature order, ascending
// threshold) wins on exact ties.
inline BestSplit find_best_split(const std::vector<std::vector<double>>& X,
                                 const std::vector<int>& y, const std::vector<size_t>& rows,
                                 const std::vector<int>& features, size_t n_classes)
{
    BestSplit best;
    size_t n = rows.size();
    std::vector<std::pair<double, int>> vals(n);  // (value, class)
    std::vector<double> left(n_classes), right(n_classes);

    for (int f : features) {
        for (size_t i = 0; i < n; ++i)
            vals[i] = {X[rows[i]][static_cast<size_t>(f)], y[rows[i]]};
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::fill(left.begin(), left.end(), 0.0);
        std::fill(right.begin(), right.end(), 0.0);
        for (const auto& [v, c] : vals) right[static_cast<size_t>(c)] += 1.0;

        for (size_t i = 0; i + 1 < n; ++i) {
            left[static_cast<size_t>(vals[i].second)] += 1.0;
            right[static_cast<size_t>(vals[i].second)] -= 1.0;
            if (vals[i].first == vals[i + 1].first) continue;  // not a boundary

            double nl = static_cast<double>(i + 1);
            double nr = static_cast<double>(n - i - 1);
            double impurity = (nl * detail::gini_from_counts(left, nl) +
                               nr * detail::gini_from_counts(right, nr)) /
                              static_cast<double>(n);
            if (!best.found || impurity < best.impurity) {
                best.found = true;
                best.feature = f;
                best.threshold = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0;
                best.impurity = impurity;
            }
        }
    }
    return best;
}

// Grows a tree until leaves are pure, too small to split, or constant in
// every candidate feature. For forests, features_per_split > 0 draws a fresh
// feature subset at each node.
inline TreeModel fit_cart(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                          const std::vector<size_t>& rows, size_t n_classes,
                          const CartConfig& cfg, Rng* rng = nullptr)
{
    size_t d = X.empty() ? 0 : X[0].size();
    TreeModel tree;

    std::vector<int> all_features(d);
    for (size_t j = 0; j < d; ++j) all_features[j] = static_cast<int>(j);

    struct Work {
        std::vector<size_t> rows;
        int node;
    };
    std::vector<Work> stack;
    tree.nodes.emplace_back();
    stack.push_back({rows, 0});

    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();

        std::vector<double> counts(n_classes, 0.0);
        for (size_t i : w.rows) counts[static_cast<size_t>(y[i])] += 1.0;

        auto make_leaf = [&] {
            TreeNode& nd = tree.nodes[static_cast<size_t>(w.node)];
            nd.feature = -1;
            nd.dist.resize(n_classes);
            for (size_t c = 0; c < n_classes; ++c)
                nd.dist[c] = counts[c] / static_cast<double>(w.rows.size());
        };

        bool pure = false;
        for (double c : counts)
            if (c == static_cast<double>(w.rows.size())) pure = true;
        if (pure || w.rows.size() < static_cast<size_t>(cfg.min_samples_split)) {
            make_leaf();
            continue;
        }

        std::vector<int> features;
        if (cfg.features_per_split > 0 &&
            cfg.features_per_split < static_cast<int>(d) && rng) {
            // sample without replacement, then restore index order
            std::vector<int> pool = all_features;
            for (int taken = 0; taken < cfg.features_per_split; ++taken) {
                size_t pick = taken + static_cast<size_t>(rng->below(pool.size() - taken));
                std::swap(pool[taken], pool[pick]);
            }
            features.assign(pool.begin(), pool.begin() + cfg.features_per_split);
            std::sort(features.begin(), features.end());
        } else {
            features = all_features;
        }

        BestSplit split = find_best_split(X, y, w.rows, features, n_classes);
        if (!split.found) {
            make_leaf();
            continue;
        }

        std::vector<size_t> left_rows, right_rows;
        for (size_t i : w.rows) {
            if (X[i][static_cast<size_t>(split.feature)] <= split.threshold)
                left_rows.push_back(i);
            else
                right_rows.push_back(i);
        }

        int left_idx = static_cast<int>(tree.nodes.size());
        int right_idx = left_idx + 1;
        {
            TreeNode& nd = tree.nodes[static_cast<size_t>(w.node)];
            nd.feature = split.feature;
            nd.threshold = split.threshold;
            nd.left = left_idx;
            nd.right = right_idx;
        }
        tree.nodes.emplace_back();  // may reallocate; nd must not outlive this
        tree.nodes.emplace_back();
        stack.push_back({std::move(right_rows), right_idx});
        stack.push_back({std::move(left_rows), left_idx});
    }
    return tree;
}

struct ForestConfig {
    int trees = 100;
    bool bootstrap = true;
    bool subset_features = true;  // sqrt(d) per split when true
    int min_samples_split = 2;
};

inline ForestModel fit_forest(const std::vector<std::vector<double>>& X,
                              const std::vector<int>& y, size_t n_classes,
                              const ForestConfig& cfg, uint64_t seed)
{
    size_t n = X.size();
    size_t d = n == 0 ? 0 : X[0].size();

    ForestModel forest;
    forest.features_per_split =
        cfg.subset_features ? std::max(1, static_cast<int>(std::floor(std::sqrt(
                                              static_cast<double>(d)))))
                            : 0;

    CartConfig tree_cfg;
    tree_cfg.min_samples_split = cfg.min_samples_split;
    tree_cfg.features_per_split = forest.features_per_split;

    for (int t = 0; t < cfg.trees; ++t) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
        std::vector<size_t> rows(n);
        if (cfg.bootstrap) {
            for (size_t i = 0; i < n; ++i) rows[i] = static_cast<size_t>(rng.below(n));
        } else {
            for (size_t i = 0; i < n; ++i) rows[i] = i;
        }
        forest.trees.push_back(fit_cart(X, y, rows, n_classes, tree_cfg, &rng));
    }
    return forest;
}

// Vote fractions: each tree votes its leaf argmax (lowest class index wins a
// tied leaf).
inline std::vector<double> forest_scores(const ForestModel& m, const std::vector<double>& x,
                                         size_t n_classes)
{
    std::vector<double> votes(n_classes, 0.0);
    for (const auto& tree : m.trees) {
        const auto& dist = tree.leaf_dist(x);
        size_t best = 0;
        for (size_t c = 1; c < n_classes; ++c)
            if (dist[c] > dist[best]) best = c;
        votes[best] += 1.0;
    }
    for (double& v : votes) v /= static_cast<double>(m.trees.size());
    return votes;
}

}  // namespace mqttids

#endif  // MQTTIDS_CLASSIFIERS_CART_HPP
