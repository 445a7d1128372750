#ifndef MQTTIDS_CLASSIFIERS_KNN_HPP
#define MQTTIDS_CLASSIFIERS_KNN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace mqttids {

struct KnnModel {
    int k = 5;
    std::vector<std::vector<double>> train;  // rows as given to fit (scaled upstream)
    std::vector<int> labels;                 // class indices

    bool operator==(const KnnModel&) const = default;
};

// Scores are inverse-rank votes over the k nearest points: the rank-r
// neighbour contributes 1/r to its class. Ties on equal distance resolve by
// training index, ties on score by smaller summed neighbour distance, then
// class order.
inline std::vector<double> knn_scores(const KnnModel& m, const std::vector<double>& x,
                                      size_t n_classes, size_t* argmax_out = nullptr)
{
    size_t n = m.train.size();
    size_t k = std::min<size_t>(static_cast<size_t>(m.k), n);

    std::vector<std::pair<double, size_t>> dist(n);
    for (size_t i = 0; i < n; ++i) {
        double ss = 0.0;
        const auto& row = m.train[i];
        for (size_t j = 0; j < row.size(); ++j) {
            double d = row[j] - x[j];
            ss += d * d;
        }
        dist[i] = {std::sqrt(ss), i};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    std::vector<double> score(n_classes, 0.0);
    std::vector<double> sum_dist(n_classes, 0.0);
    for (size_t r = 0; r < k; ++r) {
        size_t cls = static_cast<size_t>(m.labels[dist[r].second]);
        score[cls] += 1.0 / static_cast<double>(r + 1);
        sum_dist[cls] += dist[r].first;
    }

    if (argmax_out) {
        size_t best = 0;
        for (size_t c = 1; c < n_classes; ++c) {
            if (score[c] > score[best] ||
                (score[c] == score[best] && score[c] > 0.0 && sum_dist[c] < sum_dist[best]))
                best = c;
        }
        *argmax_out = best;
    }
    return score;
}

}  // namespace mqttids

#endif  // MQTTIDS_CLASSIFIERS_KNN_HPP
