#ifndef MQTTIDS_CLASSIFIERS_NAIVE_BAYES_HPP
#define MQTTIDS_CLASSIFIERS_NAIVE_BAYES_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace mqttids {

struct NbModel {
    std::vector<double> log_prior;              // [class]
    std::vector<std::vector<double>> mean;      // [class][feature]
    std::vector<std::vector<double>> variance;  // [class][feature], floored

    bool operator==(const NbModel&) const = default;

    double log_likelihood(size_t cls, const std::vector<double>& x) const
    {
        double lp = log_prior[cls];
        const auto& mu = mean[cls];
        const auto& var = variance[cls];
        for (size_t j = 0; j < mu.size(); ++j) {
            double d = x[j] - mu[j];
            lp += -0.5 * std::log(2.0 * M_PI * var[j]) - d * d / (2.0 * var[j]);
        }
        return lp;
    }
};

// Gaussian fit per class and feature (population variance). Variances are
// floored at floor_ratio times the largest whole-training-set feature
// variance so constant features stay finite.
inline NbModel fit_gaussian_nb(const std::vector<std::vector<double>>& X,
                               const std::vector<int>& y, size_t n_classes,
                               double floor_ratio = 1e-9)
{
    size_t n = X.size();
    size_t d = n == 0 ? 0 : X[0].size();

    // Global per-feature variance, for the floor.
    double max_var = 0.0;
    {
        std::vector<double> mu(d, 0.0);
        for (const auto& r : X)
            for (size_t j = 0; j < d; ++j) mu[j] += r[j];
        for (size_t j = 0; j < d; ++j) mu[j] /= static_cast<double>(n);
        for (size_t j = 0; j < d; ++j) {
            double ss = 0.0;
            for (const auto& r : X) {
                double dv = r[j] - mu[j];
                ss += dv * dv;
            }
            max_var = std::max(max_var, ss / static_cast<double>(n));
        }
    }
    double floor = floor_ratio * max_var;
    if (floor <= 0.0) floor = 1e-12;

    NbModel m;
    m.log_prior.assign(n_classes, 0.0);
    m.mean.assign(n_classes, std::vector<double>(d, 0.0));
    m.variance.assign(n_classes, std::vector<double>(d, 0.0));

    std::vector<size_t> count(n_classes, 0);
    for (size_t i = 0; i < n; ++i) {
        size_t c = static_cast<size_t>(y[i]);
        ++count[c];
        for (size_t j = 0; j < d; ++j) m.mean[c][j] += X[i][j];
    }
    for (size_t c = 0; c < n_classes; ++c) {
        m.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(n));
        for (size_t j = 0; j < d; ++j) m.mean[c][j] /= static_cast<double>(count[c]);
    }
    for (size_t i = 0; i < n; ++i) {
        size_t c = static_cast<size_t>(y[i]);
        for (size_t j = 0; j < d; ++j) {
            double dv = X[i][j] - m.mean[c][j];
            m.variance[c][j] += dv * dv;
        }
    }
    for (size_t c = 0; c < n_classes; ++c)
        for (size_t j = 0; j < d; ++j)
            m.variance[c][j] = std::max(m.variance[c][j] / static_cast<double>(count[c]), floor);
    return m;
}

}  // namespace mqttids

#endif  // MQTTIDS_CLASSIFIERS_NAIVE_BAYES_HPP
