#ifndef MQTTIDS_CLASSIFIERS_LINEAR_HPP
#define MQTTIDS_CLASSIFIERS_LINEAR_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace mqttids {

// One-vs-rest linear scorer shared by logistic regression and the linear
// SVM; only the training objective differs.
struct LinearModel {
    std::vector<std::vector<double>> weights;  // [class][feature]
    std::vector<double> bias;                  // [class]

    bool operator==(const LinearModel&) const = default;

    double margin(size_t cls, const std::vector<double>& x) const
    {
        double z = bias[cls];
        const auto& w = weights[cls];
        for (size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
        return z;
    }
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// L2-regularised binary logistic loss and its gradient:
//   J(w,b) = (1/n) sum of cross-entropy + (l2/2)||w||^2   (bias unpenalised)
// Exposed separately so the gradient can be checked against finite
// differences.
inline double logistic_loss_grad(const std::vector<std::vector<double>>& X,
                                 const std::vector<int>& y01,
                                 const std::vector<double>& w, double b, double l2,
                                 std::vector<double>& grad_w, double& grad_b)
{
    size_t n = X.size();
    size_t d = w.size();
    grad_w.assign(d, 0.0);
    grad_b = 0.0;
    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double z = b;
        for (size_t j = 0; j < d; ++j) z += w[j] * X[i][j];
        double p = sigmoid(z);
        double t = static_cast<double>(y01[i]);
        // clamped log-loss; p can underflow to exactly 0 or 1
        double eps = 1e-15;
        double pc = std::min(std::max(p, eps), 1.0 - eps);
        loss += -(t * std::log(pc) + (1.0 - t) * std::log(1.0 - pc));
        double err = p - t;
        for (size_t j = 0; j < d; ++j) grad_w[j] += err * X[i][j];
        grad_b += err;
    }
    double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    grad_b *= inv_n;
    for (size_t j = 0; j < d; ++j) {
        grad_w[j] = grad_w[j] * inv_n + l2 * w[j];
        loss += 0.5 * l2 * w[j] * w[j];
    }
    return loss;
}

struct LrConfig {
    double l2 = 1e-4;
    double learning_rate = 0.1;
    int max_epochs = 1000;
    double grad_tol = 1e-6;
};

// Full-batch gradient descent with a fixed step, one binary problem per
// class. Stops early once the gradient norm falls under grad_tol.
inline LinearModel fit_logistic_ovr(const std::vector<std::vector<double>>& X,
                                    const std::vector<int>& y, size_t n_classes,
                                    const LrConfig& cfg)
{
    size_t d = X.empty() ? 0 : X[0].size();
    LinearModel m;
    m.weights.assign(n_classes, std::vector<double>(d, 0.0));
    m.bias.assign(n_classes, 0.0);

    std::vector<int> y01(X.size());
    std::vector<double> grad_w;
    for (size_t c = 0; c < n_classes; ++c) {
        for (size_t i = 0; i < X.size(); ++i) y01[i] = y[i] == static_cast<int>(c) ? 1 : 0;
        auto& w = m.weights[c];
        double& b = m.bias[c];
        for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
            double grad_b = 0.0;
            logistic_loss_grad(X, y01, w, b, cfg.l2, grad_w, grad_b);
            double norm_sq = grad_b * grad_b;
            for (double g : grad_w) norm_sq += g * g;
            if (std::sqrt(norm_sq) < cfg.grad_tol) break;
            for (size_t j = 0; j < d; ++j) w[j] -= cfg.learning_rate * grad_w[j];
            b -= cfg.learning_rate * grad_b;
        }
    }
    return m;
}

struct LinearSvmConfig {
    double C = 1.0;
    int max_epochs = 1000;
};

// Primal hinge-loss minimisation by full-batch subgradient descent with the
// 1/(lambda*t) step schedule, lambda = 1/(C*n). Deterministic.
inline LinearModel fit_linear_svm_ovr(const std::vector<std::vector<double>>& X,
                                      const std::vector<int>& y, size_t n_classes,
                                      const LinearSvmConfig& cfg)
{
    size_t n = X.size();
    size_t d = n == 0 ? 0 : X[0].size();
    double lambda = 1.0 / (cfg.C * static_cast<double>(n));

    LinearModel m;
    m.weights.assign(n_classes, std::vector<double>(d, 0.0));
    m.bias.assign(n_classes, 0.0);

    std::vector<double> grad(d);
    for (size_t c = 0; c < n_classes; ++c) {
        auto& w = m.weights[c];
        double& b = m.bias[c];
        for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double target = y[i] == static_cast<int>(c) ? 1.0 : -1.0;
                double z = b;
                for (size_t j = 0; j < d; ++j) z += w[j] * X[i][j];
                if (target * z < 1.0) {
                    for (size_t j = 0; j < d; ++j) grad[j] -= target * X[i][j];
                    grad_b -= target;
                }
            }
            double inv_n = 1.0 / static_cast<double>(n);
            double step = 1.0 / (lambda * static_cast<double>(epoch + 1));
            for (size_t j = 0; j < d; ++j)
                w[j] -= step * (lambda * w[j] + grad[j] * inv_n);
            b -= step * grad_b * inv_n;
        }
    }
    return m;
}

}  // namespace mqttids

#endif  // MQTTIDS_CLASSIFIERS_LINEAR_HPP
