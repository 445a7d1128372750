#ifndef MQTTIDS_CLASSIFIERS_SVM_RBF_HPP
#define MQTTIDS_CLASSIFIERS_SVM_RBF_HPP

#include <cmath>
#include <cstddef>
#include <iostream>
#include <vector>

namespace mqttids {

struct SvmRbfBinary {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coef;  // alpha_i * y_i for the kept vectors
    double bias = 0.0;

    bool operator==(const SvmRbfBinary&) const = default;
};

struct SvmRbfModel {
    double gamma = 1.0;
    std::vector<SvmRbfBinary> per_class;  // one-vs-rest machines

    bool operator==(const SvmRbfModel&) const = default;

    double margin(size_t cls, const std::vector<double>& x) const
    {
        const SvmRbfBinary& m = per_class[cls];
        double f = m.bias;
        for (size_t s = 0; s < m.support_vectors.size(); ++s) {
            double ss = 0.0;
            const auto& sv = m.support_vectors[s];
            for (size_t j = 0; j < sv.size(); ++j) {
                double d = sv[j] - x[j];
                ss += d * d;
            }
            f += m.dual_coef[s] * std::exp(-gamma * ss);
        }
        return f;
    }
};

struct SvmRbfConfig {
    double C = 1.0;
    double gamma = 1.0;
    double kkt_tol = 1e-3;
    int max_passes = 2000;  // full sweeps over the training set
};

namespace detail {

// Sequential minimal optimisation on the dual of a soft-margin binary SVM.
// Deterministic: the first multiplier is taken in index order, the second by
// the largest |E_i - E_j| (lowest index on ties). Returns false when the
// pass cap was reached before all KKT conditions held.
inline bool smo_solve(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                      const SvmRbfConfig& cfg, std::vector<double>& alpha, double& b)
{
    size_t n = X.size();
    alpha.assign(n, 0.0);
    b = 0.0;

    auto kernel = [&](size_t i, size_t j) {
        double ss = 0.0;
        const auto& a = X[i];
        const auto& c = X[j];
        for (size_t t = 0; t < a.size(); ++t) {
            double d = a[t] - c[t];
            ss += d * d;
        }
        return std::exp(-cfg.gamma * ss);
    };

    // Cache the kernel matrix at desk scale; fall back to recomputation on
    // larger problems.
    const size_t cache_limit = 3000;
    std::vector<std::vector<double>> K;
    if (n <= cache_limit) {
        K.assign(n, std::vector<double>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j < n; ++j) K[i][j] = K[j][i] = kernel(i, j);
    }
    auto k_at = [&](size_t i, size_t j) { return K.empty() ? kernel(i, j) : K[i][j]; };

    // f(x_i) maintained incrementally.
    std::vector<double> f(n, 0.0);

    auto violates = [&](size_t i) {
        double Ei = f[i] + b - y[i];
        return (y[i] * Ei < -cfg.kkt_tol && alpha[i] < cfg.C) ||
               (y[i] * Ei > cfg.kkt_tol && alpha[i] > 0.0);
    };

    // Joint step on the pair (i, j); returns false when the box or curvature
    // blocks any progress.
    auto take_step = [&](size_t i, size_t j) -> bool {
        if (i == j) return false;
        double Ei = f[i] + b - y[i];
        double Ej = f[j] + b - y[j];

        double L, H;
        if (y[i] != y[j]) {
            L = std::max(0.0, alpha[j] - alpha[i]);
            H = std::min(cfg.C, cfg.C + alpha[j] - alpha[i]);
        } else {
            L = std::max(0.0, alpha[i] + alpha[j] - cfg.C);
            H = std::min(cfg.C, alpha[i] + alpha[j]);
        }
        if (L >= H) return false;

        double eta = 2.0 * k_at(i, j) - k_at(i, i) - k_at(j, j);
        if (eta >= 0.0) return false;  // only for coincident points

        double aj_new = alpha[j] - y[j] * (Ei - Ej) / eta;
        aj_new = std::min(std::max(aj_new, L), H);
        if (std::fabs(aj_new - alpha[j]) < 1e-12 * (aj_new + alpha[j] + 1e-12)) return false;

        double ai_new = alpha[i] + y[i] * y[j] * (alpha[j] - aj_new);

        double b1 = b - Ei - y[i] * (ai_new - alpha[i]) * k_at(i, i) -
                    y[j] * (aj_new - alpha[j]) * k_at(i, j);
        double b2 = b - Ej - y[i] * (ai_new - alpha[i]) * k_at(i, j) -
                    y[j] * (aj_new - alpha[j]) * k_at(j, j);
        double b_new;
        if (ai_new > 0.0 && ai_new < cfg.C) b_new = b1;
        else if (aj_new > 0.0 && aj_new < cfg.C) b_new = b2;
        else b_new = (b1 + b2) / 2.0;

        double di = y[i] * (ai_new - alpha[i]);
        double dj = y[j] * (aj_new - alpha[j]);
        for (size_t t = 0; t < n; ++t) f[t] += di * k_at(i, t) + dj * k_at(j, t);

        alpha[i] = ai_new;
        alpha[j] = aj_new;
        b = b_new;
        return true;
    };

    for (int pass = 0; pass < cfg.max_passes; ++pass) {
        int changed = 0;
        for (size_t i = 0; i < n; ++i) {
            if (!violates(i)) continue;

            // Second choice by maximal |Ei - Ej|, then a full fallback scan
            // so a blocked pair cannot stall the sweep.
            double Ei = f[i] + b - y[i];
            size_t j_best = i;
            double best_gap = -1.0;
            for (size_t cand = 0; cand < n; ++cand) {
                if (cand == i) continue;
                double gap = std::fabs(Ei - (f[cand] + b - y[cand]));
                if (gap > best_gap) {
                    best_gap = gap;
                    j_best = cand;
                }
            }
            bool moved = j_best != i && take_step(i, j_best);
            for (size_t j = 0; !moved && j < n; ++j)
                if (j != j_best) moved = take_step(i, j);
            if (moved) ++changed;
        }
        if (changed == 0) {
            for (size_t i = 0; i < n; ++i)
                if (violates(i)) return false;  // stuck short of tolerance
            return true;
        }
    }
    return false;
}

}  // namespace detail

// One-vs-rest RBF SVM. Emits a warning (not an error) when a sub-problem
// hits the pass cap before converging.
inline SvmRbfModel fit_svm_rbf_ovr(const std::vector<std::vector<double>>& X,
                                   const std::vector<int>& y, size_t n_classes,
                                   const SvmRbfConfig& cfg, bool* converged_out = nullptr)
{
    SvmRbfModel model;
    model.gamma = cfg.gamma;
    bool all_converged = true;

    std::vector<double> target(X.size());
    for (size_t c = 0; c < n_classes; ++c) {
        for (size_t i = 0; i < X.size(); ++i)
            target[i] = y[i] == static_cast<int>(c) ? 1.0 : -1.0;

        std::vector<double> alpha;
        double bias = 0.0;
        bool converged = detail::smo_solve(X, target, cfg, alpha, bias);
        if (!converged) {
            all_converged = false;
            std::cerr << "warning: svm-rbf class " << c
                      << " hit the pass cap before reaching KKT tolerance (Unconverged)\n";
        }

        SvmRbfBinary bin;
        bin.bias = bias;
        for (size_t i = 0; i < alpha.size(); ++i) {
            if (alpha[i] > 0.0) {
                bin.support_vectors.push_back(X[i]);
                bin.dual_coef.push_back(alpha[i] * target[i]);
            }
        }
        model.per_class.push_back(std::move(bin));
    }
    if (converged_out) *converged_out = all_converged;
    return model;
}

}  // namespace mqttids

#endif  // MQTTIDS_CLASSIFIERS_SVM_RBF_HPP
