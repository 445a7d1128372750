#ifndef MQTTIDS_CLASSIFIERS_HPP
#define MQTTIDS_CLASSIFIERS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mqttids/classifiers/cart.hpp"
#include "mqttids/classifiers/knn.hpp"
#include "mqttids/classifiers/linear.hpp"
#include "mqttids/classifiers/naive_bayes.hpp"
#include "mqttids/classifiers/svm_rbf.hpp"
#include "mqttids/common.hpp"
#include "mqttids/table.hpp"

namespace mqttids {

enum class ClassifierKind : uint8_t { lr, nb, knn, dt, rf, svm_linear, svm_rbf };

inline std::string to_string(ClassifierKind k)
{
    switch (k) {
        case ClassifierKind::lr: return "lr";
        case ClassifierKind::nb: return "nb";
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::dt: return "dt";
        case ClassifierKind::rf: return "rf";
        case ClassifierKind::svm_linear: return "svm-linear";
        case ClassifierKind::svm_rbf: return "svm-rbf";
    }
    return "lr";
}

inline ClassifierKind classifier_kind_from_string(const std::string& s)
{
    if (s == "lr") return ClassifierKind::lr;
    if (s == "nb") return ClassifierKind::nb;
    if (s == "knn") return ClassifierKind::knn;
    if (s == "dt") return ClassifierKind::dt;
    if (s == "rf") return ClassifierKind::rf;
    if (s == "svm-linear") return ClassifierKind::svm_linear;
    if (s == "svm-rbf") return ClassifierKind::svm_rbf;
    throw UsageError("unknown model kind: " + s);
}

// All knobs in one bag; each kind reads only its own. Defaults match the
// documented CLI defaults.
struct Hyperparams {
    int k = 5;                       // knn
    double l2 = 1e-4;                // lr
    double learning_rate = 0.1;      // lr
    int max_epochs = 1000;           // lr, svm-linear
    double grad_tol = 1e-6;          // lr
    double nb_variance_floor = 1e-9; // ratio of max feature variance
    int min_samples_split = 2;       // dt, rf
    int trees = 100;                 // rf
    bool bootstrap = true;           // rf
    bool subset_features = true;     // rf: sqrt(d) per split
    double svm_c = 1.0;              // both svms
    std::optional<double> gamma;     // svm-rbf; unset = 1/(d * mean variance)
    double kkt_tol = 1e-3;           // svm-rbf
    int max_passes = 2000;           // svm-rbf

    bool operator==(const Hyperparams&) const = default;
};

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::dt;
    Hyperparams hp;
    uint64_t seed = 0;

    void validate() const
    {
        if (hp.k < 1) throw InvalidConfig("k must be >= 1");
        if (hp.trees < 1) throw InvalidConfig("trees must be >= 1");
        if (hp.svm_c <= 0.0) throw InvalidConfig("C must be > 0");
        if (hp.gamma && *hp.gamma <= 0.0) throw InvalidConfig("gamma must be > 0");
        if (hp.min_samples_split < 2) throw InvalidConfig("min-samples-split must be >= 2");
    }
};

// LR, k-NN and both SVMs see z-scored inputs; trees and NB train on raw
// features.
inline bool kind_standardizes(ClassifierKind k)
{
    return k == ClassifierKind::lr || k == ClassifierKind::knn ||
           k == ClassifierKind::svm_linear || k == ClassifierKind::svm_rbf;
}

struct Model {
    ClassifierKind kind = ClassifierKind::dt;
    ClassifierSpec spec;  // echoed into outputs
    std::vector<std::string> classes;
    size_t n_features = 0;
    std::optional<Standardizer> scaler;
    std::variant<LinearModel, NbModel, KnnModel, TreeModel, ForestModel, SvmRbfModel> params;
    bool converged = true;  // svm-rbf pass-cap flag
};

struct Prediction {
    std::string cls;
    std::vector<double> scores;  // aligned with Model::classes
};

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

inline Model fit(const ClassifierSpec& spec, const FeatureTable& train)
{
    spec.validate();
    auto X = train.numeric_rows();  // throws NonNumericColumn
    if (X.empty()) throw DataError("training table is empty");

    Model m;
    m.kind = spec.kind;
    m.spec = spec;
    m.classes = canonical_class_order(train.class_labels);
    if (m.classes.size() < 2) throw SingleClass("training data has a single class");
    m.n_features = X[0].size();

    std::vector<int> y(train.n_rows());
    for (size_t i = 0; i < y.size(); ++i) {
        for (size_t c = 0; c < m.classes.size(); ++c)
            if (train.class_labels[i] == m.classes[c]) {
                y[i] = static_cast<int>(c);
                break;
            }
    }

    if (kind_standardizes(spec.kind)) {
        m.scaler = Standardizer::fit_rows(X);
        m.scaler->transform_rows(X);
    }

    size_t n_classes = m.classes.size();
    switch (spec.kind) {
        case ClassifierKind::lr: {
            LrConfig cfg{spec.hp.l2, spec.hp.learning_rate, spec.hp.max_epochs,
                         spec.hp.grad_tol};
            m.params = fit_logistic_ovr(X, y, n_classes, cfg);
            break;
        }
        case ClassifierKind::nb:
            m.params = fit_gaussian_nb(X, y, n_classes, spec.hp.nb_variance_floor);
            break;
        case ClassifierKind::knn: {
            KnnModel knn;
            knn.k = spec.hp.k;
            knn.train = std::move(X);
            knn.labels = std::move(y);
            m.params = std::move(knn);
            break;
        }
        case ClassifierKind::dt: {
            CartConfig cfg{spec.hp.min_samples_split, 0};
            std::vector<size_t> rows(train.n_rows());
            for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            m.params = fit_cart(X, y, rows, n_classes, cfg);
            break;
        }
        case ClassifierKind::rf: {
            ForestConfig cfg;
            cfg.trees = spec.hp.trees;
            cfg.bootstrap = spec.hp.bootstrap;
            cfg.subset_features = spec.hp.subset_features;
            cfg.min_samples_split = spec.hp.min_samples_split;
            m.params = fit_forest(X, y, n_classes, cfg, spec.seed);
            break;
        }
        case ClassifierKind::svm_linear: {
            LinearSvmConfig cfg{spec.hp.svm_c, spec.hp.max_epochs};
            m.params = fit_linear_svm_ovr(X, y, n_classes, cfg);
            break;
        }
        case ClassifierKind::svm_rbf: {
            SvmRbfConfig cfg;
            cfg.C = spec.hp.svm_c;
            cfg.kkt_tol = spec.hp.kkt_tol;
            cfg.max_passes = spec.hp.max_passes;
            if (spec.hp.gamma) {
                cfg.gamma = *spec.hp.gamma;
            } else {
                // 1 / (d * mean feature variance) on the (scaled) inputs
                double mean_var = 0.0;
                size_t d = m.n_features;
                for (size_t j = 0; j < d; ++j) {
                    double mu = 0.0;
                    for (const auto& r : X) mu += r[j];
                    mu /= static_cast<double>(X.size());
                    double ss = 0.0;
                    for (const auto& r : X) {
                        double dv = r[j] - mu;
                        ss += dv * dv;
                    }
                    mean_var += ss / static_cast<double>(X.size());
                }
                mean_var /= static_cast<double>(d);
                cfg.gamma = mean_var > 0.0 ? 1.0 / (static_cast<double>(d) * mean_var)
                                           : 1.0 / static_cast<double>(d);
            }
            m.params = fit_svm_rbf_ovr(X, y, n_classes, cfg, &m.converged);
            break;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

inline Prediction predict(const Model& m, const std::vector<double>& row)
{
    if (row.size() != m.n_features)
        throw DimensionMismatch("row has " + std::to_string(row.size()) +
                                " features, model expects " + std::to_string(m.n_features));
    std::vector<double> x = m.scaler ? m.scaler->transform_row(row) : row;
    size_t n_classes = m.classes.size();

    std::vector<double> scores(n_classes, 0.0);
    size_t best = 0;

    switch (m.kind) {
        case ClassifierKind::lr: {
            const auto& lin = std::get<LinearModel>(m.params);
            double sum = 0.0;
            for (size_t c = 0; c < n_classes; ++c) {
                scores[c] = sigmoid(lin.margin(c, x));
                sum += scores[c];
            }
            if (sum > 0.0)
                for (double& s : scores) s /= sum;
            break;
        }
        case ClassifierKind::svm_linear: {
            const auto& lin = std::get<LinearModel>(m.params);
            for (size_t c = 0; c < n_classes; ++c) scores[c] = lin.margin(c, x);
            break;
        }
        case ClassifierKind::nb: {
            const auto& nb = std::get<NbModel>(m.params);
            std::vector<double> logp(n_classes);
            double mx = -1e308;
            for (size_t c = 0; c < n_classes; ++c) {
                logp[c] = nb.log_likelihood(c, x);
                mx = std::max(mx, logp[c]);
            }
            double sum = 0.0;
            for (size_t c = 0; c < n_classes; ++c) {
                scores[c] = std::exp(logp[c] - mx);
                sum += scores[c];
            }
            for (double& s : scores) s /= sum;
            break;
        }
        case ClassifierKind::knn: {
            const auto& knn = std::get<KnnModel>(m.params);
            scores = knn_scores(knn, x, n_classes, &best);
            return {m.classes[best], std::move(scores)};
        }
        case ClassifierKind::dt: {
            const auto& tree = std::get<TreeModel>(m.params);
            scores = tree.leaf_dist(x);
            break;
        }
        case ClassifierKind::rf: {
            const auto& forest = std::get<ForestModel>(m.params);
            scores = forest_scores(forest, x, n_classes);
            break;
        }
        case ClassifierKind::svm_rbf: {
            const auto& svm = std::get<SvmRbfModel>(m.params);
            for (size_t c = 0; c < n_classes; ++c) scores[c] = svm.margin(c, x);
            break;
        }
    }

    for (size_t c = 1; c < n_classes; ++c)
        if (scores[c] > scores[best]) best = c;
    return {m.classes[best], std::move(scores)};
}

inline std::vector<std::string> predict_labels(const Model& m, const FeatureTable& t)
{
    auto rows = t.numeric_rows();
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict(m, r).cls);
    return out;
}

// ---------------------------------------------------------------------------
// Serialization (versioned JSON; round-trip preserves predictions exactly)
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json hyperparams_to_json(const Hyperparams& hp)
{
    nlohmann::json j;
    j["k"] = hp.k;
    j["l2"] = hp.l2;
    j["learning_rate"] = hp.learning_rate;
    j["max_epochs"] = hp.max_epochs;
    j["grad_tol"] = hp.grad_tol;
    j["nb_variance_floor"] = hp.nb_variance_floor;
    j["min_samples_split"] = hp.min_samples_split;
    j["trees"] = hp.trees;
    j["bootstrap"] = hp.bootstrap;
    j["subset_features"] = hp.subset_features;
    j["svm_c"] = hp.svm_c;
    if (hp.gamma) j["gamma"] = *hp.gamma;
    j["kkt_tol"] = hp.kkt_tol;
    j["max_passes"] = hp.max_passes;
    return j;
}

inline Hyperparams hyperparams_from_json(const nlohmann::json& j)
{
    Hyperparams hp;
    hp.k = j.value("k", hp.k);
    hp.l2 = j.value("l2", hp.l2);
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    hp.max_epochs = j.value("max_epochs", hp.max_epochs);
    hp.grad_tol = j.value("grad_tol", hp.grad_tol);
    hp.nb_variance_floor = j.value("nb_variance_floor", hp.nb_variance_floor);
    hp.min_samples_split = j.value("min_samples_split", hp.min_samples_split);
    hp.trees = j.value("trees", hp.trees);
    hp.bootstrap = j.value("bootstrap", hp.bootstrap);
    hp.subset_features = j.value("subset_features", hp.subset_features);
    hp.svm_c = j.value("svm_c", hp.svm_c);
    if (j.contains("gamma")) hp.gamma = j.at("gamma").get<double>();
    hp.kkt_tol = j.value("kkt_tol", hp.kkt_tol);
    hp.max_passes = j.value("max_passes", hp.max_passes);
    return hp;
}

inline nlohmann::json model_to_json(const Model& m)
{
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = to_string(m.kind);
    j["classes"] = m.classes;
    j["n_features"] = m.n_features;
    j["seed"] = m.spec.seed;
    j["hyperparams"] = hyperparams_to_json(m.spec.hp);
    j["converged"] = m.converged;
    if (m.scaler) {
        j["scaler"] = {{"mean", m.scaler->mean}, {"stddev", m.scaler->stddev}};
    }

    nlohmann::json p;
    switch (m.kind) {
        case ClassifierKind::lr:
        case ClassifierKind::svm_linear: {
            const auto& lin = std::get<LinearModel>(m.params);
            p["weights"] = lin.weights;
            p["bias"] = lin.bias;
            break;
        }
        case ClassifierKind::nb: {
            const auto& nb = std::get<NbModel>(m.params);
            p["log_prior"] = nb.log_prior;
            p["mean"] = nb.mean;
            p["variance"] = nb.variance;
            break;
        }
        case ClassifierKind::knn: {
            const auto& knn = std::get<KnnModel>(m.params);
            p["k"] = knn.k;
            p["train"] = knn.train;
            p["labels"] = knn.labels;
            break;
        }
        case ClassifierKind::dt:
        case ClassifierKind::rf: {
            auto tree_json = [](const TreeModel& t) {
                nlohmann::json nodes = nlohmann::json::array();
                for (const auto& nd : t.nodes) {
                    nlohmann::json n;
                    n["f"] = nd.feature;
                    n["t"] = nd.threshold;
                    n["l"] = nd.left;
                    n["r"] = nd.right;
                    if (nd.is_leaf()) n["d"] = nd.dist;
                    nodes.push_back(std::move(n));
                }
                return nodes;
            };
            if (m.kind == ClassifierKind::dt) {
                p["nodes"] = tree_json(std::get<TreeModel>(m.params));
            } else {
                const auto& forest = std::get<ForestModel>(m.params);
                p["features_per_split"] = forest.features_per_split;
                nlohmann::json trees = nlohmann::json::array();
                for (const auto& t : forest.trees) trees.push_back(tree_json(t));
                p["trees"] = std::move(trees);
            }
            break;
        }
        case ClassifierKind::svm_rbf: {
            const auto& svm = std::get<SvmRbfModel>(m.params);
            p["gamma"] = svm.gamma;
            nlohmann::json machines = nlohmann::json::array();
            for (const auto& bin : svm.per_class) {
                nlohmann::json b;
                b["support_vectors"] = bin.support_vectors;
                b["dual_coef"] = bin.dual_coef;
                b["bias"] = bin.bias;
                machines.push_back(std::move(b));
            }
            p["machines"] = std::move(machines);
            break;
        }
    }
    j["params"] = std::move(p);
    return j;
}

inline Model model_from_json(const nlohmann::json& j)
{
    if (j.value("format_version", -1) != kModelFormatVersion)
        throw DataError("unsupported model format version");

    Model m;
    m.kind = classifier_kind_from_string(j.at("kind").get<std::string>());
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.n_features = j.at("n_features").get<size_t>();
    m.spec.kind = m.kind;
    m.spec.seed = j.value("seed", 0ull);
    if (j.contains("hyperparams")) m.spec.hp = hyperparams_from_json(j.at("hyperparams"));
    m.converged = j.value("converged", true);
    if (j.contains("scaler")) {
        Standardizer s;
        s.mean = j.at("scaler").at("mean").get<std::vector<double>>();
        s.stddev = j.at("scaler").at("stddev").get<std::vector<double>>();
        m.scaler = std::move(s);
    }

    const auto& p = j.at("params");
    auto tree_from = [](const nlohmann::json& nodes) {
        TreeModel t;
        for (const auto& n : nodes) {
            TreeNode nd;
            nd.feature = n.at("f").get<int>();
            nd.threshold = n.at("t").get<double>();
            nd.left = n.at("l").get<int>();
            nd.right = n.at("r").get<int>();
            if (n.contains("d")) nd.dist = n.at("d").get<std::vector<double>>();
            t.nodes.push_back(std::move(nd));
        }
        return t;
    };

    switch (m.kind) {
        case ClassifierKind::lr:
        case ClassifierKind::svm_linear: {
            LinearModel lin;
            lin.weights = p.at("weights").get<std::vector<std::vector<double>>>();
            lin.bias = p.at("bias").get<std::vector<double>>();
            m.params = std::move(lin);
            break;
        }
        case ClassifierKind::nb: {
            NbModel nb;
            nb.log_prior = p.at("log_prior").get<std::vector<double>>();
            nb.mean = p.at("mean").get<std::vector<std::vector<double>>>();
            nb.variance = p.at("variance").get<std::vector<std::vector<double>>>();
            m.params = std::move(nb);
            break;
        }
        case ClassifierKind::knn: {
            KnnModel knn;
            knn.k = p.at("k").get<int>();
            knn.train = p.at("train").get<std::vector<std::vector<double>>>();
            knn.labels = p.at("labels").get<std::vector<int>>();
            m.params = std::move(knn);
            break;
        }
        case ClassifierKind::dt:
            m.params = tree_from(p.at("nodes"));
            break;
        case ClassifierKind::rf: {
            ForestModel forest;
            forest.features_per_split = p.value("features_per_split", 0);
            for (const auto& t : p.at("trees")) forest.trees.push_back(tree_from(t));
            m.params = std::move(forest);
            break;
        }
        case ClassifierKind::svm_rbf: {
            SvmRbfModel svm;
            svm.gamma = p.at("gamma").get<double>();
            for (const auto& b : p.at("machines")) {
                SvmRbfBinary bin;
                bin.support_vectors =
                    b.at("support_vectors").get<std::vector<std::vector<double>>>();
                bin.dual_coef = b.at("dual_coef").get<std::vector<double>>();
                bin.bias = b.at("bias").get<double>();
                svm.per_class.push_back(std::move(bin));
            }
            m.params = std::move(svm);
            break;
        }
    }
    return m;
}

}  // namespace mqttids

#endif  // MQTTIDS_CLASSIFIERS_HPP
