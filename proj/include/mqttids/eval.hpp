#ifndef MQTTIDS_EVAL_HPP
#define MQTTIDS_EVAL_HPP

#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mqttids/classifiers.hpp"
#include "mqttids/common.hpp"
#include "mqttids/table.hpp"

namespace mqttids {

// ---------------------------------------------------------------------------
// Confusion matrix and per-class metrics
// ---------------------------------------------------------------------------

struct ConfusionMatrix {
    std::vector<std::string> classes;            // canonical order
    std::vector<std::vector<uint64_t>> counts;   // [truth][pred]

    uint64_t total() const
    {
        uint64_t t = 0;
        for (const auto& row : counts)
            for (uint64_t c : row) t += c;
        return t;
    }

    uint64_t trace() const
    {
        uint64_t t = 0;
        for (size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
        return t;
    }
};

inline ConfusionMatrix confusion_matrix(const std::vector<std::string>& truth,
                                        const std::vector<std::string>& preds)
{
    if (truth.size() != preds.size())
        throw LengthMismatch("truth and predictions differ in length");
    if (truth.empty()) throw LengthMismatch("no rows to evaluate");

    std::vector<std::string> observed = truth;
    observed.insert(observed.end(), preds.begin(), preds.end());

    ConfusionMatrix cm;
    cm.classes = canonical_class_order(observed);
    cm.counts.assign(cm.classes.size(), std::vector<uint64_t>(cm.classes.size(), 0));

    std::map<std::string, size_t> index;
    for (size_t i = 0; i < cm.classes.size(); ++i) index[cm.classes[i]] = i;
    for (size_t i = 0; i < truth.size(); ++i) ++cm.counts[index[truth[i]]][index[preds[i]]];
    return cm;
}

inline double overall_accuracy(const ConfusionMatrix& cm)
{
    uint64_t total = cm.total();
    if (total == 0) throw EmptyMatrix();
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    uint64_t support = 0;
};

// One-vs-rest counts per class; zero denominators yield 0 by convention.
inline std::map<std::string, ClassMetrics> per_class_metrics(const ConfusionMatrix& cm)
{
    std::map<std::string, ClassMetrics> out;
    size_t k = cm.classes.size();
    for (size_t c = 0; c < k; ++c) {
        uint64_t tp = cm.counts[c][c];
        uint64_t fp = 0, fn = 0;
        for (size_t o = 0; o < k; ++o) {
            if (o == c) continue;
            fp += cm.counts[o][c];
            fn += cm.counts[c][o];
        }
        ClassMetrics m;
        m.support = tp + fn;
        m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.f1 = 2 * tp + fp + fn > 0
                   ? 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn)
                   : 0.0;
        out[cm.classes[c]] = m;
    }
    return out;
}

struct WeightedMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Support-weighted means. The weighted recall coincides with the overall
// accuracy (both reduce to trace/total).
inline WeightedMetrics weighted_average(const std::map<std::string, ClassMetrics>& per_class,
                                        const ConfusionMatrix& cm)
{
    WeightedMetrics w;
    double total = static_cast<double>(cm.total());
    for (const auto& [cls, m] : per_class) {
        double weight = static_cast<double>(m.support) / total;
        w.precision += weight * m.precision;
        w.recall += weight * m.recall;
        w.f1 += weight * m.f1;
    }
    return w;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct FoldReport {
    ConfusionMatrix cm;
    double accuracy = 0.0;
    WeightedMetrics weighted;
};

struct EvalReport {
    ClassifierKind kind = ClassifierKind::dt;
    ClassifierSpec spec;
    FeatureLevel level = FeatureLevel::packet;
    ConfusionMatrix cm;  // pooled out-of-fold matrix for cross-validation
    std::map<std::string, ClassMetrics> per_class;
    WeightedMetrics weighted;
    double overall_accuracy = 0.0;
    std::vector<FoldReport> folds;
};

inline EvalReport evaluate_predictions(const std::vector<std::string>& truth,
                                       const std::vector<std::string>& preds)
{
    EvalReport r;
    r.cm = confusion_matrix(truth, preds);
    r.per_class = per_class_metrics(r.cm);
    r.weighted = weighted_average(r.per_class, r.cm);
    r.overall_accuracy = mqttids::overall_accuracy(r.cm);
    return r;
}

// Seeded stratified partition: within each class rows are shuffled and dealt
// round-robin, so per-class fold sizes differ by at most one.
inline std::vector<std::vector<size_t>> stratified_folds(const std::vector<std::string>& labels,
                                                         size_t k, uint64_t seed)
{
    if (k < 2) throw InvalidConfig("folds must be >= 2");
    std::map<std::string, std::vector<size_t>> by_class;
    for (size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (const auto& [cls, rows] : by_class)
        if (rows.size() < k)
            throw InsufficientClassRows("class " + cls + " has " +
                                        std::to_string(rows.size()) + " rows, needs >= " +
                                        std::to_string(k));

    std::vector<std::string> order;
    for (const auto& [cls, rows] : by_class) order.push_back(cls);
    order = canonical_class_order(order);

    Rng rng(seed);
    std::vector<std::vector<size_t>> folds(k);
    for (const auto& cls : order) {
        auto rows = by_class[cls];
        rng.shuffle(rows);
        for (size_t i = 0; i < rows.size(); ++i) folds[i % k].push_back(rows[i]);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

// Trainer signature for cross_validate: gets the fold's training and test
// tables, returns one predicted label per test row.
using FoldTrainer =
    std::function<std::vector<std::string>(const FeatureTable&, const FeatureTable&)>;

inline EvalReport cross_validate_custom(const FeatureTable& t, size_t k, uint64_t seed,
                                        const FoldTrainer& trainer)
{
    auto folds = stratified_folds(t.class_labels, k, seed);

    std::vector<std::string> pooled_truth, pooled_pred;
    std::vector<FoldReport> fold_reports;
    for (size_t f = 0; f < folds.size(); ++f) {
        std::vector<size_t> train_idx;
        for (size_t g = 0; g < folds.size(); ++g)
            if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        std::sort(train_idx.begin(), train_idx.end());

        FeatureTable train = t.select_rows(train_idx);
        FeatureTable test = t.select_rows(folds[f]);
        auto preds = trainer(train, test);
        if (preds.size() != test.n_rows())
            throw LengthMismatch("trainer returned wrong number of predictions");

        FoldReport fr;
        fr.cm = confusion_matrix(test.class_labels, preds);
        fr.accuracy = overall_accuracy(fr.cm);
        fr.weighted = weighted_average(per_class_metrics(fr.cm), fr.cm);
        fold_reports.push_back(std::move(fr));

        pooled_truth.insert(pooled_truth.end(), test.class_labels.begin(),
                            test.class_labels.end());
        pooled_pred.insert(pooled_pred.end(), preds.begin(), preds.end());
    }

    EvalReport r = evaluate_predictions(pooled_truth, pooled_pred);
    r.level = t.level;
    r.folds = std::move(fold_reports);
    return r;
}

// Stratified k-fold cross-validation of one classifier spec. Models are
// refit per fold (including any internal standardizer), and the headline
// numbers come from the pooled out-of-fold confusion matrix.
inline EvalReport cross_validate(const ClassifierSpec& spec, const FeatureTable& t, size_t k,
                                 uint64_t seed)
{
    EvalReport r = cross_validate_custom(
        t, k, seed, [&](const FeatureTable& train, const FeatureTable& test) {
            Model m = fit(spec, train);
            return predict_labels(m, test);
        });
    r.kind = spec.kind;
    r.spec = spec;
    return r;
}

// ---------------------------------------------------------------------------
// Report serialization and rendering
// ---------------------------------------------------------------------------

inline nlohmann::json eval_report_to_json(const EvalReport& r)
{
    nlohmann::json j;
    j["model"] = to_string(r.kind);
    j["level"] = to_string(r.level);
    j["seed"] = r.spec.seed;
    j["hyperparams"] = hyperparams_to_json(r.spec.hp);
    j["overall_accuracy"] = r.overall_accuracy;
    j["weighted"] = {{"precision", r.weighted.precision},
                     {"recall", r.weighted.recall},
                     {"f1", r.weighted.f1}};
    nlohmann::json pc;
    for (const auto& [cls, m] : r.per_class)
        pc[cls] = {{"precision", m.precision},
                   {"recall", m.recall},
                   {"f1", m.f1},
                   {"support", m.support}};
    j["per_class"] = std::move(pc);
    j["confusion"] = {{"classes", r.cm.classes}, {"counts", r.cm.counts}};
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds)
        folds.push_back({{"accuracy", f.accuracy},
                         {"weighted",
                          {{"precision", f.weighted.precision},
                           {"recall", f.weighted.recall},
                           {"f1", f.weighted.f1}}},
                         {"confusion", {{"classes", f.cm.classes}, {"counts", f.cm.counts}}}});
    j["folds"] = std::move(folds);
    return j;
}

inline EvalReport eval_report_from_json(const nlohmann::json& j)
{
    EvalReport r;
    r.kind = classifier_kind_from_string(j.at("model").get<std::string>());
    r.spec.kind = r.kind;
    r.spec.seed = j.value("seed", 0ull);
    if (j.contains("hyperparams")) r.spec.hp = hyperparams_from_json(j.at("hyperparams"));
    r.level = feature_level_from_string(j.at("level").get<std::string>());
    r.overall_accuracy = j.at("overall_accuracy").get<double>();
    r.weighted.precision = j.at("weighted").at("precision").get<double>();
    r.weighted.recall = j.at("weighted").at("recall").get<double>();
    r.weighted.f1 = j.at("weighted").at("f1").get<double>();
    if (j.contains("per_class")) {
        for (const auto& [cls, m] : j.at("per_class").items()) {
            ClassMetrics cm;
            cm.precision = m.at("precision").get<double>();
            cm.recall = m.at("recall").get<double>();
            cm.f1 = m.at("f1").get<double>();
            cm.support = m.value("support", 0ull);
            r.per_class[cls] = cm;
        }
    }
    if (j.contains("confusion")) {
        r.cm.classes = j.at("confusion").at("classes").get<std::vector<std::string>>();
        r.cm.counts = j.at("confusion").at("counts").get<std::vector<std::vector<uint64_t>>>();
    }
    return r;
}

// Plain-text summary of one evaluation.
inline std::string eval_report_text(const EvalReport& r)
{
    std::ostringstream os;
    os << "model: " << to_string(r.kind) << "   features: " << to_string(r.level)
       << "   seed: " << r.spec.seed << "\n";
    os << "overall accuracy: " << format_pct(r.overall_accuracy) << "%\n";
    os << std::left << std::setw(12) << "class" << std::setw(12) << "recall"
       << std::setw(12) << "precision" << std::setw(12) << "f1" << "support\n";
    for (const auto& cls : r.cm.classes) {
        const auto& m = r.per_class.at(cls);
        os << std::left << std::setw(12) << cls << std::setw(12) << format_pct(m.recall)
           << std::setw(12) << format_pct(m.precision) << std::setw(12) << format_pct(m.f1)
           << m.support << "\n";
    }
    os << std::left << std::setw(12) << "weighted" << std::setw(12)
       << format_pct(r.weighted.recall) << std::setw(12) << format_pct(r.weighted.precision)
       << std::setw(12) << format_pct(r.weighted.f1) << r.cm.total() << "\n";
    if (!r.folds.empty()) {
        os << "per-fold accuracy:";
        for (const auto& f : r.folds) os << " " << format_pct(f.accuracy);
        os << "\n";
    }
    return os.str();
}

// Display order for the classifier rows of the rendered grids.
inline const std::vector<ClassifierKind>& report_row_order()
{
    static const std::vector<ClassifierKind> order = {
        ClassifierKind::lr,        ClassifierKind::knn, ClassifierKind::dt,
        ClassifierKind::rf,        ClassifierKind::svm_rbf,
        ClassifierKind::nb,        ClassifierKind::svm_linear};
    return order;
}

using ReportBundle = std::map<std::pair<ClassifierKind, FeatureLevel>, EvalReport>;

struct RenderedReport {
    nlohmann::json machine;
    std::string text;
};

// Aggregates a bundle of evaluations into the overall-accuracy grid, the
// per-class blocks, and cross-classifier mean rows per feature level.
inline RenderedReport render_report(const ReportBundle& reports)
{
    if (reports.empty()) throw DataError("no reports to render");

    const std::vector<FeatureLevel> levels = {FeatureLevel::packet, FeatureLevel::uniflow,
                                              FeatureLevel::biflow};

    RenderedReport out;
    nlohmann::json& j = out.machine;

    auto find = [&](ClassifierKind k, FeatureLevel lv) -> const EvalReport* {
        auto it = reports.find({k, lv});
        return it == reports.end() ? nullptr : &it->second;
    };

    // Overall-accuracy grid.
    for (ClassifierKind k : report_row_order()) {
        for (FeatureLevel lv : levels) {
            if (const EvalReport* r = find(k, lv))
                j["overall_accuracy"][to_string(k)][to_string(lv)] = r->overall_accuracy;
        }
    }

    // Per-class and weighted blocks.
    for (const auto& [key, r] : reports) {
        const auto& [kind, level] = key;
        nlohmann::json block;
        for (const auto& [cls, m] : r.per_class)
            block[cls] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
        j["per_class"][to_string(kind)][to_string(level)] = std::move(block);
        j["weighted"][to_string(kind)][to_string(level)] = {
            {"precision", r.weighted.precision},
            {"recall", r.weighted.recall},
            {"f1", r.weighted.f1}};
    }

    // Cross-classifier means of the weighted rows, one per feature level.
    for (FeatureLevel lv : levels) {
        WeightedMetrics sum;
        int n = 0;
        for (const auto& [key, r] : reports) {
            if (key.second != lv) continue;
            sum.precision += r.weighted.precision;
            sum.recall += r.weighted.recall;
            sum.f1 += r.weighted.f1;
            ++n;
        }
        if (n == 0) continue;
        j["aggregate"][to_string(lv)] = {
            {"mean_weighted_precision", sum.precision / n},
            {"mean_weighted_recall", sum.recall / n},
            {"mean_weighted_f1", sum.f1 / n},
            {"classifiers", n}};
    }

    // Plain-text rendering.
    std::ostringstream os;
    auto cell = [](const std::string& s, int w) {
        std::ostringstream c;
        c << std::left << std::setw(w) << s;
        return c.str();
    };

    os << "Overall accuracy (%)\n";
    os << cell("model", 12);
    for (FeatureLevel lv : levels) os << cell(to_string(lv), 10);
    os << "\n";
    for (ClassifierKind k : report_row_order()) {
        bool any = false;
        for (FeatureLevel lv : levels) any = any || find(k, lv);
        if (!any) continue;
        os << cell(to_string(k), 12);
        for (FeatureLevel lv : levels) {
            const EvalReport* r = find(k, lv);
            os << cell(r ? format_pct(r->overall_accuracy) : "-", 10);
        }
        os << "\n";
    }

    for (ClassifierKind k : report_row_order()) {
        bool any = false;
        for (FeatureLevel lv : levels) any = any || find(k, lv);
        if (!any) continue;
        os << "\n[" << to_string(k) << "] per-class recall / precision / F1 (%)\n";
        os << cell("class", 18);
        for (FeatureLevel lv : levels) os << cell(to_string(lv), 27);
        os << "\n";

        std::vector<std::string> classes;
        for (FeatureLevel lv : levels)
            if (const EvalReport* r = find(k, lv))
                for (const auto& [cls, m] : r->per_class) classes.push_back(cls);
        classes = canonical_class_order(classes);

        for (const auto& cls : classes) {
            os << cell(cls, 18);
            for (FeatureLevel lv : levels) {
                const EvalReport* r = find(k, lv);
                if (r && r->per_class.count(cls)) {
                    const auto& m = r->per_class.at(cls);
                    os << cell(format_pct(m.recall) + " / " + format_pct(m.precision) + " / " +
                                   format_pct(m.f1),
                               27);
                } else {
                    os << cell("-", 27);
                }
            }
            os << "\n";
        }
        os << cell("weighted avg", 18);
        for (FeatureLevel lv : levels) {
            const EvalReport* r = find(k, lv);
            if (r) {
                os << cell(format_pct(r->weighted.recall) + " / " +
                               format_pct(r->weighted.precision) + " / " +
                               format_pct(r->weighted.f1),
                           27);
            } else {
                os << cell("-", 27);
            }
        }
        os << "\n";
    }

    if (j.contains("aggregate")) {
        os << "\nCross-classifier mean of weighted metrics (%)\n";
        os << cell("level", 12) << cell("recall", 10) << cell("precision", 12)
           << cell("f1", 10) << "\n";
        for (FeatureLevel lv : levels) {
            if (!j["aggregate"].contains(to_string(lv))) continue;
            const auto& a = j["aggregate"][to_string(lv)];
            os << cell(to_string(lv), 12)
               << cell(format_pct(a["mean_weighted_recall"].get<double>()), 10)
               << cell(format_pct(a["mean_weighted_precision"].get<double>()), 12)
               << cell(format_pct(a["mean_weighted_f1"].get<double>()), 10) << "\n";
        }
    }

    out.text = os.str();
    return out;
}

}  // namespace mqttids

#endif  // MQTTIDS_EVAL_HPP
