#ifndef MQTTIDS_CLI_HPP
#define MQTTIDS_CLI_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mqttids/classifiers.hpp"
#include "mqttids/common.hpp"
#include "mqttids/eval.hpp"
#include "mqttids/features.hpp"
#include "mqttids/flow.hpp"
#include "mqttids/labels.hpp"
#include "mqttids/packet.hpp"
#include "mqttids/pcap.hpp"
#include "mqttids/synth.hpp"
#include "mqttids/table.hpp"

namespace mqttids::cli {

// Echoed verbatim into every output so a run can be reproduced from the
// output alone.
struct RunManifest {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::string level;
    std::vector<std::string> rules;
    std::string model;
    nlohmann::json classifier_spec;
    uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::string tool_version = kToolVersion;
};

inline nlohmann::json manifest_to_json(const RunManifest& m)
{
    nlohmann::json j;
    j["subcommand"] = m.subcommand;
    j["inputs"] = m.inputs;
    if (!m.level.empty()) j["level"] = m.level;
    if (!m.rules.empty()) j["rules"] = m.rules;
    if (!m.model.empty()) j["model"] = m.model;
    if (!m.classifier_spec.is_null()) j["classifier_spec"] = m.classifier_spec;
    j["seed"] = m.seed;
    j["outputs"] = m.outputs;
    j["tool_version"] = m.tool_version;
    return j;
}

namespace detail {

inline void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
}

// Binary and CSV outputs cannot embed the manifest, so it rides alongside.
inline void write_manifest_sidecar(const std::string& out_path, const RunManifest& m)
{
    write_text_file(out_path + ".manifest.json", manifest_to_json(m).dump(2) + "\n");
}

inline uint64_t default_seed()
{
    if (const char* env = std::getenv("MQTTIDS_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            // fall through to the fixed default
        }
    }
    return 1;
}

// Tables written by `extract` still carry the address columns; drop them (and
// the MQTT flags on packet tables) before anything touches a model.
inline FeatureTable training_view(const FeatureTable& t)
{
    if (t.has_column("ip_src")) return drop_leaky_columns(t);
    return t;
}

inline FeatureTable load_features(const std::string& path)
{
    return read_feature_csv(path);
}

inline void emit_result(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) std::cout << text;
    else write_text_file(out_path, text);
}

}  // namespace detail

// Pipeline front end. Returns the process exit status: 0 success, 1 usage
// error, 2 data error. Diagnostics go to stderr, results to --out or stdout.
inline int run(const std::vector<std::string>& args)
{
    CLI::App app{"MQTT intrusion-detection pipeline"};
    app.require_subcommand(1);

    // --- synth -------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a scenario capture");
    std::string synth_scenario;
    std::string synth_out;
    std::string synth_rules_out, synth_truth_out;
    ScenarioConfig scfg;
    uint64_t synth_seed = detail::default_seed();
    synth->add_option("--scenario", synth_scenario, "normal|scan_A|scan_sU|sparta|mqtt_bf")
        ->required();
    synth->add_option("--seed", synth_seed, "rng seed");
    synth->add_option("--out", synth_out, "output pcap path")->required();
    synth->add_option("--duration", scfg.duration, "benign substrate seconds");
    synth->add_option("--sensors", scfg.sensor_count, "number of MQTT sensors");
    synth->add_option("--attacker-ip", scfg.attacker_ip, "attacker address");
    synth->add_option("--broker-ip", scfg.broker_ip, "broker address");
    synth->add_option("--rules-out", synth_rules_out, "also write the label rules JSON");
    synth->add_option("--truth-out", synth_truth_out,
                      "ground truth path (default <out>.truth.json)");

    // --- extract -----------------------------------------------------------
    auto* extract = app.add_subcommand("extract", "pcap to feature CSV");
    std::string extract_level;
    std::vector<std::string> extract_inputs, extract_rules;
    std::string extract_out;
    extract->add_option("--level", extract_level, "packet|uniflow|biflow")->required();
    extract->add_option("--input", extract_inputs, "input pcap (repeatable)")->required();
    extract->add_option("--rules", extract_rules, "label rules JSON, one per input")
        ->required();
    extract->add_option("--out", extract_out, "output CSV path")->required();

    // --- train ---------------------------------------------------------------
    auto* train = app.add_subcommand("train", "fit a classifier");
    std::string train_model, train_features, train_out;
    uint64_t train_seed = detail::default_seed();
    train->add_option("--model", train_model, "lr|nb|knn|dt|rf|svm-linear|svm-rbf")
        ->required();
    train->add_option("--features", train_features, "feature CSV")->required();
    train->add_option("--seed", train_seed, "rng seed");
    train->add_option("--out", train_out, "model JSON path")->required();

    // --- evaluate ------------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "score a model on labelled features");
    std::string eval_model, eval_features, eval_format = "text", eval_out;
    evaluate->add_option("--model", eval_model, "model JSON path")->required();
    evaluate->add_option("--features", eval_features, "feature CSV")->required();
    evaluate->add_option("--format", eval_format, "json|text")
        ->check(CLI::IsMember({"json", "text"}));
    evaluate->add_option("--out", eval_out, "output path (default stdout)");

    // --- crossval ------------------------------------------------------------
    auto* crossval = app.add_subcommand("crossval", "stratified k-fold cross-validation");
    std::string cv_model, cv_features, cv_format = "text", cv_out;
    size_t cv_folds = 5;
    uint64_t cv_seed = detail::default_seed();
    crossval->add_option("--model", cv_model, "classifier kind")->required();
    crossval->add_option("--features", cv_features, "feature CSV")->required();
    crossval->add_option("--folds", cv_folds, "number of folds");
    crossval->add_option("--seed", cv_seed, "rng seed");
    crossval->add_option("--format", cv_format, "json|text")
        ->check(CLI::IsMember({"json", "text"}));
    crossval->add_option("--out", cv_out, "output path (default stdout)");

    // --- report --------------------------------------------------------------
    auto* report = app.add_subcommand("report", "combine evaluation JSONs into one report");
    std::string report_dir, report_format = "text", report_out;
    report->add_option("--in", report_dir, "directory of evaluation JSON files")->required();
    report->add_option("--format", report_format, "json|text")
        ->check(CLI::IsMember({"json", "text"}));
    report->add_option("--out", report_out, "output path (default stdout)");

    std::vector<const char*> argv;
    argv.push_back("mqttids");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (synth->parsed()) {
            scfg.scenario = scenario_from_string(synth_scenario);
            scfg.seed = synth_seed;
            GeneratedCapture cap = generate_capture(scfg);

            RunManifest man;
            man.subcommand = "synth";
            man.level = "";
            man.seed = synth_seed;
            man.classifier_spec = nullptr;
            man.inputs = {};
            man.outputs = {synth_out};

            std::ofstream out(synth_out, std::ios::binary);
            if (!out) throw DataError("cannot write " + synth_out);
            out.write(reinterpret_cast<const char*>(cap.pcap.data()),
                      static_cast<std::streamsize>(cap.pcap.size()));
            out.close();

            std::string truth_path =
                synth_truth_out.empty() ? synth_out + ".truth.json" : synth_truth_out;
            nlohmann::json truth = nlohmann::json::array();
            for (const auto& lbl : cap.truth)
                truth.push_back({{"is_attack", lbl.is_attack}, {"class", to_string(lbl.cls)}});
            man.outputs.push_back(truth_path);
            nlohmann::json tj;
            tj["manifest"] = manifest_to_json(man);
            tj["scenario"] = synth_scenario;
            tj["packets"] = cap.truth.size();
            tj["truth"] = std::move(truth);
            detail::write_text_file(truth_path, tj.dump() + "\n");

            if (!synth_rules_out.empty()) save_label_rules(cap.rules, synth_rules_out);
            detail::write_manifest_sidecar(synth_out, man);
            std::cerr << "wrote " << cap.truth.size() << " packets to " << synth_out << "\n";
            return 0;
        }

        if (extract->parsed()) {
            if (extract_rules.size() != extract_inputs.size())
                throw UsageError("--rules must be given once per --input");
            FeatureLevel level = feature_level_from_string(extract_level);

            RunManifest man;
            man.subcommand = "extract";
            man.inputs = extract_inputs;
            man.level = extract_level;
            man.rules = extract_rules;
            man.outputs = {extract_out};

            FeatureTable table;
            bool first = true;
            ParseDiagnostics diag;
            for (size_t i = 0; i < extract_inputs.size(); ++i) {
                LabelRuleSet rules = load_label_rules(extract_rules[i]);
                std::vector<ParsedPacket> packets;
                {
                    std::ifstream in(extract_inputs[i], std::ios::binary);
                    if (!in) throw DataError("cannot open " + extract_inputs[i]);
                    PcapReader reader(in);
                    RawFrame frame;
                    while (reader.next(frame)) {
                        ParseResult res = parse_packet(frame, {}, &diag);
                        if (res.ok()) packets.push_back(std::move(res.packet));
                    }
                }
                FeatureTable part;
                if (level == FeatureLevel::packet) {
                    std::vector<PacketFeatureRecord> records;
                    records.reserve(packets.size());
                    for (const auto& p : packets)
                        records.push_back(extract_packet_features(p, rules));
                    part = packet_feature_table(records, extract_inputs[i]);
                } else {
                    std::stable_sort(packets.begin(), packets.end(),
                                     [](const ParsedPacket& a, const ParsedPacket& b) {
                                         return a.timestamp < b.timestamp;
                                     });
                    if (level == FeatureLevel::uniflow)
                        part = uniflow_table(assemble_uniflows(packets, rules),
                                             extract_inputs[i]);
                    else
                        part = biflow_table(assemble_biflows(packets, rules),
                                            extract_inputs[i]);
                }
                if (first) {
                    table = std::move(part);
                    first = false;
                } else {
                    table.append(part);
                }
            }
            write_feature_csv(table, extract_out);
            detail::write_manifest_sidecar(extract_out, man);
            std::cerr << "parsed " << diag.packets << " packets (" << diag.skipped
                      << " skipped, " << diag.malformed << " malformed, "
                      << diag.mqtt_split_dropped << " split mqtt dropped, "
                      << diag.mqtt_extra_messages << " extra mqtt messages); wrote "
                      << table.n_rows() << " rows to " << extract_out << "\n";
            return 0;
        }

        if (train->parsed()) {
            ClassifierSpec spec;
            spec.kind = classifier_kind_from_string(train_model);
            spec.seed = train_seed;

            RunManifest man;
            man.subcommand = "train";
            man.inputs = {train_features};
            man.model = train_model;
            man.seed = train_seed;
            man.classifier_spec = hyperparams_to_json(spec.hp);
            man.outputs = {train_out};

            FeatureTable table = detail::training_view(detail::load_features(train_features));
            man.level = to_string(table.level);
            Model model = fit(spec, table);

            nlohmann::json j = model_to_json(model);
            j["manifest"] = manifest_to_json(man);
            detail::write_text_file(train_out, j.dump() + "\n");
            std::cerr << "trained " << train_model << " on " << table.n_rows() << " rows ("
                      << table.n_columns() << " features)\n";
            return 0;
        }

        if (evaluate->parsed()) {
            std::ifstream in(eval_model);
            if (!in) throw DataError("cannot open " + eval_model);
            nlohmann::json mj;
            try {
                in >> mj;
            } catch (const nlohmann::json::exception& e) {
                throw DataError(std::string("bad model file: ") + e.what());
            }
            Model model = model_from_json(mj);

            FeatureTable table = detail::training_view(detail::load_features(eval_features));
            auto preds = predict_labels(model, table);
            EvalReport rep = evaluate_predictions(table.class_labels, preds);
            rep.kind = model.kind;
            rep.spec = model.spec;
            rep.level = table.level;

            RunManifest man;
            man.subcommand = "evaluate";
            man.inputs = {eval_model, eval_features};
            man.level = to_string(table.level);
            man.model = to_string(model.kind);
            man.seed = model.spec.seed;
            man.classifier_spec = hyperparams_to_json(model.spec.hp);
            if (!eval_out.empty()) man.outputs = {eval_out};

            if (eval_format == "json") {
                nlohmann::json j = eval_report_to_json(rep);
                j["manifest"] = manifest_to_json(man);
                detail::emit_result(j.dump() + "\n", eval_out);
            } else {
                detail::emit_result(eval_report_text(rep), eval_out);
                if (!eval_out.empty()) detail::write_manifest_sidecar(eval_out, man);
            }
            return 0;
        }

        if (crossval->parsed()) {
            ClassifierSpec spec;
            spec.kind = classifier_kind_from_string(cv_model);
            spec.seed = cv_seed;

            FeatureTable table = detail::training_view(detail::load_features(cv_features));
            EvalReport rep = cross_validate(spec, table, cv_folds, cv_seed);

            RunManifest man;
            man.subcommand = "crossval";
            man.inputs = {cv_features};
            man.level = to_string(table.level);
            man.model = cv_model;
            man.seed = cv_seed;
            man.classifier_spec = hyperparams_to_json(spec.hp);
            if (!cv_out.empty()) man.outputs = {cv_out};

            if (cv_format == "json") {
                nlohmann::json j = eval_report_to_json(rep);
                j["manifest"] = manifest_to_json(man);
                detail::emit_result(j.dump() + "\n", cv_out);
            } else {
                detail::emit_result(eval_report_text(rep), cv_out);
                if (!cv_out.empty()) detail::write_manifest_sidecar(cv_out, man);
            }
            return 0;
        }

        if (report->parsed()) {
            ReportBundle bundle;
            std::vector<std::filesystem::path> files;
            for (const auto& entry : std::filesystem::directory_iterator(report_dir))
                if (entry.is_regular_file() && entry.path().extension() == ".json")
                    files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& path : files) {
                std::ifstream in(path);
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception&) {
                    continue;
                }
                if (!j.contains("model") || !j.contains("level")) continue;
                EvalReport rep = eval_report_from_json(j);
                bundle[{rep.kind, rep.level}] = std::move(rep);
            }
            if (bundle.empty())
                throw DataError("no evaluation reports found in " + report_dir);

            RenderedReport rendered = render_report(bundle);
            RunManifest man;
            man.subcommand = "report";
            man.inputs = {report_dir};
            if (!report_out.empty()) man.outputs = {report_out};
            if (report_format == "json") {
                nlohmann::json j = rendered.machine;
                j["manifest"] = manifest_to_json(man);
                detail::emit_result(j.dump() + "\n", report_out);
            } else {
                detail::emit_result(rendered.text, report_out);
                if (!report_out.empty()) detail::write_manifest_sidecar(report_out, man);
            }
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

inline int run(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace mqttids::cli

#endif  // MQTTIDS_CLI_HPP
