#ifndef MQTTIDS_LABELS_HPP
#define MQTTIDS_LABELS_HPP

#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "mqttids/common.hpp"

namespace mqttids {

enum class Scenario : uint8_t { normal = 0, scan_a, scan_su, sparta, mqtt_bf };

inline std::string to_string(Scenario s)
{
    switch (s) {
        case Scenario::normal: return "normal";
        case Scenario::scan_a: return "scan_A";
        case Scenario::scan_su: return "scan_sU";
        case Scenario::sparta: return "sparta";
        case Scenario::mqtt_bf: return "mqtt_bf";
    }
    return "normal";
}

inline Scenario scenario_from_string(const std::string& s)
{
    if (s == "normal") return Scenario::normal;
    if (s == "scan_A" || s == "scan_a") return Scenario::scan_a;
    if (s == "scan_sU" || s == "scan_su") return Scenario::scan_su;
    if (s == "sparta") return Scenario::sparta;
    if (s == "mqtt_bf") return Scenario::mqtt_bf;
    throw DataError("unknown scenario: " + s);
}

inline AttackClass attack_class_for(Scenario s)
{
    switch (s) {
        case Scenario::scan_a: return AttackClass::scan_a;
        case Scenario::scan_su: return AttackClass::scan_su;
        case Scenario::sparta: return AttackClass::sparta;
        case Scenario::mqtt_bf: return AttackClass::mqtt_bf;
        default: return AttackClass::benign;
    }
}

// Attacker-address ground truth for one capture scenario. Optional port and
// transport constraints narrow the attacker predicate when set.
struct LabelRuleSet {
    Scenario scenario = Scenario::normal;
    std::set<std::string> attacker_ips;
    AttackClass attack_class = AttackClass::benign;
    std::optional<uint16_t> require_port;  // matches src or dst port
    std::optional<uint8_t> require_proto;  // 6 or 17

    static LabelRuleSet for_scenario(Scenario s, std::set<std::string> attackers)
    {
        LabelRuleSet r;
        r.scenario = s;
        r.attack_class = attack_class_for(s);
        if (s != Scenario::normal) r.attacker_ips = std::move(attackers);
        return r;
    }
};

struct Label {
    int is_attack = 0;
    AttackClass cls = AttackClass::benign;

    bool operator==(const Label&) const = default;
};

// is_attack=1 iff either endpoint address matches the attacker set (and the
// optional constraints hold). Pure in (ips, rules); packet order never
// matters.
inline Label apply_label_rules(const std::string& ip_src, const std::string& ip_dest,
                               const LabelRuleSet& rules, uint16_t prt_src = 0,
                               uint16_t prt_dst = 0, uint8_t proto = 0)
{
    bool hit = rules.attacker_ips.count(ip_src) || rules.attacker_ips.count(ip_dest);
    if (hit && rules.require_port)
        hit = (prt_src == *rules.require_port || prt_dst == *rules.require_port);
    if (hit && rules.require_proto) hit = (proto == *rules.require_proto);
    if (!hit) return {0, AttackClass::benign};
    return {1, rules.attack_class};
}

inline nlohmann::json label_rules_to_json(const LabelRuleSet& rules)
{
    nlohmann::json j;
    j["scenario"] = to_string(rules.scenario);
    j["attacker_ips"] = rules.attacker_ips;
    j["attack_class"] = to_string(rules.attack_class);
    if (rules.require_port) j["require_port"] = *rules.require_port;
    if (rules.require_proto) j["require_proto"] = *rules.require_proto;
    return j;
}

inline LabelRuleSet label_rules_from_json(const nlohmann::json& j)
{
    LabelRuleSet rules;
    rules.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    if (j.contains("attacker_ips"))
        for (const auto& ip : j.at("attacker_ips")) rules.attacker_ips.insert(ip.get<std::string>());
    if (j.contains("attack_class"))
        rules.attack_class = attack_class_from_string(j.at("attack_class").get<std::string>());
    else
        rules.attack_class = attack_class_for(rules.scenario);
    if (j.contains("require_port")) rules.require_port = j.at("require_port").get<uint16_t>();
    if (j.contains("require_proto")) rules.require_proto = j.at("require_proto").get<uint8_t>();
    if (rules.scenario == Scenario::normal && !rules.attacker_ips.empty())
        throw DataError("normal scenario must have no attacker ips");
    return rules;
}

inline LabelRuleSet load_label_rules(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad label rules file " + path + ": " + e.what());
    }
    return label_rules_from_json(j);
}

inline void save_label_rules(const LabelRuleSet& rules, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << label_rules_to_json(rules).dump(2) << "\n";
}

}  // namespace mqttids

#endif  // MQTTIDS_LABELS_HPP
