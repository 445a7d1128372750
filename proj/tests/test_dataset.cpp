#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "mqttids/features.hpp"
#include "mqttids/labels.hpp"
#include "mqttids/table.hpp"

using namespace mqttids;

namespace {

// Small numeric table in the dropped-uniflow shape for split/standardize
// tests.
FeatureTable toy_table(size_t n, testutil::Rng& rng, const std::vector<std::string>& classes)
{
    FeatureTable t = make_table(
        FeatureLevel::uniflow,
        schema::without(schema::uniflow_full(),
                        schema::leaky_columns(FeatureLevel::uniflow, false)));
    for (size_t i = 0; i < n; ++i) {
        for (auto& c : t.columns) c.num.push_back(rng.range(0.0, 100.0));
        const std::string& cls = classes[i % classes.size()];
        t.class_labels.push_back(cls);
        t.is_attack.push_back(cls == "Benign" ? 0 : 1);
    }
    return t;
}

}  // namespace

TEST_CASE("label rules")
{
    SECTION("normal scenario labels everything benign")
    {
        auto rules = LabelRuleSet::for_scenario(Scenario::normal, {});
        CHECK(apply_label_rules("1.2.3.4", "5.6.7.8", rules) == Label{0, AttackClass::benign});
    }
    SECTION("attacker as source or destination")
    {
        auto rules = LabelRuleSet::for_scenario(Scenario::sparta, {"10.0.0.66"});
        CHECK(apply_label_rules("10.0.0.66", "10.0.0.2", rules) ==
              Label{1, AttackClass::sparta});
        CHECK(apply_label_rules("10.0.0.2", "10.0.0.66", rules) ==
              Label{1, AttackClass::sparta});
        CHECK(apply_label_rules("10.0.0.2", "10.0.0.3", rules) ==
              Label{0, AttackClass::benign});
    }
    SECTION("optional port constraint narrows the predicate")
    {
        auto rules = LabelRuleSet::for_scenario(Scenario::sparta, {"10.0.0.66"});
        rules.require_port = 22;
        CHECK(apply_label_rules("10.0.0.66", "10.0.0.2", rules, 4000, 22).is_attack == 1);
        CHECK(apply_label_rules("10.0.0.66", "10.0.0.2", rules, 4000, 80).is_attack == 0);
    }
    SECTION("json round trip")
    {
        auto rules = LabelRuleSet::for_scenario(Scenario::mqtt_bf, {"10.0.0.66", "10.0.0.67"});
        auto back = label_rules_from_json(label_rules_to_json(rules));
        CHECK(back.scenario == rules.scenario);
        CHECK(back.attacker_ips == rules.attacker_ips);
        CHECK(back.attack_class == rules.attack_class);
    }
    SECTION("normal scenario with attackers is rejected")
    {
        nlohmann::json j = {{"scenario", "normal"}, {"attacker_ips", {"1.2.3.4"}}};
        CHECK_THROWS_AS(label_rules_from_json(j), DataError);
    }
}

TEST_CASE("drop_leaky_columns on the packet table")
{
    FeatureTable t = make_table(FeatureLevel::packet, schema::packet_full());
    CHECK(t.n_columns() == 29);
    FeatureTable dropped = drop_leaky_columns(t);
    CHECK(dropped.n_columns() == 19);
    CHECK_FALSE(dropped.has_column("ip_src"));
    CHECK_FALSE(dropped.has_column("ip_dest"));
    CHECK_FALSE(dropped.has_column("protocol"));
    CHECK_FALSE(dropped.has_column("mqtt_flag_uname"));
    CHECK_FALSE(dropped.has_column("mqtt_flag_qos"));
    CHECK(dropped.has_column("mqtt_messagetype"));
    CHECK(dropped.has_column("mqtt_messagelength"));
    CHECK(dropped.all_numeric());

    SECTION("message type and length can be dropped too")
    {
        FeatureTable bare = drop_leaky_columns(t, true);
        CHECK(bare.n_columns() == 17);
        CHECK_FALSE(bare.has_column("mqtt_messagetype"));
    }
    SECTION("applying twice raises MissingColumn")
    {
        CHECK_THROWS_AS(drop_leaky_columns(dropped), MissingColumn);
    }
}

TEST_CASE("drop_leaky_columns on flow tables removes only addresses")
{
    FeatureTable u = make_table(FeatureLevel::uniflow, schema::uniflow_full());
    FeatureTable du = drop_leaky_columns(u);
    CHECK(du.n_columns() == 16);
    CHECK(du.has_column("proto"));
    CHECK(du.has_column("prt_src"));
    CHECK_FALSE(du.has_column("ip_src"));

    FeatureTable b = make_table(FeatureLevel::biflow, schema::biflow_full());
    CHECK(drop_leaky_columns(b).n_columns() == 29);
}

TEST_CASE("stratified holdout split")
{
    testutil::Rng rng(3);
    SECTION("exact stratification on balanced classes")
    {
        FeatureTable t = toy_table(8, rng, {"Benign", "MQTT_BF"});
        auto [train, test] = split_holdout(t, 0.75, 42);
        CHECK(train.n_rows() == 6);
        CHECK(test.n_rows() == 2);
        size_t train_benign = 0;
        for (const auto& c : train.class_labels) train_benign += c == "Benign";
        CHECK(train_benign == 3);
        size_t test_benign = 0;
        for (const auto& c : test.class_labels) test_benign += c == "Benign";
        CHECK(test_benign == 1);
    }
    SECTION("same seed reproduces the partition")
    {
        FeatureTable t = toy_table(101, rng, {"Benign", "Scan_A", "MQTT_BF"});
        auto [a_train, a_test] = split_holdout(t, 0.75, 7);
        auto [b_train, b_test] = split_holdout(t, 0.75, 7);
        CHECK(a_train == b_train);
        CHECK(a_test == b_test);
        auto [c_train, c_test] = split_holdout(t, 0.75, 8);
        CHECK(!(a_train == c_train));
    }
    SECTION("partition law")
    {
        FeatureTable t = toy_table(37, rng, {"Benign", "Sparta"});
        auto [train, test] = split_holdout(t, 0.6, 5);
        CHECK(train.n_rows() + test.n_rows() == t.n_rows());
        CHECK(train.n_rows() ==
              static_cast<size_t>(std::llround(0.6 * static_cast<double>(t.n_rows()))));
        // every original row appears exactly once across the two parts
        std::multiset<double> seen, expect;
        for (double v : t.columns[0].num) expect.insert(v);
        for (double v : train.columns[0].num) seen.insert(v);
        for (double v : test.columns[0].num) seen.insert(v);
        CHECK(seen == expect);
    }
    SECTION("classes with fewer than two rows are rejected")
    {
        FeatureTable t = toy_table(3, rng, {"Benign", "Benign", "Scan_A"});
        CHECK_THROWS_AS(split_holdout(t, 0.75, 1), DegenerateSplit);
    }
}

TEST_CASE("standardize")
{
    FeatureTable t = make_table(
        FeatureLevel::uniflow,
        schema::without(schema::uniflow_full(),
                        schema::leaky_columns(FeatureLevel::uniflow, false)));
    // column 0: [0,2]; the rest constant 5
    for (size_t j = 0; j < t.columns.size(); ++j) t.columns[j].num = {j == 0 ? 0.0 : 5.0,
                                                                      j == 0 ? 2.0 : 5.0};
    t.class_labels = {"Benign", "MQTT_BF"};
    t.is_attack = {0, 1};

    auto res = standardize(t);
    CHECK(res.scaler.mean[0] == Catch::Approx(1.0));
    CHECK(res.scaler.stddev[0] == Catch::Approx(1.0));
    CHECK(res.train.columns[0].num[0] == Catch::Approx(-1.0));
    CHECK(res.train.columns[0].num[1] == Catch::Approx(1.0));

    SECTION("zero-variance columns are centered, not scaled")
    {
        CHECK(res.scaler.stddev[1] == 0.0);
        CHECK(res.train.columns[1].num[0] == 0.0);
        CHECK(res.train.columns[1].num[1] == 0.0);
    }
    SECTION("training columns end up centered")
    {
        for (const auto& c : res.train.columns) {
            double mean = 0;
            for (double v : c.num) mean += v;
            mean /= static_cast<double>(c.num.size());
            CHECK(std::fabs(mean) < 1e-9);
        }
    }
    SECTION("statistics never leak from transform-only tables")
    {
        FeatureTable extreme = t;
        for (auto& c : extreme.columns) c.num = {1e9, 1e9};
        auto res2 = standardize(t, {extreme});
        // an unseen extreme value lands far outside the training range
        CHECK(res2.others[0].columns[0].num[0] > 1e6);
    }
    SECTION("text columns are refused")
    {
        FeatureTable full = make_table(FeatureLevel::uniflow, schema::uniflow_full());
        full.columns[0].str = {"10.0.0.1"};
        CHECK_THROWS_AS(standardize(full), NonNumericColumn);
    }
}

TEST_CASE("feature csv io")
{
    SECTION("header-only file reads as an empty table")
    {
        FeatureTable t = make_table(FeatureLevel::uniflow, schema::uniflow_full());
        std::ostringstream out;
        write_feature_csv(t, out);
        std::istringstream in(out.str());
        FeatureTable back = read_feature_csv(in);
        CHECK(back.n_rows() == 0);
        CHECK(back.column_names() == t.column_names());
        CHECK(back.level == FeatureLevel::uniflow);
    }
    SECTION("random table round-trips exactly")
    {
        testutil::Rng rng(11);
        auto packets = testutil::random_stream(rng, 100);
        auto rules = LabelRuleSet::for_scenario(Scenario::scan_su, {"10.0.0.3"});
        std::vector<PacketFeatureRecord> rows;
        for (const auto& p : packets) rows.push_back(extract_packet_features(p, rules));
        FeatureTable t = packet_feature_table(rows);

        std::ostringstream out;
        write_feature_csv(t, out);
        std::istringstream in(out.str());
        FeatureTable back = read_feature_csv(in);
        CHECK(back == t);
    }
    SECTION("fractional values survive the round trip bit-exact")
    {
        FeatureTable t = make_table(
            FeatureLevel::uniflow,
            schema::without(schema::uniflow_full(),
                            schema::leaky_columns(FeatureLevel::uniflow, false)));
        testutil::Rng rng(13);
        for (auto& c : t.columns)
            c.num = {rng.range(-1e6, 1e6), 1.0 / 3.0, 2.5e-17, rng.unit()};
        t.is_attack = {0, 1, 0, 1};
        t.class_labels = {"Benign", "Scan_A", "Benign", "Scan_A"};
        std::ostringstream out;
        write_feature_csv(t, out);
        std::istringstream in(out.str());
        CHECK(read_feature_csv(in) == t);
    }
    SECTION("shuffled column order is accepted and canonicalised")
    {
        std::string csv =
            "prt_dst,is_attack,proto,ip_dest,class,prt_src,num_pkts,mean_iat,std_iat,min_iat,"
            "max_iat,num_bytes,num_psh_flags,num_rst_flags,num_urg_flags,mean_pkt_len,"
            "std_pkt_len,min_pkt_len,max_pkt_len,ip_src\n"
            "1883,1,6,10.0.0.2,MQTT_BF,5000,3,0.5,0,0.5,0.5,120,1,0,0,40,0,40,40,10.0.0.66\n";
        std::istringstream in(csv);
        FeatureTable t = read_feature_csv(in);
        CHECK(t.level == FeatureLevel::uniflow);
        CHECK(t.columns[0].name == "ip_src");
        CHECK(t.columns[0].str[0] == "10.0.0.66");
        CHECK(t.column("prt_dst").num[0] == 1883.0);
        CHECK(t.is_attack[0] == 1);
        CHECK(t.class_labels[0] == "MQTT_BF");
    }
    SECTION("unknown and missing columns raise SchemaMismatch")
    {
        std::istringstream unknown("bogus,is_attack,class\n1,0,Benign\n");
        CHECK_THROWS_AS(read_feature_csv(unknown), SchemaMismatch);

        std::istringstream missing(
            "ip_src,ip_dest,prt_src,prt_dst,proto,num_pkts,is_attack,class\n");
        CHECK_THROWS_AS(read_feature_csv(missing), SchemaMismatch);

        std::istringstream no_labels("ip_src,ip_dest,prt_src\n");
        CHECK_THROWS_AS(read_feature_csv(no_labels), SchemaMismatch);
    }
    SECTION("ragged rows are rejected")
    {
        FeatureTable t = make_table(FeatureLevel::uniflow, schema::uniflow_full());
        std::ostringstream out;
        write_feature_csv(t, out);
        std::istringstream in(out.str() + "1,2,3\n");
        CHECK_THROWS_AS(read_feature_csv(in), SchemaMismatch);
    }
}
