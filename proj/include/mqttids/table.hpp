#ifndef MQTTIDS_TABLE_HPP
#define MQTTIDS_TABLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mqttids/common.hpp"

namespace mqttids {

enum class FeatureLevel : uint8_t { packet = 0, uniflow, biflow };

inline std::string to_string(FeatureLevel lv)
{
    switch (lv) {
        case FeatureLevel::packet: return "packet";
        case FeatureLevel::uniflow: return "uniflow";
        case FeatureLevel::biflow: return "biflow";
    }
    return "packet";
}

inline FeatureLevel feature_level_from_string(const std::string& s)
{
    if (s == "packet") return FeatureLevel::packet;
    if (s == "uniflow") return FeatureLevel::uniflow;
    if (s == "biflow") return FeatureLevel::biflow;
    throw UsageError("unknown feature level: " + s);
}

enum class ColumnKind : uint8_t { numeric, text };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<double> num;
    std::vector<std::string> str;

    size_t size() const { return kind == ColumnKind::numeric ? num.size() : str.size(); }
    bool operator==(const Column&) const = default;
};

// Rectangular feature table: ordered feature columns plus the two label
// columns. Immutable by convention once built; operations return copies.
struct FeatureTable {
    std::vector<Column> columns;
    std::vector<int> is_attack;
    std::vector<std::string> class_labels;
    FeatureLevel level = FeatureLevel::packet;
    std::string source;  // provenance only; ignored by comparisons

    size_t n_rows() const { return is_attack.size(); }
    size_t n_columns() const { return columns.size(); }

    const Column& column(std::string_view name) const
    {
        for (const auto& c : columns)
            if (c.name == name) return c;
        throw MissingColumn(std::string(name));
    }

    bool has_column(std::string_view name) const
    {
        for (const auto& c : columns)
            if (c.name == name) return true;
        return false;
    }

    std::vector<std::string> column_names() const
    {
        std::vector<std::string> names;
        names.reserve(columns.size());
        for (const auto& c : columns) names.push_back(c.name);
        return names;
    }

    bool all_numeric() const
    {
        for (const auto& c : columns)
            if (c.kind != ColumnKind::numeric) return false;
        return true;
    }

    // Row-major copy of the numeric cells. Throws when a text column remains.
    std::vector<std::vector<double>> numeric_rows() const
    {
        for (const auto& c : columns)
            if (c.kind != ColumnKind::numeric) throw NonNumericColumn(c.name);
        std::vector<std::vector<double>> rows(n_rows(), std::vector<double>(columns.size()));
        for (size_t j = 0; j < columns.size(); ++j)
            for (size_t i = 0; i < rows.size(); ++i) rows[i][j] = columns[j].num[i];
        return rows;
    }

    FeatureTable select_rows(const std::vector<size_t>& idx) const
    {
        FeatureTable out;
        out.level = level;
        out.source = source;
        out.columns.reserve(columns.size());
        for (const auto& c : columns) {
            Column nc;
            nc.name = c.name;
            nc.kind = c.kind;
            if (c.kind == ColumnKind::numeric) {
                nc.num.reserve(idx.size());
                for (size_t i : idx) nc.num.push_back(c.num[i]);
            } else {
                nc.str.reserve(idx.size());
                for (size_t i : idx) nc.str.push_back(c.str[i]);
            }
            out.columns.push_back(std::move(nc));
        }
        out.is_attack.reserve(idx.size());
        out.class_labels.reserve(idx.size());
        for (size_t i : idx) {
            out.is_attack.push_back(is_attack[i]);
            out.class_labels.push_back(class_labels[i]);
        }
        return out;
    }

    // Appends the rows of another table with the identical column layout.
    void append(const FeatureTable& other)
    {
        if (other.column_names() != column_names())
            throw SchemaMismatch("cannot append tables with different columns");
        for (size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].kind != other.columns[j].kind)
                throw SchemaMismatch("column kind differs: " + columns[j].name);
            columns[j].num.insert(columns[j].num.end(), other.columns[j].num.begin(),
                                  other.columns[j].num.end());
            columns[j].str.insert(columns[j].str.end(), other.columns[j].str.begin(),
                                  other.columns[j].str.end());
        }
        is_attack.insert(is_attack.end(), other.is_attack.begin(), other.is_attack.end());
        class_labels.insert(class_labels.end(), other.class_labels.begin(),
                            other.class_labels.end());
    }

    bool operator==(const FeatureTable& o) const
    {
        return columns == o.columns && is_attack == o.is_attack &&
               class_labels == o.class_labels && level == o.level;
    }
};

// ---------------------------------------------------------------------------
// Canonical schemas
// ---------------------------------------------------------------------------

struct ColumnSpec {
    const char* name;
    ColumnKind kind;
};

namespace schema {

inline const std::vector<ColumnSpec>& packet_full()
{
    static const std::vector<ColumnSpec> cols = {
        {"ip_src", ColumnKind::text},       {"ip_dest", ColumnKind::text},
        {"protocol", ColumnKind::text},     {"ttl", ColumnKind::numeric},
        {"ip_len", ColumnKind::numeric},    {"ip_flag_df", ColumnKind::numeric},
        {"ip_flag_mf", ColumnKind::numeric},{"ip_flag_rb", ColumnKind::numeric},
        {"prt_src", ColumnKind::numeric},   {"prt_dst", ColumnKind::numeric},
        {"tcp_flag_res", ColumnKind::numeric},  {"tcp_flag_ns", ColumnKind::numeric},
        {"tcp_flag_cwr", ColumnKind::numeric},  {"tcp_flag_ecn", ColumnKind::numeric},
        {"tcp_flag_urg", ColumnKind::numeric},  {"tcp_flag_ack", ColumnKind::numeric},
        {"tcp_flag_push", ColumnKind::numeric}, {"tcp_flag_reset", ColumnKind::numeric},
        {"tcp_flag_syn", ColumnKind::numeric},  {"tcp_flag_fin", ColumnKind::numeric},
        {"mqtt_messagetype", ColumnKind::numeric},
        {"mqtt_messagelength", ColumnKind::numeric},
        {"mqtt_flag_uname", ColumnKind::numeric},
        {"mqtt_flag_passwd", ColumnKind::numeric},
        {"mqtt_flag_retain", ColumnKind::numeric},
        {"mqtt_flag_qos", ColumnKind::numeric},
        {"mqtt_flag_willflag", ColumnKind::numeric},
        {"mqtt_flag_clean", ColumnKind::numeric},
        {"mqtt_flag_reserved", ColumnKind::numeric},
    };
    return cols;
}

inline const std::vector<const char*>& flow_stat_names()
{
    static const std::vector<const char*> names = {
        "num_pkts", "mean_iat", "std_iat", "min_iat", "max_iat",
        "num_bytes", "num_psh_flags", "num_rst_flags", "num_urg_flags",
        "mean_pkt_len", "std_pkt_len", "min_pkt_len", "max_pkt_len"};
    return names;
}

inline const std::vector<ColumnSpec>& uniflow_full()
{
    static const std::vector<ColumnSpec> cols = [] {
        std::vector<ColumnSpec> c = {
            {"ip_src", ColumnKind::text}, {"ip_dest", ColumnKind::text},
            {"prt_src", ColumnKind::numeric}, {"prt_dst", ColumnKind::numeric},
            {"proto", ColumnKind::numeric}};
        for (const char* n : flow_stat_names()) c.push_back({n, ColumnKind::numeric});
        return c;
    }();
    return cols;
}

inline const std::vector<ColumnSpec>& biflow_full()
{
    static const std::vector<ColumnSpec> cols = [] {
        std::vector<ColumnSpec> c = {
            {"ip_src", ColumnKind::text}, {"ip_dest", ColumnKind::text},
            {"prt_src", ColumnKind::numeric}, {"prt_dst", ColumnKind::numeric},
            {"proto", ColumnKind::numeric}};
        static std::vector<std::string> owned;  // keeps the prefixed names alive
        for (const char* prefix : {"fwd_", "bwd_"})
            for (const char* n : flow_stat_names())
                owned.push_back(std::string(prefix) + n);
        for (const auto& n : owned) c.push_back({n.c_str(), ColumnKind::numeric});
        return c;
    }();
    return cols;
}

// Columns removed before training: endpoint addresses always; the text
// protocol label and the MQTT flags as well on packet tables.
inline std::vector<std::string> leaky_columns(FeatureLevel lv, bool drop_mqtt_type_and_length)
{
    std::vector<std::string> cols = {"ip_src", "ip_dest"};
    if (lv == FeatureLevel::packet) {
        cols.push_back("protocol");
        for (const char* n : {"mqtt_flag_uname", "mqtt_flag_passwd", "mqtt_flag_retain",
                              "mqtt_flag_qos", "mqtt_flag_willflag", "mqtt_flag_clean",
                              "mqtt_flag_reserved"})
            cols.push_back(n);
        if (drop_mqtt_type_and_length) {
            cols.push_back("mqtt_messagetype");
            cols.push_back("mqtt_messagelength");
        }
    }
    return cols;
}

inline std::vector<ColumnSpec> without(const std::vector<ColumnSpec>& full,
                                       const std::vector<std::string>& removed)
{
    std::vector<ColumnSpec> out;
    for (const auto& c : full)
        if (std::find(removed.begin(), removed.end(), c.name) == removed.end())
            out.push_back(c);
    return out;
}

struct Known {
    FeatureLevel level;
    std::vector<ColumnSpec> columns;
};

inline const std::vector<Known>& known_schemas()
{
    static const std::vector<Known> all = [] {
        std::vector<Known> v;
        v.push_back({FeatureLevel::packet, packet_full()});
        v.push_back({FeatureLevel::packet,
                     without(packet_full(), leaky_columns(FeatureLevel::packet, false))});
        v.push_back({FeatureLevel::packet,
                     without(packet_full(), leaky_columns(FeatureLevel::packet, true))});
        v.push_back({FeatureLevel::uniflow, uniflow_full()});
        v.push_back({FeatureLevel::uniflow,
                     without(uniflow_full(), leaky_columns(FeatureLevel::uniflow, false))});
        v.push_back({FeatureLevel::biflow, biflow_full()});
        v.push_back({FeatureLevel::biflow,
                     without(biflow_full(), leaky_columns(FeatureLevel::biflow, false))});
        return v;
    }();
    return all;
}

}  // namespace schema

inline FeatureTable make_table(FeatureLevel level, const std::vector<ColumnSpec>& specs)
{
    FeatureTable t;
    t.level = level;
    for (const auto& s : specs) {
        Column c;
        c.name = s.name;
        c.kind = s.kind;
        t.columns.push_back(std::move(c));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Leaky-feature removal
// ---------------------------------------------------------------------------

inline FeatureTable drop_leaky_columns(const FeatureTable& t,
                                       bool drop_mqtt_type_and_length = false)
{
    auto removed = schema::leaky_columns(t.level, drop_mqtt_type_and_length);
    for (const auto& name : removed)
        if (!t.has_column(name)) throw MissingColumn(name);

    FeatureTable out;
    out.level = t.level;
    out.source = t.source;
    for (const auto& c : t.columns)
        if (std::find(removed.begin(), removed.end(), c.name) == removed.end())
            out.columns.push_back(c);
    out.is_attack = t.is_attack;
    out.class_labels = t.class_labels;
    return out;
}

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

// Seeded stratified holdout. |train| == round(fraction * n); each class lands
// within one row of its exact proportional share (largest-remainder rule).
inline std::pair<FeatureTable, FeatureTable> split_holdout(const FeatureTable& t,
                                                           double train_fraction,
                                                           uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw UsageError("train fraction must be in (0,1)");
    size_t n = t.n_rows();
    if (n == 0) throw DegenerateSplit("empty table");

    std::map<std::string, std::vector<size_t>> by_class;
    for (size_t i = 0; i < n; ++i) by_class[t.class_labels[i]].push_back(i);
    for (const auto& [cls, rows] : by_class)
        if (rows.size() < 2) throw DegenerateSplit("class " + cls + " has fewer than 2 rows");

    size_t target = static_cast<size_t>(std::llround(train_fraction * static_cast<double>(n)));

    // Floor quotas first, then hand out the remainder by largest fraction.
    std::vector<std::string> order;
    for (const auto& [cls, rows] : by_class) order.push_back(cls);
    order = canonical_class_order(order);

    std::map<std::string, size_t> quota;
    std::vector<std::pair<double, std::string>> remainders;
    size_t assigned = 0;
    for (const auto& cls : order) {
        double exact = train_fraction * static_cast<double>(by_class[cls].size());
        size_t q = static_cast<size_t>(std::floor(exact));
        quota[cls] = q;
        assigned += q;
        remainders.push_back({exact - static_cast<double>(q), cls});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto& [frac, cls] : remainders) {
        if (assigned >= target) break;
        if (quota[cls] < by_class[cls].size()) {
            ++quota[cls];
            ++assigned;
        }
    }

    Rng rng(seed);
    std::vector<size_t> train_idx, test_idx;
    for (const auto& cls : order) {
        auto rows = by_class[cls];
        rng.shuffle(rows);
        size_t q = quota[cls];
        train_idx.insert(train_idx.end(), rows.begin(), rows.begin() + q);
        test_idx.insert(test_idx.end(), rows.begin() + q, rows.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {t.select_rows(train_idx), t.select_rows(test_idx)};
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

// Per-column z-score statistics, fit on training data only. Zero-variance
// columns are centered but not scaled.
struct Standardizer {
    std::vector<std::string> columns;
    std::vector<double> mean;
    std::vector<double> stddev;

    bool operator==(const Standardizer&) const = default;

    double apply(size_t j, double v) const
    {
        double centered = v - mean[j];
        return stddev[j] > 0.0 ? centered / stddev[j] : centered;
    }

    // Fit from row-major data (population standard deviation).
    static Standardizer fit_rows(const std::vector<std::vector<double>>& rows)
    {
        Standardizer s;
        if (rows.empty()) return s;
        size_t d = rows[0].size();
        s.mean.assign(d, 0.0);
        s.stddev.assign(d, 0.0);
        double n = static_cast<double>(rows.size());
        for (const auto& r : rows)
            for (size_t j = 0; j < d; ++j) s.mean[j] += r[j];
        for (size_t j = 0; j < d; ++j) s.mean[j] /= n;
        for (const auto& r : rows)
            for (size_t j = 0; j < d; ++j) {
                double dlt = r[j] - s.mean[j];
                s.stddev[j] += dlt * dlt;
            }
        for (size_t j = 0; j < d; ++j) s.stddev[j] = std::sqrt(s.stddev[j] / n);
        return s;
    }

    std::vector<double> transform_row(const std::vector<double>& row) const
    {
        std::vector<double> out(row.size());
        for (size_t j = 0; j < row.size(); ++j) out[j] = apply(j, row[j]);
        return out;
    }

    void transform_rows(std::vector<std::vector<double>>& rows) const
    {
        for (auto& r : rows) r = transform_row(r);
    }
};

struct StandardizeResult {
    Standardizer scaler;
    FeatureTable train;
    std::vector<FeatureTable> others;
};

inline StandardizeResult standardize(const FeatureTable& train,
                                     const std::vector<FeatureTable>& others = {})
{
    for (const auto& c : train.columns)
        if (c.kind != ColumnKind::numeric) throw NonNumericColumn(c.name);

    StandardizeResult res;
    res.scaler.columns = train.column_names();
    size_t d = train.columns.size();
    res.scaler.mean.assign(d, 0.0);
    res.scaler.stddev.assign(d, 0.0);
    double n = static_cast<double>(train.n_rows());
    if (n > 0) {
        for (size_t j = 0; j < d; ++j) {
            double sum = 0.0;
            for (double v : train.columns[j].num) sum += v;
            res.scaler.mean[j] = sum / n;
            double ss = 0.0;
            for (double v : train.columns[j].num) {
                double dlt = v - res.scaler.mean[j];
                ss += dlt * dlt;
            }
            res.scaler.stddev[j] = std::sqrt(ss / n);
        }
    }

    auto transform = [&](const FeatureTable& t) {
        if (t.column_names() != res.scaler.columns)
            throw SchemaMismatch("standardizer columns do not match table");
        FeatureTable out = t;
        for (size_t j = 0; j < d; ++j)
            for (double& v : out.columns[j].num) v = res.scaler.apply(j, v);
        return out;
    };
    res.train = transform(train);
    for (const auto& t : others) res.others.push_back(transform(t));
    return res;
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

inline void write_feature_csv(const FeatureTable& t, std::ostream& out)
{
    for (const auto& c : t.columns) out << c.name << ',';
    out << "is_attack,class\n";
    size_t n = t.n_rows();
    for (size_t i = 0; i < n; ++i) {
        for (const auto& c : t.columns) {
            if (c.kind == ColumnKind::numeric) out << format_double(c.num[i]);
            else out << c.str[i];
            out << ',';
        }
        out << t.is_attack[i] << ',' << t.class_labels[i] << '\n';
    }
}

inline void write_feature_csv(const FeatureTable& t, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    write_feature_csv(t, out);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    size_t start = 0;
    for (;;) {
        size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

}  // namespace detail

// Reads a feature CSV whose columns (in any order) form one of the canonical
// schemas; columns are reordered canonically. Unknown or missing columns
// raise SchemaMismatch.
inline FeatureTable read_feature_csv(std::istream& in, const std::string& source = "")
{
    std::string header;
    if (!std::getline(in, header)) throw SchemaMismatch("empty file");
    auto names = detail::split_csv_line(header);

    int attack_pos = -1, class_pos = -1;
    std::vector<std::string> feature_names;
    std::vector<int> feature_pos;
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "is_attack") attack_pos = static_cast<int>(i);
        else if (names[i] == "class") class_pos = static_cast<int>(i);
        else {
            feature_names.push_back(names[i]);
            feature_pos.push_back(static_cast<int>(i));
        }
    }
    if (attack_pos < 0) throw SchemaMismatch("missing column: is_attack");
    if (class_pos < 0) throw SchemaMismatch("missing column: class");

    // Identify which canonical schema the header's column set spells.
    const schema::Known* match = nullptr;
    auto sorted_names = feature_names;
    std::sort(sorted_names.begin(), sorted_names.end());
    for (const auto& known : schema::known_schemas()) {
        std::vector<std::string> expect;
        for (const auto& c : known.columns) expect.push_back(c.name);
        std::sort(expect.begin(), expect.end());
        if (expect == sorted_names) {
            match = &known;
            break;
        }
    }
    if (!match) {
        for (const auto& n : feature_names) {
            bool known_anywhere = false;
            for (const auto& known : schema::known_schemas())
                for (const auto& c : known.columns)
                    if (n == c.name) known_anywhere = true;
            if (!known_anywhere) throw SchemaMismatch("unknown column: " + n);
        }
        throw SchemaMismatch("column set matches no known feature schema");
    }

    FeatureTable t = make_table(match->level, match->columns);
    t.source = source;

    // Map file positions to canonical slots.
    std::vector<int> slot_of_file_col(names.size(), -1);
    for (size_t k = 0; k < feature_names.size(); ++k) {
        for (size_t j = 0; j < match->columns.size(); ++j)
            if (feature_names[k] == match->columns[j].name) {
                slot_of_file_col[feature_pos[k]] = static_cast<int>(j);
                break;
            }
    }

    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != names.size())
            throw SchemaMismatch("row " + std::to_string(line_no) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(names.size()));
        for (size_t i = 0; i < fields.size(); ++i) {
            int slot = slot_of_file_col[i];
            if (slot >= 0) {
                Column& c = t.columns[static_cast<size_t>(slot)];
                if (c.kind == ColumnKind::numeric) c.num.push_back(parse_double(fields[i]));
                else c.str.push_back(fields[i]);
            }
        }
        t.is_attack.push_back(static_cast<int>(parse_double(fields[attack_pos])));
        t.class_labels.push_back(fields[class_pos]);
    }
    return t;
}

inline FeatureTable read_feature_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return read_feature_csv(in, path);
}

}  // namespace mqttids

#endif  // MQTTIDS_TABLE_HPP
