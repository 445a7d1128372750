#ifndef MQTTIDS_FLOW_HPP
#define MQTTIDS_FLOW_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mqttids/common.hpp"
#include "mqttids/labels.hpp"
#include "mqttids/packet.hpp"
#include "mqttids/table.hpp"

namespace mqttids {

// Exact 5-tuple; direction matters.
struct FlowKey {
    std::string ip_src;
    std::string ip_dest;
    uint16_t prt_src = 0;
    uint16_t prt_dst = 0;
    uint8_t proto = 6;  // 6=TCP, 17=UDP

    bool operator==(const FlowKey&) const = default;

    FlowKey reversed() const { return {ip_dest, ip_src, prt_dst, prt_src, proto}; }

    auto tie() const { return std::tie(ip_src, ip_dest, prt_src, prt_dst, proto); }
    bool operator<(const FlowKey& o) const { return tie() < o.tie(); }
};

struct FlowKeyHash {
    size_t operator()(const FlowKey& k) const
    {
        size_t h = std::hash<std::string>{}(k.ip_src);
        h = h * 1315423911u ^ std::hash<std::string>{}(k.ip_dest);
        h = h * 1315423911u ^ (static_cast<size_t>(k.prt_src) << 17 |
                               static_cast<size_t>(k.prt_dst) << 1 | k.proto);
        return h;
    }
};

struct FlagTriple {
    bool psh = false;
    bool rst = false;
    bool urg = false;
};

struct FlowStats {
    uint64_t num_pkts = 0;
    double mean_iat = 0.0, std_iat = 0.0, min_iat = 0.0, max_iat = 0.0;
    uint64_t num_bytes = 0;
    uint64_t num_psh_flags = 0, num_rst_flags = 0, num_urg_flags = 0;
    double mean_pkt_len = 0.0, std_pkt_len = 0.0, min_pkt_len = 0.0, max_pkt_len = 0.0;

    bool operator==(const FlowStats&) const = default;
};

// Inter-arrival times are consecutive timestamp differences; statistics use
// the population convention (divisor n), so a single-packet flow reports
// zeros everywhere except the length fields.
inline FlowStats summarize_stats(const std::vector<double>& timestamps,
                                 const std::vector<uint32_t>& ip_lens,
                                 const std::vector<FlagTriple>& flags)
{
    size_t n = timestamps.size();
    if (n == 0) throw EmptyFlow();
    if (ip_lens.size() != n || flags.size() != n)
        throw LengthMismatch("summarize_stats inputs differ in length");

    FlowStats s;
    s.num_pkts = n;

    if (n >= 2) {
        double sum = 0.0;
        s.min_iat = timestamps[1] - timestamps[0];
        s.max_iat = s.min_iat;
        for (size_t i = 1; i < n; ++i) {
            double iat = timestamps[i] - timestamps[i - 1];
            sum += iat;
            s.min_iat = std::min(s.min_iat, iat);
            s.max_iat = std::max(s.max_iat, iat);
        }
        size_t m = n - 1;
        s.mean_iat = sum / static_cast<double>(m);
        double ss = 0.0;
        for (size_t i = 1; i < n; ++i) {
            double d = (timestamps[i] - timestamps[i - 1]) - s.mean_iat;
            ss += d * d;
        }
        s.std_iat = std::sqrt(ss / static_cast<double>(m));
    }

    double len_sum = 0.0;
    s.min_pkt_len = ip_lens[0];
    s.max_pkt_len = ip_lens[0];
    for (size_t i = 0; i < n; ++i) {
        double len = ip_lens[i];
        len_sum += len;
        s.num_bytes += ip_lens[i];
        s.min_pkt_len = std::min(s.min_pkt_len, len);
        s.max_pkt_len = std::max(s.max_pkt_len, len);
        s.num_psh_flags += flags[i].psh;
        s.num_rst_flags += flags[i].rst;
        s.num_urg_flags += flags[i].urg;
    }
    s.mean_pkt_len = len_sum / static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double d = static_cast<double>(ip_lens[i]) - s.mean_pkt_len;
        ss += d * d;
    }
    s.std_pkt_len = std::sqrt(ss / static_cast<double>(n));
    return s;
}

struct UniFlowRecord {
    FlowKey key;
    FlowStats stats;
    int is_attack = 0;
    AttackClass cls = AttackClass::benign;
    double first_ts = 0.0;  // emission order; not a CSV column
};

struct BiFlowRecord {
    FlowKey key;  // forward direction = first packet observed for the pair
    FlowStats fwd;
    FlowStats bwd;  // zeroed when the reverse direction never appears
    int is_attack = 0;
    AttackClass cls = AttackClass::benign;
    double first_ts = 0.0;
};

struct FlowConfig {
    // A gap above this splits a new flow on the same key. Unset means one
    // flow per key for the whole capture.
    std::optional<double> idle_timeout;
};

namespace detail {

struct PacketSlice {
    std::vector<double> ts;
    std::vector<uint32_t> len;
    std::vector<FlagTriple> flags;

    void add(const ParsedPacket& p)
    {
        ts.push_back(p.timestamp);
        len.push_back(p.ip_len);
        flags.push_back({p.tcp_flags.push, p.tcp_flags.reset, p.tcp_flags.urg});
    }
    bool empty() const { return ts.empty(); }
    void clear()
    {
        ts.clear();
        len.clear();
        flags.clear();
    }
};

inline Label label_for_key(const FlowKey& k, const LabelRuleSet& rules)
{
    return apply_label_rules(k.ip_src, k.ip_dest, rules, k.prt_src, k.prt_dst, k.proto);
}

}  // namespace detail

// Groups TCP/UDP packets by exact 5-tuple. The stream must be timestamp
// ordered. Output is sorted by (first packet timestamp, key).
inline std::vector<UniFlowRecord> assemble_uniflows(const std::vector<ParsedPacket>& packets,
                                                    const LabelRuleSet& labels,
                                                    const FlowConfig& cfg = {})
{
    struct Accum {
        detail::PacketSlice slice;
        double first_ts = 0.0;
        double last_ts = 0.0;
    };
    std::unordered_map<FlowKey, Accum, FlowKeyHash> open;
    std::vector<UniFlowRecord> done;

    auto close = [&](const FlowKey& key, Accum& a) {
        UniFlowRecord r;
        r.key = key;
        r.stats = summarize_stats(a.slice.ts, a.slice.len, a.slice.flags);
        Label lbl = detail::label_for_key(key, labels);
        r.is_attack = lbl.is_attack;
        r.cls = lbl.cls;
        r.first_ts = a.first_ts;
        done.push_back(std::move(r));
    };

    for (const auto& p : packets) {
        if (p.transport == Transport::other) continue;
        FlowKey key{p.ip_src, p.ip_dest, p.prt_src, p.prt_dst,
                    static_cast<uint8_t>(p.transport)};
        auto [it, fresh] = open.try_emplace(key);
        Accum& a = it->second;
        if (!fresh && cfg.idle_timeout && p.timestamp - a.last_ts > *cfg.idle_timeout) {
            close(key, a);
            a.slice.clear();
        }
        if (a.slice.empty()) a.first_ts = p.timestamp;
        a.slice.add(p);
        a.last_ts = p.timestamp;
    }
    for (auto& [key, a] : open)
        if (!a.slice.empty()) close(key, a);

    std::sort(done.begin(), done.end(), [](const UniFlowRecord& x, const UniFlowRecord& y) {
        if (x.first_ts != y.first_ts) return x.first_ts < y.first_ts;
        return x.key < y.key;
    });
    return done;
}

// Merges each key with its reverse into one record; forward is the direction
// of the first packet seen for the pair. The idle gap is measured over the
// pair's combined stream.
inline std::vector<BiFlowRecord> assemble_biflows(const std::vector<ParsedPacket>& packets,
                                                  const LabelRuleSet& labels,
                                                  const FlowConfig& cfg = {})
{
    struct Accum {
        FlowKey fwd_key;
        detail::PacketSlice fwd, bwd;
        double first_ts = 0.0;
        double last_ts = 0.0;
        bool active = false;
    };
    std::unordered_map<FlowKey, Accum, FlowKeyHash> open;  // keyed by canonical pair
    std::vector<BiFlowRecord> done;

    auto canonical = [](const FlowKey& k) {
        FlowKey rev = k.reversed();
        return rev < k ? rev : k;
    };

    auto close = [&](Accum& a) {
        BiFlowRecord r;
        r.key = a.fwd_key;
        r.fwd = summarize_stats(a.fwd.ts, a.fwd.len, a.fwd.flags);
        if (!a.bwd.empty()) r.bwd = summarize_stats(a.bwd.ts, a.bwd.len, a.bwd.flags);
        Label lbl = detail::label_for_key(a.fwd_key, labels);
        r.is_attack = lbl.is_attack;
        r.cls = lbl.cls;
        r.first_ts = a.first_ts;
        done.push_back(std::move(r));
    };

    for (const auto& p : packets) {
        if (p.transport == Transport::other) continue;
        FlowKey key{p.ip_src, p.ip_dest, p.prt_src, p.prt_dst,
                    static_cast<uint8_t>(p.transport)};
        Accum& a = open[canonical(key)];
        if (a.active && cfg.idle_timeout && p.timestamp - a.last_ts > *cfg.idle_timeout) {
            close(a);
            a.fwd.clear();
            a.bwd.clear();
            a.active = false;
        }
        if (!a.active) {
            a.fwd_key = key;
            a.first_ts = p.timestamp;
            a.active = true;
        }
        (key == a.fwd_key ? a.fwd : a.bwd).add(p);
        a.last_ts = p.timestamp;
    }
    for (auto& [key, a] : open)
        if (a.active) close(a);

    std::sort(done.begin(), done.end(), [](const BiFlowRecord& x, const BiFlowRecord& y) {
        if (x.first_ts != y.first_ts) return x.first_ts < y.first_ts;
        return x.key < y.key;
    });
    return done;
}

// ---------------------------------------------------------------------------
// Table conversion
// ---------------------------------------------------------------------------

namespace detail {

inline void push_stats(FeatureTable& t, size_t& j, const FlowStats& s)
{
    t.columns[j++].num.push_back(static_cast<double>(s.num_pkts));
    t.columns[j++].num.push_back(s.mean_iat);
    t.columns[j++].num.push_back(s.std_iat);
    t.columns[j++].num.push_back(s.min_iat);
    t.columns[j++].num.push_back(s.max_iat);
    t.columns[j++].num.push_back(static_cast<double>(s.num_bytes));
    t.columns[j++].num.push_back(static_cast<double>(s.num_psh_flags));
    t.columns[j++].num.push_back(static_cast<double>(s.num_rst_flags));
    t.columns[j++].num.push_back(static_cast<double>(s.num_urg_flags));
    t.columns[j++].num.push_back(s.mean_pkt_len);
    t.columns[j++].num.push_back(s.std_pkt_len);
    t.columns[j++].num.push_back(s.min_pkt_len);
    t.columns[j++].num.push_back(s.max_pkt_len);
}

}  // namespace detail

inline FeatureTable uniflow_table(const std::vector<UniFlowRecord>& records,
                                  const std::string& source = "")
{
    FeatureTable t = make_table(FeatureLevel::uniflow, schema::uniflow_full());
    t.source = source;
    for (const auto& r : records) {
        size_t j = 0;
        t.columns[j++].str.push_back(r.key.ip_src);
        t.columns[j++].str.push_back(r.key.ip_dest);
        t.columns[j++].num.push_back(r.key.prt_src);
        t.columns[j++].num.push_back(r.key.prt_dst);
        t.columns[j++].num.push_back(r.key.proto);
        detail::push_stats(t, j, r.stats);
        t.is_attack.push_back(r.is_attack);
        t.class_labels.push_back(to_string(r.cls));
    }
    return t;
}

inline FeatureTable biflow_table(const std::vector<BiFlowRecord>& records,
                                 const std::string& source = "")
{
    FeatureTable t = make_table(FeatureLevel::biflow, schema::biflow_full());
    t.source = source;
    for (const auto& r : records) {
        size_t j = 0;
        t.columns[j++].str.push_back(r.key.ip_src);
        t.columns[j++].str.push_back(r.key.ip_dest);
        t.columns[j++].num.push_back(r.key.prt_src);
        t.columns[j++].num.push_back(r.key.prt_dst);
        t.columns[j++].num.push_back(r.key.proto);
        detail::push_stats(t, j, r.fwd);
        detail::push_stats(t, j, r.bwd);
        t.is_attack.push_back(r.is_attack);
        t.class_labels.push_back(to_string(r.cls));
    }
    return t;
}

}  // namespace mqttids

#endif  // MQTTIDS_FLOW_HPP
