#ifndef MQTTIDS_TESTS_HELPERS_HPP
#define MQTTIDS_TESTS_HELPERS_HPP

// Test-only oracles: independent brute-force recomputations of the things
// the library computes incrementally. Kept deliberately naive.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "mqttids/common.hpp"
#include "mqttids/flow.hpp"
#include "mqttids/packet.hpp"

namespace testutil {

using namespace mqttids;

// ---------------------------------------------------------------------------
// Random packet streams (already-parsed packets; no pcap involved)
// ---------------------------------------------------------------------------

inline std::vector<ParsedPacket> random_stream(Rng& rng, size_t max_packets = 1000)
{
    const std::vector<std::string> ips = {"10.0.0.1", "10.0.0.2", "10.0.0.3", "10.0.0.4"};
    const std::vector<uint16_t> ports = {1883, 22, 80, 5000, 6000};

    size_t n = 1 + rng.below(max_packets);
    std::vector<ParsedPacket> out;
    double t = 1000.0;
    for (size_t i = 0; i < n; ++i) {
        ParsedPacket p;
        t += static_cast<double>(rng.below(3)) * 0.05;  // allows zero gaps
        p.timestamp = t;
        p.ip_src = ips[rng.below(ips.size())];
        do {
            p.ip_dest = ips[rng.below(ips.size())];
        } while (p.ip_dest == p.ip_src);
        bool tcp = rng.chance(0.7);
        p.transport = tcp ? Transport::tcp : Transport::udp;
        p.prt_src = ports[rng.below(ports.size())];
        p.prt_dst = ports[rng.below(ports.size())];
        p.ip_len = static_cast<uint16_t>(40 + rng.below(1400));
        p.ttl = 64;
        if (tcp) {
            p.tcp_flags.push = rng.chance(0.3);
            p.tcp_flags.reset = rng.chance(0.1);
            p.tcp_flags.urg = rng.chance(0.05);
            p.tcp_flags.ack = rng.chance(0.8);
        }
        p.protocol_name = tcp ? "TCP" : "UDP";
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flow oracles: filter per key and recompute every statistic from scratch
// ---------------------------------------------------------------------------

struct OracleStats {
    uint64_t num_pkts = 0;
    double mean_iat = 0, std_iat = 0, min_iat = 0, max_iat = 0;
    uint64_t num_bytes = 0;
    uint64_t psh = 0, rst = 0, urg = 0;
    double mean_len = 0, std_len = 0, min_len = 0, max_len = 0;
};

inline OracleStats oracle_stats(const std::vector<const ParsedPacket*>& pkts)
{
    OracleStats s;
    s.num_pkts = pkts.size();
    std::vector<double> iats;
    for (size_t i = 1; i < pkts.size(); ++i)
        iats.push_back(pkts[i]->timestamp - pkts[i - 1]->timestamp);
    if (!iats.empty()) {
        double sum = 0;
        for (double v : iats) sum += v;
        s.mean_iat = sum / iats.size();
        double ss = 0;
        for (double v : iats) ss += (v - s.mean_iat) * (v - s.mean_iat);
        s.std_iat = std::sqrt(ss / iats.size());
        s.min_iat = *std::min_element(iats.begin(), iats.end());
        s.max_iat = *std::max_element(iats.begin(), iats.end());
    }
    std::vector<double> lens;
    for (const auto* p : pkts) {
        lens.push_back(p->ip_len);
        s.num_bytes += p->ip_len;
        s.psh += p->tcp_flags.push ? 1 : 0;
        s.rst += p->tcp_flags.reset ? 1 : 0;
        s.urg += p->tcp_flags.urg ? 1 : 0;
    }
    double sum = 0;
    for (double v : lens) sum += v;
    s.mean_len = sum / lens.size();
    double ss = 0;
    for (double v : lens) ss += (v - s.mean_len) * (v - s.mean_len);
    s.std_len = std::sqrt(ss / lens.size());
    s.min_len = *std::min_element(lens.begin(), lens.end());
    s.max_len = *std::max_element(lens.begin(), lens.end());
    return s;
}

inline bool stats_match(const OracleStats& o, const FlowStats& s, double tol = 1e-9)
{
    auto close = [&](double a, double b) { return std::fabs(a - b) <= tol; };
    return o.num_pkts == s.num_pkts && o.num_bytes == s.num_bytes && o.psh == s.num_psh_flags &&
           o.rst == s.num_rst_flags && o.urg == s.num_urg_flags && close(o.mean_iat, s.mean_iat) &&
           close(o.std_iat, s.std_iat) && close(o.min_iat, s.min_iat) &&
           close(o.max_iat, s.max_iat) && close(o.mean_len, s.mean_pkt_len) &&
           close(o.std_len, s.std_pkt_len) && close(o.min_len, s.min_pkt_len) &&
           close(o.max_len, s.max_pkt_len);
}

using KeyTuple = std::tuple<std::string, std::string, uint16_t, uint16_t, uint8_t>;

inline KeyTuple key_of(const ParsedPacket& p)
{
    return {p.ip_src, p.ip_dest, p.prt_src, p.prt_dst, static_cast<uint8_t>(p.transport)};
}

// Per-key packet groups in first-seen order, TCP/UDP only.
inline std::vector<std::pair<KeyTuple, std::vector<const ParsedPacket*>>> group_by_key(
    const std::vector<ParsedPacket>& packets)
{
    std::vector<std::pair<KeyTuple, std::vector<const ParsedPacket*>>> groups;
    std::map<KeyTuple, size_t> index;
    for (const auto& p : packets) {
        if (p.transport == Transport::other) continue;
        KeyTuple k = key_of(p);
        auto it = index.find(k);
        if (it == index.end()) {
            index[k] = groups.size();
            groups.push_back({k, {&p}});
        } else {
            groups[it->second].second.push_back(&p);
        }
    }
    return groups;
}

// ---------------------------------------------------------------------------
// k-NN oracle: full stable scan, same scoring rules, no shortcuts
// ---------------------------------------------------------------------------

inline std::string knn_oracle(const std::vector<std::vector<double>>& train,
                              const std::vector<int>& labels,
                              const std::vector<std::string>& classes, int k,
                              const std::vector<double>& query)
{
    std::vector<std::pair<double, size_t>> all(train.size());
    for (size_t i = 0; i < train.size(); ++i) {
        double ss = 0;
        for (size_t j = 0; j < query.size(); ++j) {
            double d = train[i][j] - query[j];
            ss += d * d;
        }
        all[i] = {std::sqrt(ss), i};
    }
    std::sort(all.begin(), all.end());
    size_t kk = std::min<size_t>(static_cast<size_t>(k), all.size());

    std::vector<double> score(classes.size(), 0.0), sum_dist(classes.size(), 0.0);
    for (size_t r = 0; r < kk; ++r) {
        size_t c = static_cast<size_t>(labels[all[r].second]);
        score[c] += 1.0 / static_cast<double>(r + 1);
        sum_dist[c] += all[r].first;
    }
    size_t best = 0;
    for (size_t c = 1; c < classes.size(); ++c)
        if (score[c] > score[best] ||
            (score[c] == score[best] && score[c] > 0.0 && sum_dist[c] < sum_dist[best]))
            best = c;
    return classes[best];
}

// ---------------------------------------------------------------------------
// Exhaustive Gini enumeration for root splits
// ---------------------------------------------------------------------------

struct EnumeratedSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0;
    double impurity = 0;
    bool unique = true;  // single minimising partition
};

inline EnumeratedSplit enumerate_best_split(const std::vector<std::vector<double>>& X,
                                            const std::vector<int>& y, size_t n_classes)
{
    EnumeratedSplit best;
    size_t n = X.size();
    size_t d = n == 0 ? 0 : X[0].size();
    for (size_t f = 0; f < d; ++f) {
        std::vector<double> vals;
        for (const auto& r : X) vals.push_back(r[f]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (size_t i = 0; i + 1 < vals.size(); ++i) {
            double thr = vals[i] + (vals[i + 1] - vals[i]) / 2.0;
            std::vector<double> lc(n_classes, 0), rc(n_classes, 0);
            double nl = 0, nr = 0;
            for (size_t r = 0; r < n; ++r) {
                if (X[r][f] <= thr) {
                    lc[static_cast<size_t>(y[r])] += 1;
                    nl += 1;
                } else {
                    rc[static_cast<size_t>(y[r])] += 1;
                    nr += 1;
                }
            }
            auto gini = [](const std::vector<double>& c, double total) {
                double g = 1.0;
                for (double v : c) g -= (v / total) * (v / total);
                return g;
            };
            double imp = (nl * gini(lc, nl) + nr * gini(rc, nr)) / static_cast<double>(n);
            if (!best.found || imp < best.impurity) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = thr;
                best.impurity = imp;
                best.unique = true;
            } else if (imp == best.impurity) {
                best.unique = false;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Scratch directories
// ---------------------------------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        path_ = std::filesystem::temp_directory_path() /
                ("mqttids_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testutil

#endif  // MQTTIDS_TESTS_HELPERS_HPP
