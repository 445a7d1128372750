#ifndef MQTTIDS_COMMON_HPP
#define MQTTIDS_COMMON_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mqttids {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Errors. UsageError maps to exit code 1 in the CLI, DataError to exit code 2.
// ---------------------------------------------------------------------------

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MQTTIDS_DEFINE_ERROR(Name)                                  \
    struct Name : DataError {                                       \
        explicit Name(const std::string& what = #Name)              \
            : DataError(std::string(#Name) == what ? what           \
                        : std::string(#Name) + ": " + what) {}      \
    }

MQTTIDS_DEFINE_ERROR(BadMagic);
MQTTIDS_DEFINE_ERROR(UnsupportedLinkType);
MQTTIDS_DEFINE_ERROR(TruncatedRecord);
MQTTIDS_DEFINE_ERROR(MissingColumn);
MQTTIDS_DEFINE_ERROR(SchemaMismatch);
MQTTIDS_DEFINE_ERROR(DegenerateSplit);
MQTTIDS_DEFINE_ERROR(SingleClass);
MQTTIDS_DEFINE_ERROR(NonNumericColumn);
MQTTIDS_DEFINE_ERROR(DimensionMismatch);
MQTTIDS_DEFINE_ERROR(LengthMismatch);
MQTTIDS_DEFINE_ERROR(EmptyMatrix);
MQTTIDS_DEFINE_ERROR(EmptyFlow);
MQTTIDS_DEFINE_ERROR(InsufficientClassRows);
MQTTIDS_DEFINE_ERROR(InvalidConfig);

#undef MQTTIDS_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Traffic classes
// ---------------------------------------------------------------------------

enum class AttackClass : uint8_t { benign = 0, scan_a, scan_su, sparta, mqtt_bf };

inline constexpr std::array<const char*, 5> kClassNames = {
    "Benign", "Scan_A", "Scan_sU", "Sparta", "MQTT_BF"};

inline std::string to_string(AttackClass c)
{
    return kClassNames[static_cast<size_t>(c)];
}

inline AttackClass attack_class_from_string(std::string_view s)
{
    for (size_t i = 0; i < kClassNames.size(); ++i)
        if (s == kClassNames[i]) return static_cast<AttackClass>(i);
    throw DataError("unknown class label: " + std::string(s));
}

// Canonical label order: the five known classes first, anything else after
// them in lexicographic order. Duplicates collapse. Used for confusion
// matrices and model class lists so all outputs are deterministic.
inline std::vector<std::string> canonical_class_order(std::vector<std::string> observed)
{
    std::sort(observed.begin(), observed.end());
    observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
    std::vector<std::string> out;
    for (const char* name : kClassNames) {
        for (auto it = observed.begin(); it != observed.end(); ++it) {
            if (*it == name) {
                out.push_back(*it);
                observed.erase(it);
                break;
            }
        }
    }
    for (auto& s : observed) out.push_back(std::move(s));
    return out;
}

// ---------------------------------------------------------------------------
// Deterministic RNG. std::uniform_*_distribution is implementation-defined,
// so all draws go through these helpers to keep outputs byte-identical
// across compilers.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t& state)
{
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derive an independent stream seed, e.g. one per tree in a forest.
inline uint64_t derive_seed(uint64_t master, uint64_t index)
{
    uint64_t s = master;
    uint64_t a = splitmix64(s);
    s = master ^ (index + 0x9e3779b97f4a7c15ull);
    return a ^ splitmix64(s);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x853c49e6748fea9bull) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // Unbiased integer in [0, n).
    uint64_t below(uint64_t n)
    {
        if (n == 0) return 0;
        uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    int64_t range_int(int64_t lo, int64_t hi)  // inclusive bounds
    {
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    double unit()  // [0,1)
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double range(double lo, double hi) { return lo + unit() * (hi - lo); }

    bool chance(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

// ---------------------------------------------------------------------------
// Number formatting. Shortest round-trip representation so CSV and JSON
// outputs are byte-stable and read back bit-exact.
// ---------------------------------------------------------------------------

inline std::string format_double(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw DataError("not a number: '" + std::string(s) + "'");
    return v;
}

// Percentage with two decimals, e.g. 0.7887 -> "78.87".
inline std::string format_pct(double fraction)
{
    double pct = fraction * 100.0;
    char buf[32];
    int n = std::snprintf(buf, sizeof buf, "%.2f", pct);
    return std::string(buf, buf + n);
}

}  // namespace mqttids

#endif  // MQTTIDS_COMMON_HPP
