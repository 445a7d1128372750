#ifndef MQTTIDS_PCAP_HPP
#define MQTTIDS_PCAP_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mqttids/common.hpp"

namespace mqttids {

// One captured frame. Timestamps stay split until consumers ask for
// decimal seconds so nanosecond captures lose nothing on ingest.
struct RawFrame {
    uint32_t ts_sec = 0;
    uint32_t ts_frac = 0;          // microseconds or nanoseconds, per file magic
    bool frac_is_nanos = false;
    uint32_t captured_len = 0;
    uint32_t original_len = 0;
    std::vector<uint8_t> data;

    double timestamp() const
    {
        double unit = frac_is_nanos ? 1e-9 : 1e-6;
        return static_cast<double>(ts_sec) + static_cast<double>(ts_frac) * unit;
    }
};

namespace pcap_magic {
inline constexpr uint32_t micros = 0xa1b2c3d4;
inline constexpr uint32_t micros_swapped = 0xd4c3b2a1;
inline constexpr uint32_t nanos = 0xa1b23c4d;
inline constexpr uint32_t nanos_swapped = 0x4d3cb2a1;
}  // namespace pcap_magic

inline constexpr uint32_t kLinkTypeEthernet = 1;

// Streaming reader for classic pcap files (both byte orders, micro- and
// nanosecond timestamp variants). Link type must be Ethernet.
class PcapReader {
public:
    explicit PcapReader(std::istream& in) : in_(in) { read_global_header(); }

    bool nanosecond_timestamps() const { return nanos_; }
    uint32_t snaplen() const { return snaplen_; }

    // Returns false at a clean end of file. Throws TruncatedRecord when a
    // record header or body claims more bytes than remain.
    bool next(RawFrame& frame)
    {
        uint8_t hdr[16];
        in_.read(reinterpret_cast<char*>(hdr), 16);
        std::streamsize got = in_.gcount();
        if (got == 0) return false;
        if (got < 16) throw TruncatedRecord("partial record header");

        frame.ts_sec = read_u32(hdr);
        frame.ts_frac = read_u32(hdr + 4);
        frame.frac_is_nanos = nanos_;
        uint32_t incl_len = read_u32(hdr + 8);
        frame.original_len = read_u32(hdr + 12);

        frame.data.resize(incl_len);
        if (incl_len > 0) {
            in_.read(reinterpret_cast<char*>(frame.data.data()), incl_len);
            if (static_cast<uint32_t>(in_.gcount()) < incl_len)
                throw TruncatedRecord("record body shorter than incl_len");
        }
        frame.captured_len = incl_len;
        if (frame.original_len < frame.captured_len)
            frame.original_len = frame.captured_len;
        return true;
    }

private:
    void read_global_header()
    {
        uint8_t hdr[24];
        in_.read(reinterpret_cast<char*>(hdr), 24);
        if (in_.gcount() < 24) throw BadMagic("file shorter than a pcap global header");

        uint32_t magic;
        std::memcpy(&magic, hdr, 4);
        switch (magic) {
            case pcap_magic::micros: swapped_ = false; nanos_ = false; break;
            case pcap_magic::micros_swapped: swapped_ = true; nanos_ = false; break;
            case pcap_magic::nanos: swapped_ = false; nanos_ = true; break;
            case pcap_magic::nanos_swapped: swapped_ = true; nanos_ = true; break;
            default: throw BadMagic("not a pcap file");
        }
        snaplen_ = read_u32(hdr + 16);
        uint32_t linktype = read_u32(hdr + 20);
        if (linktype != kLinkTypeEthernet)
            throw UnsupportedLinkType("link type " + std::to_string(linktype));
    }

    // swapped_ == true means the file's byte order differs from the host's;
    // the magic comparison above established that.
    uint32_t read_u32(const uint8_t* p) const
    {
        uint32_t v;
        std::memcpy(&v, p, 4);
        if (!swapped_) return v;
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) |
               ((v >> 8) & 0xff00u) | (v >> 24);
    }

    std::istream& in_;
    bool swapped_ = false;
    bool nanos_ = false;
    uint32_t snaplen_ = 0;
};

// Reads a whole capture into memory. Streaming via PcapReader is preferred
// for large files.
inline std::vector<RawFrame> read_capture(std::istream& in)
{
    PcapReader reader(in);
    std::vector<RawFrame> frames;
    RawFrame f;
    while (reader.next(f)) frames.push_back(f);
    return frames;
}

inline std::vector<RawFrame> read_capture(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return read_capture(in);
}

// Little-endian microsecond writer, link type Ethernet.
class PcapWriter {
public:
    explicit PcapWriter(std::ostream& out, uint32_t snaplen = 65535) : out_(out)
    {
        put_u32(pcap_magic::micros);
        put_u16(2);  // version 2.4
        put_u16(4);
        put_u32(0);  // thiszone
        put_u32(0);  // sigfigs
        put_u32(snaplen);
        put_u32(kLinkTypeEthernet);
    }

    void write(uint32_t ts_sec, uint32_t ts_usec, const std::vector<uint8_t>& data)
    {
        put_u32(ts_sec);
        put_u32(ts_usec);
        put_u32(static_cast<uint32_t>(data.size()));
        put_u32(static_cast<uint32_t>(data.size()));
        out_.write(reinterpret_cast<const char*>(data.data()),
                   static_cast<std::streamsize>(data.size()));
    }

private:
    void put_u16(uint16_t v)
    {
        uint8_t b[2] = {static_cast<uint8_t>(v & 0xff), static_cast<uint8_t>(v >> 8)};
        out_.write(reinterpret_cast<const char*>(b), 2);
    }
    void put_u32(uint32_t v)
    {
        uint8_t b[4] = {static_cast<uint8_t>(v & 0xff), static_cast<uint8_t>((v >> 8) & 0xff),
                        static_cast<uint8_t>((v >> 16) & 0xff), static_cast<uint8_t>(v >> 24)};
        out_.write(reinterpret_cast<const char*>(b), 4);
    }

    std::ostream& out_;
};

}  // namespace mqttids

#endif  // MQTTIDS_PCAP_HPP
