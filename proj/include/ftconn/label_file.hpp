#pragma once

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "common.hpp"

namespace ftconn {

/// One serialized label: bytes plus the exact number of meaningful bits.
struct Payload {
    std::vector<std::uint8_t> bytes;
    std::size_t bits = 0;

    Payload() = default;
    explicit Payload(BitWriter&& w) : bits(w.bit_size()) { bytes = w.take(); }

    BitReader reader() const { return BitReader(bytes, bits); }
    friend bool operator==(const Payload&, const Payload&) = default;
};

enum class SchemeId : std::uint8_t { simple = 1, sqrt = 2, rand_long = 3, rand_short = 4 };

struct LabelFile {
    static constexpr std::uint16_t version = 1;

    SchemeId scheme = SchemeId::simple;
    std::uint32_t n = 0, m = 0, f = 0, h = 0;
    Rational phi{1, 2};
    std::uint64_t seed = 0;
    Payload extra; // scheme parameters shared by all labels
    std::vector<Payload> vertex;
    std::vector<Payload> edge;

    friend bool operator==(const LabelFile&, const LabelFile&) = default;
};

struct LabelBits {
    std::size_t max_bits = 0;
    double mean_bits = 0;
    std::size_t max_vertex_bits = 0;
    std::size_t max_edge_bits = 0;
};

/// Label bit-lengths, padding excluded.
inline LabelBits label_bits(const LabelFile& file)
{
    LabelBits r;
    std::size_t total = 0, count = 0;
    for (const auto& p : file.vertex) {
        r.max_vertex_bits = std::max(r.max_vertex_bits, p.bits);
        total += p.bits;
        ++count;
    }
    for (const auto& p : file.edge) {
        r.max_edge_bits = std::max(r.max_edge_bits, p.bits);
        total += p.bits;
        ++count;
    }
    r.max_bits = std::max(r.max_vertex_bits, r.max_edge_bits);
    r.mean_bits = count ? double(total) / double(count) : 0.0;
    return r;
}

namespace detail {

inline void write_le(std::ostream& out, std::uint64_t v, int bytes)
{
    for (int i = 0; i < bytes; ++i) out.put(char(std::uint8_t(v >> (8 * i))));
}

inline std::uint64_t read_le(std::istream& in, int bytes)
{
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        int c = in.get();
        if (c == EOF) throw Error(ErrorKind::corrupt, "label file truncated");
        v |= std::uint64_t(std::uint8_t(c)) << (8 * i);
    }
    return v;
}

inline void write_payload(std::ostream& out, const Payload& p)
{
    write_le(out, p.bits, 8);
    out.write(reinterpret_cast<const char*>(p.bytes.data()), std::streamsize(p.bytes.size()));
}

inline Payload read_payload(std::istream& in)
{
    Payload p;
    p.bits = read_le(in, 8);
    if (p.bits > (std::uint64_t{1} << 40)) throw Error(ErrorKind::corrupt, "implausible payload length");
    p.bytes.resize((p.bits + 7) / 8);
    in.read(reinterpret_cast<char*>(p.bytes.data()), std::streamsize(p.bytes.size()));
    if (std::size_t(in.gcount()) != p.bytes.size()) throw Error(ErrorKind::corrupt, "label file truncated");
    if (p.bits % 8 && (p.bytes.back() >> (p.bits % 8)) != 0) throw Error(ErrorKind::corrupt, "nonzero padding");
    return p;
}

} // namespace detail

inline void write_label_file(std::ostream& out, const LabelFile& file)
{
    out.write("FLBL", 4);
    detail::write_le(out, LabelFile::version, 2);
    detail::write_le(out, std::uint8_t(file.scheme), 1);
    detail::write_le(out, file.n, 4);
    detail::write_le(out, file.m, 4);
    detail::write_le(out, file.f, 4);
    detail::write_le(out, file.h, 4);
    detail::write_le(out, file.phi.num, 4);
    detail::write_le(out, file.phi.den, 4);
    detail::write_le(out, file.seed, 8);
    detail::write_payload(out, file.extra);
    for (const auto& p : file.vertex) detail::write_payload(out, p);
    for (const auto& p : file.edge) detail::write_payload(out, p);
}

inline LabelFile read_label_file(std::istream& in)
{
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "FLBL", 4) != 0) throw Error(ErrorKind::corrupt, "not a label file");
    if (detail::read_le(in, 2) != LabelFile::version) throw Error(ErrorKind::corrupt, "unsupported label file version");
    LabelFile file;
    std::uint64_t scheme = detail::read_le(in, 1);
    if (scheme < 1 || scheme > 4) throw Error(ErrorKind::corrupt, "unknown scheme id");
    file.scheme = SchemeId(scheme);
    file.n = std::uint32_t(detail::read_le(in, 4));
    file.m = std::uint32_t(detail::read_le(in, 4));
    file.f = std::uint32_t(detail::read_le(in, 4));
    file.h = std::uint32_t(detail::read_le(in, 4));
    file.phi.num = std::uint32_t(detail::read_le(in, 4));
    file.phi.den = std::uint32_t(detail::read_le(in, 4));
    if (file.phi.num == 0 || file.phi.den == 0) throw Error(ErrorKind::corrupt, "bad expansion parameter");
    file.seed = detail::read_le(in, 8);
    file.extra = detail::read_payload(in);
    file.vertex.reserve(file.n);
    for (std::uint32_t v = 0; v < file.n; ++v) file.vertex.push_back(detail::read_payload(in));
    file.edge.reserve(file.m);
    for (std::uint32_t e = 0; e < file.m; ++e) file.edge.push_back(detail::read_payload(in));
    if (in.peek() != EOF) throw Error(ErrorKind::corrupt, "trailing bytes after labels");
    return file;
}

inline void save_label_file(const std::string& path, const LabelFile& file)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::invalid, "cannot write " + path);
    write_label_file(out, file);
    if (!out) throw Error(ErrorKind::invalid, "write failed: " + path);
}

inline LabelFile load_label_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::invalid, "cannot open " + path);
    return read_label_file(in);
}

} // namespace ftconn
