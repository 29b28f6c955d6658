#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftconn {

enum class ErrorKind { parse, size_cap, incompatible, too_many_faults, invalid, corrupt };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Expansion parameter as an exact fraction num/den.
struct Rational {
    std::uint32_t num = 1;
    std::uint32_t den = 2;

    double value() const { return double(num) / double(den); }
    // a*phi < b  <=>  a*num < b*den
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// floor(f / phi) for phi = num/den.
inline std::uint64_t f_over_phi(std::uint64_t f, Rational phi) { return f * phi.den / phi.num; }

/// true iff count > f/phi, computed exactly.
inline bool exceeds_f_over_phi(std::uint64_t count, std::uint64_t f, Rational phi)
{
    return count * phi.num > f * phi.den;
}

inline unsigned ceil_log2(std::uint64_t x)
{
    if (x <= 1) return 0;
    return unsigned(std::bit_width(x - 1));
}

inline unsigned floor_log2(std::uint64_t x) { return x == 0 ? 0 : unsigned(std::bit_width(x) - 1); }

/// Bits needed to store any value in [0, x].
inline unsigned bits_for(std::uint64_t x) { return x == 0 ? 0 : unsigned(std::bit_width(x)); }

/// Size cap for exponential-time enumerators; FLBL_NEXACT overrides the default of 18.
inline int exact_size_cap()
{
    if (const char* s = std::getenv("FLBL_NEXACT")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end != s && v > 0 && v < 31) return int(v);
    }
    return 18;
}

class DisjointSets {
public:
    DisjointSets() = default;
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1)
    {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t size() const { return parent_.size(); }

    std::size_t add()
    {
        parent_.push_back(parent_.size());
        size_.push_back(1);
        return parent_.size() - 1;
    }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

    bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// Append-only bit buffer, LSB-first within each byte.
class BitWriter {
public:
    void put(std::uint64_t value, unsigned width)
    {
        if (width < 64) value &= (std::uint64_t{1} << width) - 1;
        while (width > 0) {
            if (bits_ % 8 == 0) bytes_.push_back(0);
            unsigned off = unsigned(bits_ % 8), take = std::min(width, 8 - off);
            bytes_.back() |= std::uint8_t((value & ((1u << take) - 1)) << off);
            value >>= take;
            width -= take;
            bits_ += take;
        }
    }

    void put_bit(bool b) { put(b ? 1 : 0, 1); }

    void put_bits(const std::vector<std::uint64_t>& words, std::size_t nbits)
    {
        for (std::size_t i = 0; i < nbits; ++i) put_bit((words[i / 64] >> (i % 64)) & 1u);
    }

    std::size_t bit_size() const { return bits_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t bits_ = 0;
};

class BitReader {
public:
    BitReader(const std::vector<std::uint8_t>& bytes, std::size_t nbits) : bytes_(&bytes), limit_(nbits) {}

    std::uint64_t get(unsigned width)
    {
        if (limit_ - pos_ < width) throw Error(ErrorKind::corrupt, "label payload truncated");
        std::uint64_t v = 0;
        unsigned done = 0;
        while (done < width) {
            unsigned off = unsigned(pos_ % 8), take = std::min(width - done, 8 - off);
            std::uint64_t chunk = ((*bytes_)[pos_ / 8] >> off) & ((1u << take) - 1);
            v |= chunk << done;
            done += take;
            pos_ += take;
        }
        return v;
    }

    bool get_bit() { return get(1) != 0; }

    std::vector<std::uint64_t> get_bits(std::size_t nbits)
    {
        std::vector<std::uint64_t> w((nbits + 63) / 64, 0);
        for (std::size_t i = 0; i < nbits; ++i)
            if (get_bit()) w[i / 64] |= std::uint64_t{1} << (i % 64);
        return w;
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return limit_ - pos_; }
    bool at_end() const { return pos_ == limit_; }

private:
    const std::vector<std::uint8_t>* bytes_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

} // namespace ftconn
