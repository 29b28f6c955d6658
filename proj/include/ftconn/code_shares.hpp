#pragma once

#include <array>

#include "common.hpp"

namespace ftconn {

/// Prime field modulo the Mersenne prime 2^61 - 1.
struct Fq {
    static constexpr std::uint64_t q = (std::uint64_t{1} << 61) - 1;
    static constexpr unsigned bits = 61;
    std::uint64_t v = 0;

    Fq() = default;
    explicit Fq(std::uint64_t x) : v(reduce64(x)) {}

    static std::uint64_t reduce64(std::uint64_t x)
    {
        x = (x & q) + (x >> 61);
        return x >= q ? x - q : x;
    }

    friend Fq operator+(Fq a, Fq b)
    {
        std::uint64_t s = a.v + b.v;
        return raw(s >= q ? s - q : s);
    }
    friend Fq operator-(Fq a, Fq b) { return raw(a.v >= b.v ? a.v - b.v : a.v + q - b.v); }
    friend Fq operator*(Fq a, Fq b)
    {
        __uint128_t p = __uint128_t(a.v) * b.v;
        std::uint64_t lo = std::uint64_t(p & q), hi = std::uint64_t(p >> 61);
        std::uint64_t s = lo + hi;
        s = (s & q) + (s >> 61);
        return raw(s >= q ? s - q : s);
    }
    Fq& operator+=(Fq o) { return *this = *this + o; }
    Fq& operator-=(Fq o) { return *this = *this - o; }
    Fq& operator*=(Fq o) { return *this = *this * o; }
    friend bool operator==(Fq a, Fq b) { return a.v == b.v; }

    Fq pow(std::uint64_t e) const
    {
        Fq r = raw(1), b = *this;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }
    Fq inv() const
    {
        if (v == 0) throw Error(ErrorKind::invalid, "inverse of zero");
        return pow(q - 2);
    }

    static Fq raw(std::uint64_t x)
    {
        Fq f;
        f.v = x;
        return f;
    }
};

/// Smallest quadratic non-residue of F_q, by Euler's criterion.
inline Fq field_nonresidue()
{
    static const Fq nr = [] {
        for (std::uint64_t c = 2;; ++c)
            if (Fq(c).pow((Fq::q - 1) / 2) == Fq(Fq::q - 1)) return Fq(c);
    }();
    return nr;
}

/// a + b*xi in F_{q^2}, xi^2 = field_nonresidue().
struct Fq2 {
    Fq a, b;

    friend Fq2 operator+(Fq2 x, Fq2 y) { return {x.a + y.a, x.b + y.b}; }
    friend Fq2 operator-(Fq2 x, Fq2 y) { return {x.a - y.a, x.b - y.b}; }
    friend Fq2 operator*(Fq2 x, Fq2 y)
    {
        return {x.a * y.a + field_nonresidue() * x.b * y.b, x.a * y.b + x.b * y.a};
    }
    friend Fq2 operator*(Fq2 x, Fq s) { return {x.a * s, x.b * s}; }
    friend bool operator==(Fq2 x, Fq2 y) { return x.a == y.a && x.b == y.b; }

    Fq2 inv() const
    {
        // (a + b xi)^-1 = (a - b xi) / (a^2 - nr b^2)
        Fq norm = a * a - field_nonresidue() * b * b;
        Fq ni = norm.inv();
        return {a * ni, (Fq() - b) * ni};
    }
};

struct CodeShare {
    std::uint32_t index = 0; // evaluation point in [1, k]
    Fq2 value;
    friend bool operator==(const CodeShare& x, const CodeShare& y) { return x.index == y.index && x.value == y.value; }
};

/// Splits m (k symbols) into k shares of a degree ceil(k/d)-1 polynomial over F_{q^d}.
/// Symbols m[2t], m[2t+1] form coefficient t; d = 1 uses the b component as zero.
inline std::vector<CodeShare> encode(const std::vector<Fq>& m, unsigned d = 2)
{
    if (d != 1 && d != 2) throw Error(ErrorKind::invalid, "unsupported extension degree");
    std::size_t k = m.size();
    if (k >= Fq::q) throw Error(ErrorKind::invalid, "message longer than the field");
    std::size_t K = (k + d - 1) / d;
    std::vector<Fq2> coef(K);
    for (std::size_t t = 0; t < K; ++t) {
        coef[t].a = m[d * t];
        if (d == 2 && 2 * t + 1 < k) coef[t].b = m[2 * t + 1];
    }
    std::vector<CodeShare> out(k);
    for (std::size_t i = 1; i <= k; ++i) {
        Fq x(i);
        Fq2 acc{};
        for (std::size_t t = K; t-- > 0;) acc = acc * x + coef[t];
        out[i - 1] = {std::uint32_t(i), acc};
    }
    return out;
}

/// Recovers m from any ceil(k/d) shares with distinct indices, by Lagrange interpolation.
/// The points lie in F_q, so the a and b parts interpolate independently.
inline std::vector<Fq> decode(const std::vector<CodeShare>& shares, std::size_t k, unsigned d = 2)
{
    if (d != 1 && d != 2) throw Error(ErrorKind::invalid, "unsupported extension degree");
    std::size_t K = (k + d - 1) / d;
    std::vector<CodeShare> use;
    std::vector<std::uint32_t> seen;
    for (const CodeShare& s : shares) {
        if (s.index < 1 || s.index > k) throw Error(ErrorKind::invalid, "share index out of range");
        if (std::find(seen.begin(), seen.end(), s.index) != seen.end())
            throw Error(ErrorKind::invalid, "duplicate share index");
        seen.push_back(s.index);
        if (use.size() < K) use.push_back(s);
    }
    if (use.size() < K) throw Error(ErrorKind::invalid, "insufficient shares");
    std::vector<Fq2> coef(K);
    if (K > 0) {
        // master polynomial P(x) = prod (x - x_i), low degree first
        std::vector<Fq> master{Fq::raw(1)};
        for (const CodeShare& s : use) {
            Fq xi(s.index);
            std::vector<Fq> next(master.size() + 1);
            for (std::size_t t = 0; t < master.size(); ++t) {
                next[t + 1] += master[t];
                next[t] -= master[t] * xi;
            }
            master = std::move(next);
        }
        std::vector<Fq> basis(K);
        for (std::size_t i = 0; i < K; ++i) {
            Fq xi(use[i].index);
            // P(x) / (x - x_i) by synthetic division
            Fq carry;
            for (std::size_t t = K; t-- > 0;) {
                carry = master[t + 1] + carry * xi;
                basis[t] = carry;
            }
            Fq denom = Fq::raw(1);
            for (std::size_t j = 0; j < K; ++j)
                if (j != i) denom *= xi - Fq(use[j].index);
            Fq scale = denom.inv();
            for (std::size_t t = 0; t < K; ++t) coef[t] = coef[t] + use[i].value * (basis[t] * scale);
        }
    }
    std::vector<Fq> m(k);
    for (std::size_t t = 0; t < K; ++t) {
        m[d * t] = coef[t].a;
        if (d == 2 && 2 * t + 1 < k) m[2 * t + 1] = coef[t].b;
    }
    return m;
}

/// Wire format: index (u32), a (u64), b (u64), little-endian.
inline std::array<std::uint8_t, 20> share_to_bytes(const CodeShare& s)
{
    std::array<std::uint8_t, 20> out{};
    for (int i = 0; i < 4; ++i) out[std::size_t(i)] = std::uint8_t(s.index >> (8 * i));
    for (int i = 0; i < 8; ++i) out[std::size_t(4 + i)] = std::uint8_t(s.value.a.v >> (8 * i));
    for (int i = 0; i < 8; ++i) out[std::size_t(12 + i)] = std::uint8_t(s.value.b.v >> (8 * i));
    return out;
}

inline CodeShare share_from_bytes(const std::array<std::uint8_t, 20>& in)
{
    CodeShare s;
    std::uint64_t a = 0, b = 0;
    for (int i = 0; i < 4; ++i) s.index |= std::uint32_t(in[std::size_t(i)]) << (8 * i);
    for (int i = 0; i < 8; ++i) a |= std::uint64_t(in[std::size_t(4 + i)]) << (8 * i);
    for (int i = 0; i < 8; ++i) b |= std::uint64_t(in[std::size_t(12 + i)]) << (8 * i);
    if (a >= Fq::q || b >= Fq::q) throw Error(ErrorKind::corrupt, "share value not reduced");
    s.value = {Fq::raw(a), Fq::raw(b)};
    return s;
}

/// Compact in-label form: index in index_bits, then 61 + 61 bits.
inline void put_share(BitWriter& w, const CodeShare& s, unsigned index_bits)
{
    w.put(s.index, index_bits);
    w.put(s.value.a.v, Fq::bits);
    w.put(s.value.b.v, Fq::bits);
}

inline CodeShare get_share(BitReader& r, unsigned index_bits)
{
    CodeShare s;
    s.index = std::uint32_t(r.get(index_bits));
    std::uint64_t a = r.get(Fq::bits), b = r.get(Fq::bits);
    if (a >= Fq::q || b >= Fq::q) throw Error(ErrorKind::corrupt, "share value not reduced");
    s.value = {Fq::raw(a), Fq::raw(b)};
    return s;
}

/// One edge as a single symbol: two 30-bit DFS positions.
inline Fq pack_edge_symbol(std::uint32_t inside, std::uint32_t outside)
{
    return Fq::raw((std::uint64_t(inside) << 30) | outside);
}

inline std::pair<std::uint32_t, std::uint32_t> unpack_edge_symbol(Fq s)
{
    return {std::uint32_t(s.v >> 30), std::uint32_t(s.v & ((1u << 30) - 1))};
}

} // namespace ftconn
