#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "graph.hpp"
#include "label_file.hpp"

namespace ftconn {

/// Thorup's distinguisher: 1 iff (a * x mod 2^w) < t.
inline bool sample(std::uint64_t a, std::uint64_t t, std::uint64_t x, unsigned w)
{
    if ((a & 1) == 0) throw Error(ErrorKind::invalid, "distinguisher multiplier must be odd");
    if (w == 0 || w > 64) throw Error(ErrorKind::invalid, "bad word width");
    std::uint64_t mask = w == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
    if (w < 64 && t > mask + 1) throw Error(ErrorKind::invalid, "threshold out of range");
    return ((a * x) & mask) < t;
}

/// GF(2) vector of fixed length, packed in words.
struct BitVec {
    std::vector<std::uint64_t> w;

    BitVec() = default;
    explicit BitVec(std::size_t bits) : w((bits + 63) / 64, 0) {}
    BitVec& operator^=(const BitVec& o)
    {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] ^= o.w[i];
        return *this;
    }
    bool zero() const
    {
        return std::all_of(w.begin(), w.end(), [](std::uint64_t x) { return x == 0; });
    }
    bool get(std::size_t i) const { return w[i / 64] >> (i % 64) & 1; }
    void flip(std::size_t i) { w[i / 64] ^= std::uint64_t{1} << (i % 64); }
    friend bool operator==(const BitVec&, const BitVec&) = default;
};

inline BitVec random_bitvec(std::size_t bits, std::mt19937_64& rng)
{
    BitVec v(bits);
    for (auto& x : v.w) x = rng();
    if (bits % 64) v.w.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
    return v;
}

inline void put_bitvec(BitWriter& w, const BitVec& v, std::size_t bits)
{
    for (std::size_t i = 0; i < bits; i += 64) w.put(v.w[i / 64], unsigned(std::min<std::size_t>(64, bits - i)));
}

inline BitVec get_bitvec(BitReader& r, std::size_t bits)
{
    BitVec v(bits);
    for (std::size_t i = 0; i < bits; i += 64) v.w[i / 64] = r.get(unsigned(std::min<std::size_t>(64, bits - i)));
    return v;
}

/// Groups columns of a GF(2) system by their values on a basis of its kernel. When the kernel is spanned
/// by the indicators of the true groups, this recovers exactly those groups.
inline std::vector<std::size_t> kernel_groups(const std::vector<BitVec>& cols)
{
    std::size_t k = cols.size();
    // eliminate, tracking which columns make up each reduced vector
    std::vector<BitVec> vec = cols, comb(k, BitVec(k));
    for (std::size_t i = 0; i < k; ++i) comb[i].flip(i);
    std::vector<BitVec> kernel;
    std::size_t words = cols.empty() ? 0 : cols[0].w.size();
    std::vector<std::pair<std::size_t, std::size_t>> pivots; // (bit, vector index)
    for (std::size_t i = 0; i < k; ++i) {
        for (auto [bit, j] : pivots)
            if (vec[i].get(bit)) {
                vec[i] ^= vec[j];
                comb[i] ^= comb[j];
            }
        std::size_t bit = SIZE_MAX;
        for (std::size_t x = 0; x < words && bit == SIZE_MAX; ++x)
            if (vec[i].w[x]) bit = x * 64 + std::size_t(std::countr_zero(vec[i].w[x]));
        if (bit == SIZE_MAX) kernel.push_back(comb[i]);
        else pivots.push_back({bit, i});
    }
    std::map<std::vector<char>, std::size_t> ids;
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<char> sig;
        for (const BitVec& z : kernel) sig.push_back(z.get(i));
        out[i] = ids.emplace(sig, ids.size()).first->second;
    }
    return out;
}

/// Any spanning forest: BFS from the smallest vertex of each component, numbered in DFS preorder.
struct RandFrame {
    std::vector<char> is_tree;    // per edge
    std::vector<Vertex> child;    // per tree edge
    std::vector<std::uint32_t> dfs, hi; // per vertex: preorder number and largest number in its subtree
    std::vector<std::uint32_t> roots;   // DFS numbers of component roots, ascending
};

inline RandFrame build_rand_frame(const Graph& g)
{
    std::size_t n = g.n();
    RandFrame fr;
    fr.is_tree.assign(g.m(), 0);
    fr.child.assign(g.m(), 0);
    fr.dfs.assign(n, 0);
    fr.hi.assign(n, 0);
    std::vector<char> seen(n, 0);
    std::vector<std::vector<Vertex>> kids(n);
    std::vector<Vertex> roots;
    for (Vertex r = 0; r < n; ++r) {
        if (seen[r]) continue;
        roots.push_back(r);
        seen[r] = 1;
        std::vector<Vertex> queue{r};
        for (std::size_t i = 0; i < queue.size(); ++i)
            for (const Incidence& inc : g.adj(queue[i]))
                if (!seen[inc.to]) {
                    seen[inc.to] = 1;
                    fr.is_tree[inc.edge] = 1;
                    fr.child[inc.edge] = inc.to;
                    kids[queue[i]].push_back(inc.to);
                    queue.push_back(inc.to);
                }
    }
    std::uint32_t next = 0;
    for (Vertex r : roots) {
        std::vector<std::pair<Vertex, std::size_t>> stack{{r, 0}};
        fr.dfs[r] = next++;
        fr.roots.push_back(fr.dfs[r]);
        while (!stack.empty()) {
            auto& [v, i] = stack.back();
            if (i < kids[v].size()) {
                Vertex c = kids[v][i++];
                fr.dfs[c] = next++;
                stack.push_back({c, 0});
            } else {
                fr.hi[v] = next - 1;
                stack.pop_back();
            }
        }
    }
    return fr;
}

struct RandParams {
    SchemeId scheme = SchemeId::rand_long;
    std::uint32_t n = 0, m = 0, f = 1;
    std::uint64_t seed = 0;
    unsigned c = 4;     // signature length and false-zero exponent, per log n
    unsigned B = 1, J = 1; // sketch rows and rank columns (short scheme)
    std::uint32_t L0 = 1;  // sk0 length
    std::vector<std::uint32_t> roots;

    unsigned logn() const { return std::max(1u, ceil_log2(n)); }
    unsigned pos_bits() const { return logn(); }
    unsigned w() const { return 2 * logn(); }
    unsigned sig_bits() const { return c * logn(); }
    unsigned rank_bits() const { return bits_for(J); }
    bool is_short() const { return scheme == SchemeId::rand_short; }

    LabelFile file() const
    {
        LabelFile lf;
        lf.scheme = scheme;
        lf.n = n;
        lf.m = m;
        lf.f = f;
        lf.h = 0;
        lf.seed = seed;
        BitWriter bw;
        bw.put(c, 8);
        bw.put(B, 8);
        bw.put(J, 8);
        bw.put(L0, 32);
        bw.put(roots.size(), 32);
        for (auto r : roots) bw.put(r, pos_bits());
        lf.extra = Payload(std::move(bw));
        return lf;
    }

    static RandParams from_file(const LabelFile& lf)
    {
        if (lf.scheme != SchemeId::rand_long && lf.scheme != SchemeId::rand_short)
            throw Error(ErrorKind::incompatible, "not a randomized edge label file");
        RandParams p;
        p.scheme = lf.scheme;
        p.n = lf.n;
        p.m = lf.m;
        p.f = lf.f;
        p.seed = lf.seed;
        BitReader r = lf.extra.reader();
        p.c = unsigned(r.get(8));
        p.B = unsigned(r.get(8));
        p.J = unsigned(r.get(8));
        p.L0 = std::uint32_t(r.get(32));
        std::uint64_t k = r.get(32);
        if (k > p.n) throw Error(ErrorKind::corrupt, "more roots than vertices");
        for (std::uint64_t i = 0; i < k; ++i) p.roots.push_back(std::uint32_t(r.get(p.pos_bits())));
        if (!r.at_end() || p.c == 0 || p.B == 0 || p.J == 0 || p.L0 == 0 || p.sig_bits() > 128 || p.w() > 64)
            throw Error(ErrorKind::corrupt, "bad randomized scheme parameters");
        return p;
    }
};

/// uid(x) = (x, Sig(x)); XOR-aggregated in sketch cells.
struct UidCell {
    std::uint64_t x = 0;
    std::array<std::uint64_t, 2> sig{};

    UidCell& operator^=(const UidCell& o)
    {
        x ^= o.x;
        sig[0] ^= o.sig[0];
        sig[1] ^= o.sig[1];
        return *this;
    }
    bool zero() const { return x == 0 && sig[0] == 0 && sig[1] == 0; }
    friend bool operator==(const UidCell&, const UidCell&) = default;
};

/// The distinguishers behind Sig, derived from the file seed.
class UidCodec {
public:
    explicit UidCodec(const RandParams& p) : w_(p.w()), half_(p.logn()), bits_(p.sig_bits())
    {
        if (bits_ > 128) throw Error(ErrorKind::invalid, "signature longer than 128 bits");
        std::mt19937_64 rng(p.seed ^ 0x5167a11ce5ull);
        std::uint64_t mask = w_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w_) - 1;
        for (unsigned i = 0; i < bits_; ++i) {
            std::uint64_t a = (rng() & mask) | 1, t = rng() & mask;
            at_.push_back({a, t});
        }
    }

    std::uint64_t name(std::uint32_t a, std::uint32_t b) const
    {
        if (a > b) std::swap(a, b);
        return (std::uint64_t(a) << half_) | b;
    }
    std::pair<std::uint32_t, std::uint32_t> endpoints(std::uint64_t x) const
    {
        return {std::uint32_t(x >> half_), std::uint32_t(x & ((std::uint64_t{1} << half_) - 1))};
    }

    UidCell uid(std::uint64_t x) const
    {
        UidCell c;
        c.x = x;
        for (unsigned i = 0; i < bits_; ++i)
            if (sample(at_[i].first, at_[i].second, x, w_)) c.sig[i / 64] |= std::uint64_t{1} << (i % 64);
        return c;
    }

    /// The uid when `agg` passes the signature check, else nothing.
    std::optional<UidCell> singleton(const UidCell& agg) const
    {
        if (agg.zero()) return std::nullopt;
        if (w_ < 64 && (agg.x >> w_) != 0) return std::nullopt;
        UidCell c = uid(agg.x);
        if (!(c == agg)) return std::nullopt;
        return c;
    }

    unsigned sig_bits() const { return bits_; }
    unsigned w() const { return w_; }

private:
    unsigned w_, half_, bits_;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> at_;
};

using SketchMatrix = std::vector<UidCell>; // B x J, row major

inline RandParams rand_params(const Graph& g, const RandFrame& fr, std::uint32_t f, std::uint64_t seed, bool short_scheme,
                              unsigned c = 4)
{
    if (f < 1) throw Error(ErrorKind::invalid, "f must be at least 1");
    RandParams p;
    p.scheme = short_scheme ? SchemeId::rand_short : SchemeId::rand_long;
    p.n = std::uint32_t(g.n());
    p.m = std::uint32_t(g.m());
    p.f = f;
    p.seed = seed;
    p.c = c;
    p.roots = fr.roots;
    unsigned lg = p.logn();
    if (p.w() > 64) throw Error(ErrorKind::invalid, "graph too large for 64-bit edge names");
    if (short_scheme) {
        p.L0 = lg * lg;
        double ratio = double(f) / double(lg * lg);
        p.B = std::max(1, int(std::ceil(std::log2(std::max(ratio, 1.0)))) + 3);
        p.J = std::max(1u, ceil_log2(std::max<std::size_t>(g.m(), 2))) + 2;
    } else {
        p.L0 = f + c * lg;
    }
    return p;
}

/// Short labels pay off only for f >= 2 log^2 n; below that the long scheme is used.
inline bool short_scheme_applies(std::size_t n, std::uint32_t f)
{
    std::uint64_t lg = std::max(1u, ceil_log2(n));
    return f >= 2 * lg * lg;
}

class RandLabeler {
public:
    RandLabeler(const Graph& g, std::uint32_t f, std::uint64_t seed, bool short_scheme, unsigned c = 4)
        : g_(&g), fr_(build_rand_frame(g)), p_(rand_params(g, fr_, f, seed, short_scheme, c)), codec_(p_)
    {
        std::mt19937_64 rng(seed);
        std::size_t n = g.n(), m = g.m();
        sk0_edge_.resize(m);
        for (EdgeId e = 0; e < m; ++e) sk0_edge_[e] = random_bitvec(p_.L0, rng);
        if (p_.is_short()) {
            ranks_.assign(m, std::vector<std::uint8_t>(p_.B));
            for (EdgeId e = 0; e < m; ++e)
                for (auto& rk : ranks_[e]) rk = std::uint8_t(std::min<unsigned>(p_.J, 1 + std::countr_zero(rng() | (std::uint64_t{1} << 63))));
        }
        // per-vertex XOR of incident non-tree edges, then subtree sums in reverse preorder
        std::vector<Vertex> by_dfs(n);
        for (Vertex v = 0; v < n; ++v) by_dfs[fr_.dfs[v]] = v;
        sub0_.assign(n, BitVec(p_.L0));
        if (p_.is_short()) sub_.assign(n, SketchMatrix(std::size_t(p_.B) * p_.J));
        std::vector<Vertex> parent(n, Vertex(-1));
        for (EdgeId e = 0; e < m; ++e) {
            Edge ed = g.edge(e);
            if (fr_.is_tree[e]) {
                Vertex ch = fr_.child[e];
                parent[ch] = ch == ed.u ? ed.v : ed.u;
                continue;
            }
            for (Vertex x : {ed.u, ed.v}) {
                sub0_[x] ^= sk0_edge_[e];
                if (p_.is_short()) add_edge_sketch(sub_[x], e);
            }
        }
        for (std::size_t d = n; d-- > 0;) {
            Vertex v = by_dfs[d];
            if (parent[v] == Vertex(-1)) continue;
            sub0_[parent[v]] ^= sub0_[v];
            if (p_.is_short())
                for (std::size_t k = 0; k < sub_[v].size(); ++k) sub_[parent[v]][k] ^= sub_[v][k];
        }
    }

    const RandParams& params() const { return p_; }
    const RandFrame& frame() const { return fr_; }
    const UidCodec& codec() const { return codec_; }
    const BitVec& sk0(EdgeId e) const { return sk0_edge_[e]; }
    const BitVec& subtree_sk0(Vertex v) const { return sub0_[v]; }
    const SketchMatrix& subtree_sk(Vertex v) const { return sub_[v]; }
    std::uint8_t rank(EdgeId e, unsigned row) const { return ranks_[e][row]; }

    /// sk(e) as a full matrix (only the cells named by its ranks are non-zero).
    SketchMatrix edge_sketch(EdgeId e) const
    {
        SketchMatrix s(std::size_t(p_.B) * p_.J);
        add_edge_sketch(s, e);
        return s;
    }

    Payload vertex_label(Vertex v) const
    {
        BitWriter w;
        w.put(fr_.dfs[v], p_.pos_bits());
        w.put(fr_.hi[v], p_.pos_bits());
        return Payload(std::move(w));
    }

    Payload edge_label(EdgeId e) const
    {
        BitWriter w;
        Edge ed = g_->edge(e);
        bool tree = fr_.is_tree[e];
        w.put_bit(tree);
        if (tree) {
            Vertex c = fr_.child[e];
            w.put(fr_.dfs[c], p_.pos_bits());
            w.put(fr_.hi[c], p_.pos_bits());
            put_bitvec(w, sub0_[c], p_.L0);
            if (p_.is_short())
                for (const UidCell& cell : sub_[c]) put_cell(w, cell);
        } else {
            w.put(fr_.dfs[ed.u], p_.pos_bits());
            w.put(fr_.dfs[ed.v], p_.pos_bits());
            put_bitvec(w, sk0_edge_[e], p_.L0);
            if (p_.is_short())
                for (auto rk : ranks_[e]) w.put(rk - 1u, p_.rank_bits());
        }
        return Payload(std::move(w));
    }

    LabelFile build() const
    {
        LabelFile lf = p_.file();
        for (Vertex v = 0; v < g_->n(); ++v) lf.vertex.push_back(vertex_label(v));
        for (EdgeId e = 0; e < g_->m(); ++e) lf.edge.push_back(edge_label(e));
        return lf;
    }

private:
    void add_edge_sketch(SketchMatrix& s, EdgeId e) const
    {
        Edge ed = g_->edge(e);
        UidCell u = codec_.uid(codec_.name(fr_.dfs[ed.u], fr_.dfs[ed.v]));
        for (unsigned i = 0; i < p_.B; ++i) s[std::size_t(i) * p_.J + ranks_[e][i] - 1] ^= u;
    }

    void put_cell(BitWriter& w, const UidCell& c) const
    {
        w.put(c.x, p_.w());
        unsigned s = p_.sig_bits();
        w.put(c.sig[0], std::min(64u, s));
        if (s > 64) w.put(c.sig[1], s - 64);
    }

    const Graph* g_;
    RandFrame fr_;
    RandParams p_;
    UidCodec codec_;
    std::vector<BitVec> sk0_edge_;
    std::vector<std::vector<std::uint8_t>> ranks_;
    std::vector<BitVec> sub0_;
    std::vector<SketchMatrix> sub_;
};

/// Long labels always; short labels when f is in their regime or when forced. `rerouted` reports a fallback.
inline LabelFile build_rand_labels(const Graph& g, std::uint32_t f, std::uint64_t seed, bool want_short,
                                   bool force = false, bool* rerouted = nullptr)
{
    bool use_short = want_short && (force || short_scheme_applies(g.n(), f));
    if (rerouted) *rerouted = want_short && !use_short;
    return RandLabeler(g, f, seed, use_short).build();
}

struct RandEdgeLabel {
    bool tree = false;
    std::uint32_t a = 0, b = 0; // tree: child DFS range; non-tree: endpoint DFS numbers
    BitVec sk0;
    SketchMatrix sk;                // tree edges, short scheme
    std::vector<std::uint8_t> ranks; // non-tree edges, short scheme
};

inline std::pair<std::uint32_t, std::uint32_t> decode_rand_vertex(const RandParams& p, const Payload& label)
{
    BitReader r = label.reader();
    auto lo = std::uint32_t(r.get(p.pos_bits())), hi = std::uint32_t(r.get(p.pos_bits()));
    if (!r.at_end() || lo > hi || hi >= p.n) throw Error(ErrorKind::corrupt, "bad vertex label");
    return {lo, hi};
}

inline RandEdgeLabel decode_rand_edge(const RandParams& p, const Payload& label)
{
    BitReader r = label.reader();
    RandEdgeLabel out;
    out.tree = r.get_bit();
    out.a = std::uint32_t(r.get(p.pos_bits()));
    out.b = std::uint32_t(r.get(p.pos_bits()));
    if (out.a >= p.n || out.b >= p.n || (out.tree ? out.a > out.b : out.a == out.b))
        throw Error(ErrorKind::corrupt, "bad edge endpoints");
    out.sk0 = get_bitvec(r, p.L0);
    if (p.is_short()) {
        if (out.tree) {
            out.sk.resize(std::size_t(p.B) * p.J);
            unsigned s = p.sig_bits();
            for (UidCell& c : out.sk) {
                c.x = r.get(p.w());
                c.sig[0] = r.get(std::min(64u, s));
                if (s > 64) c.sig[1] = r.get(s - 64);
            }
        } else {
            for (unsigned i = 0; i < p.B; ++i) {
                auto rk = r.get(p.rank_bits()) + 1;
                if (rk > p.J) throw Error(ErrorKind::corrupt, "rank out of range");
                out.ranks.push_back(std::uint8_t(rk));
            }
        }
    }
    if (!r.at_end()) throw Error(ErrorKind::corrupt, "trailing bits in edge label");
    return out;
}

/// Partition of the touched components into parts after each Boruvka step (short scheme only).
struct RandTrace {
    std::vector<std::uint32_t> piece_anchor;          // a DFS number inside each piece
    std::vector<std::vector<std::size_t>> part_of;    // [step][piece] -> part id; step 0 is the initial split
    std::vector<std::size_t> edges_found;             // valid edges reported per step
};

class RandQuery {
public:
    RandQuery(const RandParams& p, const std::vector<RandEdgeLabel>& faults, RandTrace* trace = nullptr)
        : p_(p), codec_(p)
    {
        if (faults.size() > p.f) throw Error(ErrorKind::too_many_faults, "more failed edges than f");
        split_tree(faults);
        std::size_t k = pieces_.size();
        // sketches of every piece in G - F
        sk0_.assign(k, BitVec(p.L0));
        auto& sk0 = sk0_;
        std::vector<SketchMatrix> sk(p.is_short() ? k : 0, SketchMatrix(std::size_t(p.B) * p.J));
        for (std::size_t i = 0; i < cuts_.size(); ++i) {
            const RandEdgeLabel& e = *cuts_[i].label;
            for (std::size_t target : {cut_piece(i), parent_piece(i)}) {
                sk0[target] ^= e.sk0;
                if (p.is_short())
                    for (std::size_t x = 0; x < e.sk.size(); ++x) sk[target][x] ^= e.sk[x];
            }
        }
        for (const RandEdgeLabel& e : faults) {
            if (e.tree) continue;
            std::size_t pa = piece_of(e.a), pb = piece_of(e.b);
            if (pa == pb || pa == SIZE_MAX) continue;
            SketchMatrix es;
            if (p.is_short()) {
                es.assign(std::size_t(p.B) * p.J, UidCell{});
                UidCell u = codec_.uid(codec_.name(e.a, e.b));
                for (unsigned r = 0; r < p.B; ++r) es[std::size_t(r) * p.J + e.ranks[r] - 1] ^= u;
            }
            for (std::size_t target : {pa, pb}) {
                sk0[target] ^= e.sk0;
                if (p.is_short())
                    for (std::size_t x = 0; x < es.size(); ++x) sk[target][x] ^= es[x];
            }
        }
        for (const RandEdgeLabel& e : faults)
            if (!e.tree) failed_names_.insert(codec_.name(e.a, e.b));

        DisjointSets parts(k);
        if (trace) {
            for (const Piece& pc : pieces_) trace->piece_anchor.push_back(pc.lo);
            trace->part_of.push_back(snapshot(parts));
        }
        if (p.is_short()) boruvka(parts, sk, trace);

        // Gaussian elimination on sk0 over the current parts
        std::vector<std::size_t> reps;
        std::map<std::size_t, std::size_t> rep_index;
        for (std::size_t i = 0; i < k; ++i)
            if (parts.find(i) == i) {
                rep_index[i] = reps.size();
                reps.push_back(i);
            }
        std::vector<BitVec> cols(reps.size(), BitVec(p.L0));
        for (std::size_t i = 0; i < k; ++i) cols[rep_index[parts.find(i)]] ^= sk0[i];
        // elimination per G-component keeps unrelated components apart
        std::map<std::uint32_t, std::vector<std::size_t>> by_root;
        for (std::size_t x = 0; x < reps.size(); ++x) by_root[pieces_[reps[x]].root].push_back(x);
        group_.assign(k, 0);
        std::size_t next = 0;
        std::vector<std::size_t> rep_group(reps.size());
        for (const auto& [root, idx] : by_root) {
            std::vector<BitVec> sub;
            for (auto x : idx) sub.push_back(cols[x]);
            std::vector<std::size_t> gid = kernel_groups(sub);
            std::size_t most = 0;
            for (std::size_t y = 0; y < idx.size(); ++y) {
                rep_group[idx[y]] = next + gid[y];
                most = std::max(most, gid[y] + 1);
            }
            next += most;
        }
        for (std::size_t i = 0; i < k; ++i) group_[i] = rep_group[rep_index[parts.find(i)]];
        groups_ = next;
        touched_roots_ = by_root.size();
    }

    bool connected(std::uint32_t s, std::uint32_t t) const
    {
        std::size_t ps = piece_of(s), pt = piece_of(t);
        if (ps == SIZE_MAX || pt == SIZE_MAX) return ps == pt && root_of(s) == root_of(t);
        return group_[ps] == group_[pt];
    }

    std::size_t component_count() const { return p_.roots.size() - touched_roots_ + groups_; }

    /// Trees of T* - F inside touched components, with their sk0 in G - F.
    std::size_t piece_count() const { return pieces_.size(); }
    std::uint32_t piece_anchor(std::size_t i) const { return pieces_[i].lo; }
    const BitVec& piece_sk0(std::size_t i) const { return sk0_[i]; }

private:
    struct Piece {
        std::uint32_t lo, hi; // DFS range the piece is carved from
        std::uint32_t root;   // component root
    };
    struct Cut {
        const RandEdgeLabel* label;
        std::size_t piece;  // piece rooted at the child
        std::size_t parent; // piece containing the parent
    };

    std::uint32_t root_of(std::uint32_t d) const
    {
        auto it = std::upper_bound(p_.roots.begin(), p_.roots.end(), d);
        if (it == p_.roots.begin()) throw Error(ErrorKind::corrupt, "vertex precedes every root");
        return *(it - 1);
    }

    void split_tree(const std::vector<RandEdgeLabel>& faults)
    {
        std::vector<const RandEdgeLabel*> tree;
        for (const auto& e : faults)
            if (e.tree) tree.push_back(&e);
        std::sort(tree.begin(), tree.end(), [](auto* x, auto* y) { return x->a != y->a ? x->a < y->a : x->b > y->b; });
        for (std::size_t i = 1; i < tree.size(); ++i)
            if (tree[i]->a == tree[i - 1]->a) throw Error(ErrorKind::invalid, "duplicate failed edge");
        std::map<std::uint32_t, std::size_t> root_piece;
        for (const RandEdgeLabel* e : tree) {
            std::uint32_t r = root_of(e->a);
            if (r == e->a) throw Error(ErrorKind::corrupt, "tree edge label above a root");
            if (!root_piece.count(r)) {
                root_piece[r] = pieces_.size();
                pieces_.push_back({r, UINT32_MAX, r});
            }
        }
        // ranges are laminar; in preorder, the enclosing ranges form a stack
        std::vector<std::size_t> stack;
        for (const RandEdgeLabel* e : tree) {
            while (!stack.empty() && pieces_[stack.back()].hi < e->a) stack.pop_back();
            std::uint32_t r = root_of(e->a);
            if (!stack.empty() && pieces_[stack.back()].hi < e->b) throw Error(ErrorKind::corrupt, "overlapping subtrees");
            std::size_t parent = stack.empty() || pieces_[stack.back()].root != r ? root_piece[r] : stack.back();
            std::size_t id = pieces_.size();
            pieces_.push_back({e->a, e->b, r});
            cuts_.push_back({e, id, parent});
            stack.push_back(id);
            ranges_.push_back({e->a, id});
        }
    }

    std::size_t cut_piece(std::size_t i) const { return cuts_[i].piece; }
    std::size_t parent_piece(std::size_t i) const { return cuts_[i].parent; }

    /// Innermost failed subtree containing d, else the root piece of d's component (if touched).
    std::size_t piece_of(std::uint32_t d) const
    {
        std::size_t best = SIZE_MAX;
        for (const auto& [lo, id] : ranges_) {
            if (lo > d) break;
            if (pieces_[id].hi >= d) best = id;
        }
        if (best != SIZE_MAX) return best;
        std::uint32_t r = root_of(d);
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            if (pieces_[i].hi == UINT32_MAX && pieces_[i].root == r) return i;
        return SIZE_MAX;
    }

    std::vector<std::size_t> snapshot(DisjointSets& parts) const
    {
        std::vector<std::size_t> out(pieces_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = parts.find(i);
        return out;
    }

    void boruvka(DisjointSets& parts, const std::vector<SketchMatrix>& sk, RandTrace* trace)
    {
        std::size_t k = pieces_.size();
        for (unsigned step = 0; step < p_.B; ++step) {
            std::map<std::size_t, SketchMatrix> agg;
            for (std::size_t i = 0; i < k; ++i) {
                auto& a = agg[parts.find(i)];
                if (a.empty()) a.assign(std::size_t(p_.B) * p_.J, UidCell{});
                for (unsigned j = 0; j < p_.J; ++j) a[std::size_t(step) * p_.J + j] ^= sk[i][std::size_t(step) * p_.J + j];
            }
            std::vector<std::pair<std::size_t, std::size_t>> merges;
            for (const auto& [rep, m] : agg) {
                for (unsigned j = 0; j < p_.J; ++j) {
                    auto u = codec_.singleton(m[std::size_t(step) * p_.J + j]);
                    if (!u) continue;
                    auto [x, y] = codec_.endpoints(u->x);
                    if (x >= p_.n || y >= p_.n || x >= y || failed_names_.count(u->x)) continue;
                    std::size_t px = piece_of(x), py = piece_of(y);
                    if (px == SIZE_MAX || py == SIZE_MAX) continue;
                    std::size_t rx = parts.find(px), ry = parts.find(py);
                    if (rx == ry || (rx != rep && ry != rep)) continue; // self-edge, or not on this cut
                    merges.push_back({rx, ry});
                    break;
                }
            }
            for (auto [x, y] : merges) parts.unite(x, y);
            if (trace) {
                trace->part_of.push_back(snapshot(parts));
                trace->edges_found.push_back(merges.size());
            }
        }
    }

    RandParams p_;
    UidCodec codec_;
    std::vector<Piece> pieces_;
    std::vector<Cut> cuts_;
    std::vector<std::pair<std::uint32_t, std::size_t>> ranges_; // (lo, piece) in preorder
    std::set<std::uint64_t> failed_names_;
    std::vector<BitVec> sk0_;
    std::vector<std::size_t> group_;
    std::size_t groups_ = 0, touched_roots_ = 0;
};

} // namespace ftconn
