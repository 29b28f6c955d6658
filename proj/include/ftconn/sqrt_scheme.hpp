#pragma once

#include <array>
#include <map>
#include <optional>

#include "code_shares.hpp"
#include "det_common.hpp"
#include "expander_hierarchy.hpp"

namespace ftconn {

/// Ball radius r = ceil(sqrt(f/phi)) and top dyadic level jmax = ceil(log2(f/phi)).
inline std::uint32_t sqrt_radius(std::uint32_t f, Rational phi)
{
    std::uint32_t r = 0;
    while (std::uint64_t(r) * r * phi.num < std::uint64_t(f) * phi.den) ++r;
    return r;
}

inline std::uint32_t sqrt_jmax(std::uint32_t f, Rational phi)
{
    std::uint32_t j = 0;
    while ((std::uint64_t{1} << j) * phi.num < std::uint64_t(f) * phi.den) ++j;
    return j;
}

struct SqrtParams {
    DetParams base;
    unsigned idx_bits = 1; // share indices and list counts

    std::uint32_t r() const { return sqrt_radius(base.f, base.phi); }
    std::uint32_t jmax() const { return sqrt_jmax(base.f, base.phi); }

    LabelFile file() const
    {
        LabelFile lf = base.file(SchemeId::sqrt);
        BitWriter w;
        base.write(w);
        w.put(idx_bits, 6);
        lf.extra = Payload(std::move(w));
        return lf;
    }

    static SqrtParams from_file(const LabelFile& lf)
    {
        if (lf.scheme != SchemeId::sqrt) throw Error(ErrorKind::incompatible, "not a sqrt-scheme label file");
        BitReader r = lf.extra.reader();
        SqrtParams p;
        p.base = DetParams::read(r, lf);
        p.idx_bits = unsigned(r.get(6));
        if (!r.at_end() || p.idx_bits == 0) throw Error(ErrorKind::corrupt, "bad sqrt-scheme parameters");
        return p;
    }
};

/// One edge of E_l(I_j): exactly one endpoint inside the block.
struct BoundaryEdge {
    EdgeId edge;
    Vertex inside, outside;
    std::uint32_t inside_dfs, outside_dfs;
    std::uint32_t outside_slot;
};

struct LgeSet {
    DyadicBlock block{0, 0};
    std::vector<BoundaryEdge> boundary; // by outside DFS, ties by edge id
    std::vector<char> large;
    std::size_t lge = 0;

    std::vector<BoundaryEdge> edges() const
    {
        std::vector<BoundaryEdge> out;
        for (std::size_t q = 0; q < boundary.size(); ++q)
            if (large[q]) out.push_back(boundary[q]);
        return out;
    }
};

/// Large-gap flags for outside endpoints given by slot, already in order.
inline std::vector<char> large_gap_flags(const std::vector<std::uint32_t>& slots, std::uint32_t r)
{
    std::size_t k = slots.size();
    std::vector<char> out(k, 0);
    if (k == 0) return out;
    out.front() = out.back() = 1;
    for (std::size_t q = 0; q + 1 < k; ++q) {
        std::uint32_t a = slots[q], b = slots[q + 1];
        std::uint32_t dist = a == b ? 0 : b - a - 1;
        if (dist > r) out[q] = out[q + 1] = 1;
    }
    return out;
}

inline LgeSet make_lge(DyadicBlock block, std::vector<BoundaryEdge> boundary, std::uint32_t r)
{
    LgeSet s;
    s.block = block;
    std::sort(boundary.begin(), boundary.end(), [](const BoundaryEdge& a, const BoundaryEdge& b) {
        return a.outside_dfs != b.outside_dfs ? a.outside_dfs < b.outside_dfs : a.edge < b.edge;
    });
    std::vector<std::uint32_t> slots;
    for (const auto& e : boundary) slots.push_back(e.outside_slot);
    s.large = large_gap_flags(slots, r);
    s.boundary = std::move(boundary);
    s.lge = std::size_t(std::count(s.large.begin(), s.large.end(), 1));
    return s;
}

/// Slot of every weighted vertex of one level tree.
inline std::vector<Vertex> slot_vertices(const EulerFrame& fr, const WeightedTour& wt)
{
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < wt.size(); ++i)
        if (wt.weight(i)) out.push_back(fr.tour[wt.tree().positions[i]].v);
    return out;
}

inline LgeSet compute_lge(const Graph& g, const EulerFrame& fr, const WeightedTour& wt, DyadicBlock block, std::uint32_t r)
{
    std::vector<Vertex> at = slot_vertices(fr, wt);
    std::map<Vertex, std::uint32_t> slot;
    for (std::uint32_t s = 0; s < at.size(); ++s) slot[at[s]] = s;
    std::vector<BoundaryEdge> boundary;
    for (std::uint64_t s = block.begin(); s < std::min<std::uint64_t>(block.end(), at.size()); ++s) {
        Vertex x = at[s];
        for (const Incidence& inc : g.adj(x)) {
            if (fr.is_tree[inc.edge] || fr.level[inc.edge] != wt.level()) continue;
            std::uint32_t ys = slot.at(inc.to);
            if (ys >= block.begin() && ys < block.end()) continue;
            boundary.push_back({inc.edge, x, inc.to, fr.dfs[x], fr.dfs[inc.to], ys});
        }
    }
    return make_lge(block, std::move(boundary), r);
}

/// Shares of the LGE message, aligned with s.boundary (empty for edges that are not large-gap).
inline std::vector<std::optional<CodeShare>> distribute_shares(const LgeSet& s)
{
    std::vector<Fq> msg;
    for (const auto& e : s.edges()) msg.push_back(pack_edge_symbol(e.inside_dfs, e.outside_dfs));
    std::vector<CodeShare> shares = encode(msg, 2);
    std::vector<std::optional<CodeShare>> out(s.boundary.size());
    std::size_t k = 0;
    for (std::size_t q = 0; q < s.boundary.size(); ++q)
        if (s.large[q]) out[q] = shares[k++];
    return out;
}

/// A level-l non-tree edge listed in item 2, with its share bundle.
struct RevealedEdge {
    std::uint32_t a = 0, b = 0;           // DFS of the endpoints
    std::uint32_t slot_a = 0, slot_b = 0; // at this level
    std::vector<std::optional<CodeShare>> share_a, share_b; // per j; share_a is for the block holding a
};

struct SqrtBlockInfo {
    bool present = false;
    std::uint32_t lge = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // (inside, outside) when lge <= 4r
};

struct SqrtLevel {
    std::uint32_t tree = 0;
    std::vector<RevealedEdge> revealed;
    // tree edges only
    std::array<std::array<std::uint32_t, 4>, 3> segments{}; // X, Y, Z: first, last, min vertex, max vertex
    std::uint32_t wx = 0, wy = 0, wz = 0;
    std::vector<std::array<SqrtBlockInfo, 4>> blocks; // per j: left/right of the down copy, left/right of the up copy
};

struct SqrtEdgeLabel {
    bool tree = false;
    std::uint32_t u = 0, v = 0; // tree: parent, child
    std::uint32_t level = 0;
    std::vector<SqrtLevel> levels; // levels[l - level]

    const SqrtLevel& at(std::uint32_t l) const { return levels[l - level]; }

    FailedTreeEdge failed() const
    {
        FailedTreeEdge e;
        e.parent = u;
        e.child = v;
        e.level = level;
        e.down = v - 1;
        e.up = levels.back().segments[1][1] + 1;
        for (const auto& lv : levels) e.tree.push_back(lv.tree);
        return e;
    }
};

class SqrtLabeler {
public:
    SqrtLabeler(const Graph& g, const EdgeLevelAssignment& a, const EulerFrame& fr, std::uint32_t f) : g_(&g), fr_(&fr)
    {
        if (g.max_degree() > 3) throw Error(ErrorKind::invalid, "sqrt scheme needs maximum degree 3");
        params_.base = DetParams::from_frame(g, a, fr, f);
        if (fr.tour.size() >= (std::size_t{1} << 30)) throw Error(ErrorKind::invalid, "graph too large for edge symbols");
        params_.idx_bits = std::max(1u, bits_for(g.m()));
        r_ = params_.r();
        jmax_ = params_.jmax();
        std::size_t h = fr.h;
        tours_.resize(h + 1);
        slot_of_.assign(h + 1, {});
        at_.resize(h + 1);
        blocks_.resize(h + 1);
        shares_.assign(g.m(), {});
        for (std::uint32_t l = 1; l <= h; ++l) {
            slot_of_[l].assign(g.n(), UINT32_MAX);
            std::size_t nt = fr.trees[l].size();
            at_[l].resize(nt);
            blocks_[l].resize(nt);
            for (std::uint32_t t = 0; t < nt; ++t) {
                tours_[l].emplace_back(g, fr, l, t, jmax_);
                at_[l][t] = slot_vertices(fr, tours_[l][t]);
                for (std::uint32_t s = 0; s < at_[l][t].size(); ++s) slot_of_[l][at_[l][t][s]] = s;
            }
            std::vector<std::vector<EdgeId>> by_tree(nt);
            for (EdgeId e = 0; e < g.m(); ++e)
                if (!fr.is_tree[e] && fr.level[e] == l) by_tree[fr.tree_of[l][g.edge(e).u]].push_back(e);
            for (std::uint32_t t = 0; t < nt; ++t) index_blocks(l, t, by_tree[t]);
        }
    }

    const SqrtParams& params() const { return params_; }

    Payload vertex_label(Vertex v) const { return det_vertex_label(params_.base, *fr_, v); }

    Payload edge_label(EdgeId e) const
    {
        const EulerFrame& fr = *fr_;
        const DetParams& p = params_.base;
        BitWriter w;
        Edge ed = g_->edge(e);
        bool tree = fr.is_tree[e];
        w.put(tree, 1);
        Vertex a = tree ? fr.parent[e] : ed.u, b = tree ? fr.child[e] : ed.v;
        w.put(fr.dfs[a], p.pos_bits());
        w.put(fr.dfs[b], p.pos_bits());
        w.put(fr.level[e], p.level_bits());
        for (std::uint32_t l = fr.level[e]; l <= fr.h; ++l) {
            std::uint32_t t = fr.tree_of[l][b];
            const WeightedTour& wt = tours_[l][t];
            const LevelTree& lt = fr.trees[l][t];
            w.put(lt.positions.front(), p.pos_bits());
            std::size_t i1, i2;
            if (tree) {
                i1 = tour_index(lt, fr.down_pos[e]);
                i2 = tour_index(lt, fr.up_pos[e]);
            } else {
                i1 = tour_index(lt, fr.dfs[a]);
                i2 = tour_index(lt, fr.dfs[b]);
            }
            put_revealed(w, l, t, wt.ball_slots(i1, r_), wt.ball_slots(i2, r_));
            if (!tree) continue;
            put_segment(w, lt, 0, i1);
            put_segment(w, lt, i1 + 1, i2);
            put_segment(w, lt, i2 + 1, lt.positions.size());
            std::uint32_t gx = wt.gap(i1), gxy = wt.gap(i2);
            w.put(gx, p.pos_bits());
            w.put(gxy - gx, p.pos_bits());
            w.put(wt.total() - gxy, p.pos_bits());
            for (std::uint32_t j = 0; j <= jmax_; ++j) {
                put_block(w, l, t, nearest_left(gx, j));
                put_block(w, l, t, nearest_right(gx, j));
                put_block(w, l, t, nearest_left(gxy, j));
                put_block(w, l, t, nearest_right(gxy, j));
            }
        }
        return Payload(std::move(w));
    }

    LabelFile build() const
    {
        LabelFile lf = params_.file();
        for (Vertex v = 0; v < g_->n(); ++v) lf.vertex.push_back(vertex_label(v));
        for (EdgeId e = 0; e < g_->m(); ++e) lf.edge.push_back(edge_label(e));
        return lf;
    }

    /// Slot of v in its level-l tree, or UINT32_MAX when v has no level-l non-tree edge.
    std::uint32_t slot(std::uint32_t l, Vertex v) const { return slot_of_[l][v]; }
    const WeightedTour& tour(std::uint32_t l, std::uint32_t t) const { return tours_[l][t]; }

private:
    struct BlockData {
        std::uint32_t lge = 0;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    };

    void index_blocks(std::uint32_t l, std::uint32_t t, const std::vector<EdgeId>& edges)
    {
        const EulerFrame& fr = *fr_;
        std::uint32_t total = tours_[l][t].total();
        blocks_[l][t].resize(jmax_ + 1);
        for (std::uint32_t j = 0; j <= jmax_; ++j) {
            std::size_t nb = (std::size_t(total) + (std::size_t{1} << j) - 1) >> j;
            std::vector<std::vector<BoundaryEdge>> bound(nb);
            for (EdgeId e : edges) {
                Vertex x = g_->edge(e).u, y = g_->edge(e).v;
                std::uint32_t sx = slot_of_[l][x], sy = slot_of_[l][y];
                if ((sx >> j) == (sy >> j)) continue;
                bound[sx >> j].push_back({e, x, y, fr.dfs[x], fr.dfs[y], sy});
                bound[sy >> j].push_back({e, y, x, fr.dfs[y], fr.dfs[x], sx});
            }
            auto& out = blocks_[l][t][j];
            out.resize(nb);
            for (std::size_t k = 0; k < nb; ++k) {
                LgeSet s = make_lge({j, k}, std::move(bound[k]), r_);
                out[k].lge = std::uint32_t(s.lge);
                if (s.lge <= 4 * std::uint64_t(r_))
                    for (const auto& be : s.edges()) out[k].edges.push_back({be.inside_dfs, be.outside_dfs});
                auto sh = distribute_shares(s);
                for (std::size_t q = 0; q < s.boundary.size(); ++q) {
                    if (!sh[q]) continue;
                    const BoundaryEdge& be = s.boundary[q];
                    auto& bundle = shares_[be.edge];
                    if (bundle.empty()) bundle.resize(2 * (jmax_ + 1));
                    bundle[2 * j + (be.inside == g_->edge(be.edge).u ? 0 : 1)] = sh[q];
                }
            }
        }
    }

    void put_revealed(BitWriter& w, std::uint32_t l, std::uint32_t t, std::pair<std::uint32_t, std::uint32_t> r1,
                      std::pair<std::uint32_t, std::uint32_t> r2) const
    {
        const EulerFrame& fr = *fr_;
        const DetParams& p = params_.base;
        std::vector<EdgeId> ids;
        for (auto [lo, hi] : {r1, r2})
            for (std::uint32_t s = lo; s < hi; ++s)
                for (const Incidence& inc : g_->adj(at_[l][t][s]))
                    if (!fr.is_tree[inc.edge] && fr.level[inc.edge] == l) ids.push_back(inc.edge);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        w.put(ids.size(), params_.idx_bits);
        for (EdgeId e : ids) {
            Edge ed = g_->edge(e);
            w.put(fr.dfs[ed.u], p.pos_bits());
            w.put(fr.dfs[ed.v], p.pos_bits());
            w.put(slot_of_[l][ed.u], p.pos_bits());
            w.put(slot_of_[l][ed.v], p.pos_bits());
            const auto& bundle = shares_[e];
            for (std::size_t k = 0; k < 2 * (jmax_ + 1); ++k) {
                bool has = !bundle.empty() && bundle[k];
                w.put_bit(has);
                if (has) put_share(w, *bundle[k], params_.idx_bits);
            }
        }
    }

    void put_segment(BitWriter& w, const LevelTree& lt, std::size_t a, std::size_t b) const
    {
        const EulerFrame& fr = *fr_;
        const DetParams& p = params_.base;
        std::uint32_t s = p.sentinel(), first = s, last = s, lo = s, hi = s;
        if (a < b) {
            first = lt.positions[a];
            last = lt.positions[b - 1];
            for (std::size_t i = a; i < b && lo == s; ++i)
                if (fr.tour[lt.positions[i]].kind == ElemKind::vertex) lo = lt.positions[i];
            for (std::size_t i = b; i-- > a && hi == s;)
                if (fr.tour[lt.positions[i]].kind == ElemKind::vertex) hi = lt.positions[i];
        }
        for (auto x : {first, last, lo, hi}) w.put(x, p.pos_bits());
    }

    void put_block(BitWriter& w, std::uint32_t l, std::uint32_t t, std::optional<DyadicBlock> b) const
    {
        const DetParams& p = params_.base;
        const auto& level_blocks = blocks_[l][t][b ? b->j : 0];
        if (!b || b->index >= level_blocks.size()) {
            w.put_bit(0);
            return;
        }
        const BlockData& d = level_blocks[b->index];
        w.put_bit(1);
        w.put(d.lge, params_.idx_bits);
        if (d.lge <= 4 * std::uint64_t(r_))
            for (auto [in, out] : d.edges) {
                w.put(in, p.pos_bits());
                w.put(out, p.pos_bits());
            }
    }

    const Graph* g_;
    const EulerFrame* fr_;
    SqrtParams params_;
    std::uint32_t r_ = 0, jmax_ = 0;
    std::vector<std::vector<WeightedTour>> tours_;                      // [l][tree]
    std::vector<std::vector<std::uint32_t>> slot_of_;                   // [l][vertex]
    std::vector<std::vector<std::vector<Vertex>>> at_;                  // [l][tree][slot]
    std::vector<std::vector<std::vector<std::vector<BlockData>>>> blocks_; // [l][tree][j][index]
    std::vector<std::vector<std::optional<CodeShare>>> shares_;         // [edge][2j + side], at the edge's own level
};

inline LabelFile build_sqrt_labels(const Graph& g3, const EdgeLevelAssignment& a, const EulerFrame& fr, std::uint32_t f)
{
    return SqrtLabeler(g3, a, fr, f).build();
}

/// Labels for an arbitrary graph: reduce to degree 3, label the reduced graph, and index by original ids.
inline LabelFile build_sqrt_labels_any(const Graph& g, std::uint32_t f, HierarchyMode mode, std::uint64_t seed = 0x5eed)
{
    Degree3Reduction red = reduce_degree3(g);
    EdgeLevelAssignment a = build_edge_hierarchy(red.reduced, mode, seed);
    EulerFrame fr = build_frame(red.reduced, a);
    SqrtLabeler lab(red.reduced, a, fr, f);
    LabelFile lf = lab.params().file();
    lf.n = std::uint32_t(g.n());
    lf.m = std::uint32_t(g.m());
    for (Vertex v = 0; v < g.n(); ++v) lf.vertex.push_back(lab.vertex_label(red.vertex_map[v]));
    for (EdgeId e = 0; e < g.m(); ++e) lf.edge.push_back(lab.edge_label(red.edge_map[e]));
    return lf;
}

inline SqrtEdgeLabel decode_sqrt_edge(const SqrtParams& sp, const Payload& label)
{
    const DetParams& p = sp.base;
    SqrtEdgeLabel out;
    BitReader r = label.reader();
    unsigned pb = p.pos_bits();
    auto pos = [&] {
        auto x = std::uint32_t(r.get(pb));
        if (x > p.tour_len) throw Error(ErrorKind::corrupt, "position out of range");
        return x;
    };
    std::uint32_t r4 = 4 * sp.r(), jmax = sp.jmax();
    out.tree = r.get_bit();
    out.u = pos();
    out.v = pos();
    out.level = std::uint32_t(r.get(p.level_bits()));
    if (out.level < 1 || out.level > p.h || (out.tree && out.v == 0)) throw Error(ErrorKind::corrupt, "bad edge label");
    for (std::uint32_t l = out.level; l <= p.h; ++l) {
        SqrtLevel lv;
        lv.tree = pos();
        std::uint64_t count = r.get(sp.idx_bits);
        for (std::uint64_t k = 0; k < count; ++k) {
            RevealedEdge e;
            e.a = pos();
            e.b = pos();
            e.slot_a = pos();
            e.slot_b = pos();
            for (std::uint32_t j = 0; j <= jmax; ++j)
                for (auto* side : {&e.share_a, &e.share_b}) {
                    side->resize(jmax + 1);
                    if (r.get_bit()) (*side)[j] = get_share(r, sp.idx_bits);
                }
            lv.revealed.push_back(std::move(e));
        }
        if (out.tree) {
            for (auto& seg : lv.segments)
                for (auto& x : seg) x = pos();
            if (lv.segments[0][0] == p.sentinel() || lv.segments[1][0] == p.sentinel())
                throw Error(ErrorKind::corrupt, "tree edge label with empty X or Y");
            lv.wx = pos();
            lv.wy = pos();
            lv.wz = pos();
            lv.blocks.resize(jmax + 1);
            for (auto& four : lv.blocks)
                for (SqrtBlockInfo& b : four) {
                    b.present = r.get_bit();
                    if (!b.present) continue;
                    b.lge = std::uint32_t(r.get(sp.idx_bits));
                    if (b.lge <= r4)
                        for (std::uint32_t k = 0; k < b.lge; ++k) {
                            std::uint32_t in = pos(), o = pos();
                            b.edges.push_back({in, o});
                        }
                }
        }
        out.levels.push_back(std::move(lv));
    }
    if (!r.at_end()) throw Error(ErrorKind::corrupt, "trailing bits in edge label");
    return out;
}

struct SqrtQueryStats {
    std::size_t case1 = 0, case2 = 0, case3 = 0;
    std::size_t big_by_weight = 0; // intervals heavier than f/phi
    std::size_t big_parts = 0;
    std::size_t r3_unions = 0, lge_unions = 0;
};

/// What the query did with one dyadic block; filled only when a trace is requested.
struct SqrtBlockTrace {
    std::uint32_t level = 0, tree = 0;
    std::size_t interval = 0;
    std::uint32_t anchor = 0; // a vertex of the interval's component in T - F
    DyadicBlock block{0, 0};
    int kase = 0;
    std::uint32_t lge = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // LGE used, cases 1 and 2
};

struct SqrtTrace {
    std::vector<SqrtBlockTrace> blocks;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::pair<std::uint32_t, std::uint32_t>>>
        revealed; // (level, tree) -> endpoint pairs of every revealed edge
};

class SqrtQuery {
public:
    SqrtQuery(const SqrtParams& p, const std::vector<SqrtEdgeLabel>& faults, const LevelObserver& observer = {},
              SqrtTrace* trace = nullptr)
        : params_(p), r_(p.r()), jmax_(p.jmax()), faults_(&faults), trace_(trace), state_(tree_faults(faults), p.base.h)
    {
        for (const auto& e : faults)
            if (!e.tree) ++failed_nontree_[dfs_pair(e.u, e.v)];
        for (std::uint32_t l = 1; l <= p.base.h; ++l) {
            state_.begin_level(l);
            for (TreePartition& t : state_.trees()) apply_level(t, l);
            if (observer) observer(l, state_);
        }
    }

    bool connected(std::uint32_t s, std::uint32_t t) const { return ComponentAnswer(state_, params_.base.roots).connected(s, t); }
    std::size_t component_count() const { return ComponentAnswer(state_, params_.base.roots).count(); }
    const SqrtQueryStats& stats() const { return stats_; }

private:
    using Pair = std::pair<std::uint32_t, std::uint32_t>;

    std::vector<FailedTreeEdge> tree_faults(const std::vector<SqrtEdgeLabel>& faults)
    {
        if (faults.size() > params_.base.f) throw Error(ErrorKind::too_many_faults, "more failed edges than f");
        std::vector<FailedTreeEdge> out;
        for (const auto& e : faults)
            if (e.tree) {
                out.push_back(e.failed());
                tree_labels_.push_back(&e);
            }
        return out;
    }

    bool exceeds(std::uint64_t x) const { return exceeds_f_over_phi(x, params_.base.f, params_.base.phi); }

    /// Unites along a list of edges, skipping those F may have removed (every parallel copy failed).
    template <class List, class Get>
    void unite_list(TreePartition& t, const List& list, Get get, std::size_t& counter)
    {
        std::map<Pair, std::size_t> mult;
        if (!failed_nontree_.empty())
            for (const auto& x : list) ++mult[dfs_pair(get(x).first, get(x).second)];
        for (const auto& x : list) {
            Pair e = get(x);
            if (!failed_nontree_.empty()) {
                auto it = failed_nontree_.find(dfs_pair(e.first, e.second));
                if (it != failed_nontree_.end() && mult[dfs_pair(e.first, e.second)] <= it->second) continue;
            }
            counter += t.unite_vertices(e.first, e.second);
        }
    }

    void apply_level(TreePartition& t, std::uint32_t l)
    {
        const auto& cuts = t.cuts();
        const SqrtLevel& any = tree_labels_[cuts.front().fault]->at(l);
        std::uint64_t total = std::uint64_t(any.wx) + any.wy + any.wz;
        auto gap = [&](const TreeCut& c) -> std::uint64_t {
            const SqrtLevel& lv = tree_labels_[c.fault]->at(l);
            return c.down ? lv.wx : std::uint64_t(lv.wx) + lv.wy;
        };

        // R3 over every revealed list, and the shares they carry
        std::map<std::pair<std::uint32_t, std::uint64_t>, std::map<std::uint32_t, Fq2>> shares;
        for (const SqrtEdgeLabel& e : *faults_) {
            if (e.level > l || e.at(l).tree != t.id()) continue;
            const auto& list = e.at(l).revealed;
            unite_list(t, list, [](const RevealedEdge& x) { return Pair{x.a, x.b}; }, stats_.r3_unions);
            for (const RevealedEdge& x : list) {
                if (trace_) trace_->revealed[{l, t.id()}].push_back({x.a, x.b});
                for (std::uint32_t j = 0; j <= jmax_; ++j) {
                    if (x.share_a[j]) add_share(shares[{j, x.slot_a >> j}], *x.share_a[j]);
                    if (x.share_b[j]) add_share(shares[{j, x.slot_b >> j}], *x.share_b[j]);
                }
            }
        }

        std::size_t k = t.intervals();
        std::vector<std::uint64_t> weight(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::uint64_t a = i == 0 ? 0 : gap(cuts[i - 1]);
            std::uint64_t b = i + 1 < k ? gap(cuts[i]) : total;
            if (a > b) throw Error(ErrorKind::corrupt, "cut weights out of order");
            weight[i] = b - a;
            if (exceeds(b - a)) {
                t.big()[i] = 1;
                ++stats_.big_by_weight;
                continue;
            }
            std::vector<DyadicBlock> cover = i + 1 < k ? dyadic_cover(a, b, jmax_) : ascending_cover(a, total);
            for (const DyadicBlock& blk : cover) {
                const SqrtBlockInfo& info = stored_block(t, l, i, a, b, blk);
                if (!info.present || info.lge == 0) continue;
                SqrtBlockTrace tr{l, t.id(), i, t.anchor(i), blk, 1, info.lge, {}};
                const std::vector<Pair>* list = &info.edges;
                std::vector<Pair> decoded;
                if (info.lge > 4 * std::uint64_t(r_)) {
                    auto it = shares.find({blk.j, blk.index});
                    std::size_t have = it == shares.end() ? 0 : it->second.size();
                    if (2 * have >= info.lge) {
                        decoded = decode_lge(it->second, info.lge);
                        list = &decoded;
                        tr.kase = 2;
                    } else {
                        tr.kase = 3;
                    }
                }
                if (tr.kase == 1) ++stats_.case1;
                if (tr.kase == 2) ++stats_.case2;
                if (tr.kase == 3) {
                    ++stats_.case3;
                    t.big()[i] = 1;
                } else {
                    unite_list(t, *list, [](const Pair& x) { return x; }, stats_.lge_unions);
                    if (trace_) tr.edges = *list;
                }
                if (trace_) trace_->blocks.push_back(std::move(tr));
                if (t.big()[i]) break;
            }
        }

        // R4': parts shown to lie in a component with volume above f/phi
        std::vector<std::uint64_t> sum(k, 0);
        std::vector<char> part_big(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t r = t.find(i);
            sum[r] += weight[i];
            if (t.big()[i]) part_big[r] = 1;
        }
        for (std::size_t r = 0; r < k; ++r)
            if (t.find(r) == r && exceeds(sum[r])) part_big[r] = 1;
        for (std::size_t i = 0; i < k; ++i) t.big()[i] = part_big[t.find(i)];
        for (std::size_t r = 0; r < k; ++r) stats_.big_parts += t.find(r) == r && part_big[r];
        PartitionState::unite_big(t);
    }

    static void add_share(std::map<std::uint32_t, Fq2>& into, const CodeShare& s)
    {
        auto [it, fresh] = into.emplace(s.index, s.value);
        if (!fresh && !(it->second == s.value)) throw Error(ErrorKind::corrupt, "conflicting code shares");
    }

    /// Blocks nearest to a from the right, growing, until [a, limit) is covered.
    std::vector<DyadicBlock> ascending_cover(std::uint64_t a, std::uint64_t limit) const
    {
        std::vector<DyadicBlock> out;
        std::uint64_t p = a;
        for (std::uint32_t j = 0; j < jmax_ && p < limit; ++j)
            if ((p >> j) & 1) {
                out.push_back({j, p >> j});
                p += std::uint64_t{1} << j;
            }
        if (p < limit) out.push_back({jmax_, p >> jmax_});
        return out;
    }

    const SqrtBlockInfo& stored_block(const TreePartition& t, std::uint32_t l, std::size_t i, std::uint64_t a,
                                      std::uint64_t b, const DyadicBlock& blk) const
    {
        const TreeCut* left = t.left_cut(i);
        const TreeCut* right = t.right_cut(i);
        if (left && nearest_right(a, blk.j) == blk)
            return tree_labels_[left->fault]->at(l).blocks[blk.j][left->down ? 1 : 3];
        if (right && nearest_left(b, blk.j) == blk)
            return tree_labels_[right->fault]->at(l).blocks[blk.j][right->down ? 0 : 2];
        throw Error(ErrorKind::corrupt, "interval cover leaves the stored blocks");
    }

    static std::vector<Pair> decode_lge(const std::map<std::uint32_t, Fq2>& have, std::uint32_t lge)
    {
        std::vector<CodeShare> all;
        for (const auto& [idx, val] : have) {
            if (idx < 1 || idx > lge) throw Error(ErrorKind::corrupt, "share index out of range");
            all.push_back({idx, val});
        }
        std::vector<Fq> msg = decode(all, lge, 2);
        std::vector<CodeShare> again = encode(msg, 2);
        for (const CodeShare& s : all)
            if (!(again[s.index - 1] == s)) throw Error(ErrorKind::corrupt, "code shares do not agree");
        std::vector<Pair> out;
        for (Fq s : msg) out.push_back(unpack_edge_symbol(s));
        return out;
    }

    SqrtParams params_;
    std::uint32_t r_, jmax_;
    const std::vector<SqrtEdgeLabel>* faults_;
    SqrtTrace* trace_;
    std::vector<const SqrtEdgeLabel*> tree_labels_;
    std::map<Pair, std::size_t> failed_nontree_;
    mutable PartitionState state_;
    SqrtQueryStats stats_;
};

} // namespace ftconn
