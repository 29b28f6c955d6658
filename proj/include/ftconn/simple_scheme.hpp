#pragma once

#include <array>
#include <map>

#include "det_common.hpp"

namespace ftconn {

/// One of the tour segments X, Y, Z around a tree edge at one level.
struct SimpleSegment {
    std::uint32_t first = 0, last = 0;           // T* positions of the first / last element
    std::uint32_t min_vertex = 0, max_vertex = 0; // DFS of the first / last vertex
    bool truncated = false;                      // more than cap level-l non-tree edges exist
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // (inside DFS, outside DFS) in tour order
};

struct SimpleEdgeLabel {
    bool tree = false;
    std::uint32_t u = 0, v = 0; // non-tree: DFS of the endpoints; tree: DFS of parent and child
    std::uint32_t level = 0;
    std::vector<std::array<SimpleSegment, 3>> levels; // levels[l - level] = {X, Y, Z}

    FailedTreeEdge failed() const
    {
        FailedTreeEdge e;
        e.parent = u;
        e.child = v;
        e.level = level;
        e.down = v - 1;                          // (u,v) immediately precedes v's first occurrence
        e.up = levels.back()[1].last + 1;        // at level h, Y is everything between the two copies
        for (const auto& lv : levels) e.tree.push_back(lv[0].first); // X starts at the tree root
        return e;
    }
};

/// Builds labels one at a time, so large instances can be measured without holding every label.
class SimpleLabeler {
public:
    SimpleLabeler(const Graph& g, const EdgeLevelAssignment& a, const EulerFrame& fr, std::uint32_t f)
        : g_(&g), fr_(&fr), params_(DetParams::from_frame(g, a, fr, f)), index_(index_level_trees(g, fr))
    {
    }

    const DetParams& params() const { return params_; }

    Payload vertex_label(Vertex v) const { return det_vertex_label(params_, *fr_, v); }

    Payload edge_label(EdgeId e) const
    {
        const EulerFrame& fr = *fr_;
        const DetParams& p = params_;
        BitWriter w;
        Edge ed = g_->edge(e);
        if (!fr.is_tree[e]) {
            w.put(fr.dfs[ed.u], p.pos_bits());
            w.put(fr.dfs[ed.v], p.pos_bits());
            return Payload(std::move(w));
        }
        Vertex child = fr.child[e];
        w.put(fr.dfs[fr.parent[e]], p.pos_bits());
        w.put(fr.dfs[child], p.pos_bits());
        w.put(fr.level[e], p.level_bits());
        for (std::uint32_t l = fr.level[e]; l <= fr.h; ++l) {
            std::uint32_t t = fr.tree_of[l][child];
            const LevelTree& tree = fr.trees[l][t];
            std::size_t d = tour_index(tree, fr.down_pos[e]), u = tour_index(tree, fr.up_pos[e]);
            put_segment(w, tree, index_[l][t], 0, d);
            put_segment(w, tree, index_[l][t], d + 1, u);
            put_segment(w, tree, index_[l][t], u + 1, tree.positions.size());
        }
        return Payload(std::move(w));
    }

    LabelFile build() const
    {
        LabelFile lf = params_.file(SchemeId::simple);
        for (Vertex v = 0; v < g_->n(); ++v) lf.vertex.push_back(vertex_label(v));
        for (EdgeId e = 0; e < g_->m(); ++e) lf.edge.push_back(edge_label(e));
        return lf;
    }

private:
    void put_segment(BitWriter& w, const LevelTree& tree, const TreeTourIndex& ti, std::size_t a, std::size_t b) const
    {
        const DetParams& p = params_;
        std::uint32_t s = p.sentinel();
        if (a >= b) {
            for (int k = 0; k < 4; ++k) w.put(s, p.pos_bits());
        } else {
            w.put(tree.positions[a], p.pos_bits());
            w.put(tree.positions[b - 1], p.pos_bits());
            std::uint32_t nv = ti.next_vertex[a], pv = ti.prev_vertex[b - 1];
            w.put(nv < b ? tree.positions[nv] : s, p.pos_bits());
            w.put(pv != UINT32_MAX && pv >= a ? tree.positions[pv] : s, p.pos_bits());
        }
        auto lo = std::lower_bound(ti.inc.begin(), ti.inc.end(), a,
                                   [](const Incidence3& x, std::size_t i) { return x.index < i; });
        auto hi = std::lower_bound(lo, ti.inc.end(), b, [](const Incidence3& x, std::size_t i) { return x.index < i; });
        std::uint64_t total = std::uint64_t(hi - lo), keep = std::min(total, p.cap());
        w.put(keep, bits_for(p.cap()));
        w.put(total > keep, 1);
        for (std::uint64_t k = 0; k < keep; ++k) {
            w.put(lo[std::ptrdiff_t(k)].inside, p.pos_bits());
            w.put(lo[std::ptrdiff_t(k)].outside, p.pos_bits());
        }
    }

    const Graph* g_;
    const EulerFrame* fr_;
    DetParams params_;
    std::vector<std::vector<TreeTourIndex>> index_;
};

inline LabelFile build_simple_labels(const Graph& g, const EdgeLevelAssignment& a, const EulerFrame& fr, std::uint32_t f)
{
    return SimpleLabeler(g, a, fr, f).build();
}

inline SimpleEdgeLabel decode_simple_edge(const DetParams& p, const Payload& label)
{
    SimpleEdgeLabel out;
    BitReader r = label.reader();
    unsigned pb = p.pos_bits();
    auto pos = [&] {
        auto x = std::uint32_t(r.get(pb));
        if (x > p.tour_len) throw Error(ErrorKind::corrupt, "position out of range");
        return x;
    };
    out.u = pos();
    out.v = pos();
    if (r.at_end()) return out;
    out.tree = true;
    out.level = std::uint32_t(r.get(p.level_bits()));
    if (out.level < 1 || out.level > p.h || out.v == 0) throw Error(ErrorKind::corrupt, "bad tree edge label");
    for (std::uint32_t l = out.level; l <= p.h; ++l) {
        std::array<SimpleSegment, 3> segs;
        for (SimpleSegment& s : segs) {
            s.first = pos();
            s.last = pos();
            s.min_vertex = pos();
            s.max_vertex = pos();
            auto keep = r.get(bits_for(p.cap()));
            s.truncated = r.get_bit();
            if (keep > p.cap() || (s.truncated && keep != p.cap())) throw Error(ErrorKind::corrupt, "bad edge list");
            for (std::uint64_t k = 0; k < keep; ++k) {
                std::uint32_t a = pos(), b = pos();
                s.edges.push_back({a, b});
            }
        }
        if (segs[0].first == p.sentinel() || segs[1].first == p.sentinel())
            throw Error(ErrorKind::corrupt, "tree edge label with empty X or Y");
        out.levels.push_back(std::move(segs));
    }
    if (!r.at_end()) throw Error(ErrorKind::corrupt, "trailing bits in edge label");
    return out;
}

struct SimpleQueryStats {
    std::size_t r3_unions = 0;
    std::size_t big_intervals = 0; // intervals whose own list overflowed
    std::size_t big_parts = 0;     // parts united by R4
};

/// Connectivity of G - F from the labels of F only.
class SimpleQuery {
public:
    SimpleQuery(const DetParams& p, const std::vector<SimpleEdgeLabel>& faults, const LevelObserver& observer = {})
        : params_(p), state_(tree_faults(p, faults), p.h)
    {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> failed_nontree;
        for (const auto& e : faults)
            if (!e.tree) ++failed_nontree[dfs_pair(e.u, e.v)];
        for (std::uint32_t l = 1; l <= p.h; ++l) {
            state_.begin_level(l);
            for (TreePartition& t : state_.trees()) apply_r3_r4(t, l, failed_nontree);
            if (observer) observer(l, state_);
        }
    }

    bool connected(std::uint32_t s, std::uint32_t t) const { return ComponentAnswer(state_, params_.roots).connected(s, t); }
    std::size_t component_count() const { return ComponentAnswer(state_, params_.roots).count(); }
    const SimpleQueryStats& stats() const { return stats_; }

private:
    std::vector<FailedTreeEdge> tree_faults(const DetParams& p, const std::vector<SimpleEdgeLabel>& faults)
    {
        if (faults.size() > p.f) throw Error(ErrorKind::too_many_faults, "more failed edges than f");
        std::vector<FailedTreeEdge> out;
        for (const auto& e : faults)
            if (e.tree) {
                out.push_back(e.failed());
                labels_.push_back(&e);
            }
        return out;
    }

    const SimpleSegment& segment(const TreeCut& c, std::uint32_t l, int which) const
    {
        const SimpleEdgeLabel& e = *labels_[c.fault];
        return e.levels[l - e.level][std::size_t(which)];
    }

    void apply_r3_r4(TreePartition& t, std::uint32_t l,
                     const std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t>& failed_nontree)
    {
        std::size_t k = t.intervals();
        std::vector<std::uint64_t> exact(k, 0);
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> mult;
        for (std::size_t i = 0; i < k; ++i) {
            // the list that starts exactly where interval i starts
            const SimpleSegment& s = i == 0 ? segment(t.cuts()[0], l, 0)
                                            : segment(t.cuts()[i - 1], l, t.cuts()[i - 1].down ? 1 : 2);
            std::uint32_t end = i + 1 < k ? t.cuts()[i].pos : UINT32_MAX;
            std::uint64_t inside = 0;
            while (inside < s.edges.size() && s.edges[inside].first < end) ++inside;
            bool big = exceeds_f_over_phi(inside, params_.f, params_.phi) || (inside == s.edges.size() && s.truncated);
            t.big()[i] = big;
            stats_.big_intervals += big;
            exact[i] = inside;

            // R3; a listed edge survives unless F holds every parallel copy of it
            mult.clear();
            if (!failed_nontree.empty())
                for (const auto& [a, b] : s.edges) ++mult[dfs_pair(a, b)];
            for (const auto& [a, b] : s.edges) {
                if (!failed_nontree.empty()) {
                    auto it = failed_nontree.find(dfs_pair(a, b));
                    if (it != failed_nontree.end() && mult[dfs_pair(a, b)] <= it->second) continue;
                }
                stats_.r3_unions += t.unite_vertices(a, b);
            }
        }

        // R4: a part is large if one of its intervals overflowed or its exact counts add up past f/phi
        std::vector<std::uint64_t> sum(k, 0);
        std::vector<char> part_big(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t r = t.find(i);
            if (t.big()[i]) part_big[r] = 1;
            else sum[r] += exact[i];
        }
        for (std::size_t r = 0; r < k; ++r)
            if (t.find(r) == r && exceeds_f_over_phi(sum[r], params_.f, params_.phi)) part_big[r] = 1;
        for (std::size_t i = 0; i < k; ++i) t.big()[i] = part_big[t.find(i)];
        for (std::size_t r = 0; r < k; ++r) stats_.big_parts += t.find(r) == r && part_big[r];
        PartitionState::unite_big(t);
    }

    DetParams params_;
    std::vector<const SimpleEdgeLabel*> labels_;
    mutable PartitionState state_;
    SimpleQueryStats stats_;
};

} // namespace ftconn
