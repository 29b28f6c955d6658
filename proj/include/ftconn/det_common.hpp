#pragma once

#include "euler.hpp"
#include "label_file.hpp"
#include "partition.hpp"

namespace ftconn {

/// Parameters every deterministic label is read against; stored once in the label file.
struct DetParams {
    std::uint32_t n = 0, m = 0, f = 1, h = 1;
    Rational phi{1, 2};
    bool certified = true;
    std::uint32_t tour_len = 0;
    std::vector<std::uint32_t> roots; // T* root positions, ascending

    unsigned pos_bits() const { return bits_for(tour_len); }
    std::uint32_t sentinel() const { return tour_len; }
    unsigned level_bits() const { return bits_for(h); }
    std::uint64_t cap() const { return f_over_phi(f, phi) + 1; }

    static DetParams from_frame(const Graph& g, const EdgeLevelAssignment& a, const EulerFrame& fr, std::uint32_t f)
    {
        if (f < 1) throw Error(ErrorKind::invalid, "f must be at least 1");
        DetParams p;
        p.n = std::uint32_t(g.n());
        p.m = std::uint32_t(g.m());
        p.f = f;
        p.h = a.h;
        p.phi = a.phi;
        p.certified = a.certified;
        p.tour_len = std::uint32_t(fr.tour.size());
        for (Vertex v = 0; v < g.n(); ++v)
            if (fr.comp_root[v] == fr.dfs[v]) p.roots.push_back(fr.dfs[v]);
        std::sort(p.roots.begin(), p.roots.end());
        return p;
    }

    void write(BitWriter& w) const
    {
        w.put(tour_len, 32);
        w.put(certified, 1);
        w.put(roots.size(), 32);
        for (auto r : roots) w.put(r, pos_bits());
    }

    LabelFile file(SchemeId scheme) const
    {
        LabelFile lf;
        lf.scheme = scheme;
        lf.n = n;
        lf.m = m;
        lf.f = f;
        lf.h = h;
        lf.phi = phi;
        BitWriter w;
        write(w);
        lf.extra = Payload(std::move(w));
        return lf;
    }

    static DetParams read(BitReader& r, const LabelFile& lf)
    {
        DetParams p;
        p.n = lf.n;
        p.m = lf.m;
        p.f = lf.f;
        p.h = lf.h;
        p.phi = lf.phi;
        if (p.h < 1 || p.f < 1) throw Error(ErrorKind::corrupt, "bad deterministic header");
        p.tour_len = std::uint32_t(r.get(32));
        p.certified = r.get_bit();
        std::uint64_t k = r.get(32);
        if (k > p.n) throw Error(ErrorKind::corrupt, "more roots than vertices");
        for (std::uint64_t i = 0; i < k; ++i) p.roots.push_back(std::uint32_t(r.get(p.pos_bits())));
        if (!std::is_sorted(p.roots.begin(), p.roots.end())) throw Error(ErrorKind::corrupt, "bad root list");
        return p;
    }

    static DetParams from_file(const LabelFile& lf)
    {
        BitReader r = lf.extra.reader();
        DetParams p = read(r, lf);
        if (!r.at_end()) throw Error(ErrorKind::corrupt, "bad deterministic parameters");
        return p;
    }
};

inline Payload det_vertex_label(const DetParams& p, const EulerFrame& fr, Vertex v)
{
    BitWriter w;
    w.put(fr.dfs[v], p.pos_bits());
    return Payload(std::move(w));
}

inline std::uint32_t decode_det_vertex(const DetParams& p, const Payload& label)
{
    BitReader r = label.reader();
    auto d = std::uint32_t(r.get(p.pos_bits()));
    if (!r.at_end() || d >= p.tour_len) throw Error(ErrorKind::corrupt, "bad vertex label");
    return d;
}

/// Level-l non-tree edges incident to each level-l tree, in tour order (ties by edge id).
struct Incidence3 {
    std::uint32_t index;  // tour index inside the level tree
    std::uint32_t inside; // DFS of the endpoint at that index
    std::uint32_t outside;
};

struct TreeTourIndex {
    std::vector<std::uint32_t> next_vertex; // first vertex element at index >= i, or size
    std::vector<std::uint32_t> prev_vertex; // last vertex element at index <= i, or UINT32_MAX
    std::vector<Incidence3> inc;
};

inline std::vector<std::vector<TreeTourIndex>> index_level_trees(const Graph& g, const EulerFrame& fr)
{
    std::vector<std::vector<TreeTourIndex>> out(fr.h + 1);
    for (std::uint32_t l = 1; l <= fr.h; ++l) {
        out[l].resize(fr.trees[l].size());
        for (std::size_t t = 0; t < fr.trees[l].size(); ++t) {
            const auto& pos = fr.trees[l][t].positions;
            TreeTourIndex& ti = out[l][t];
            std::size_t len = pos.size();
            ti.next_vertex.assign(len + 1, std::uint32_t(len));
            ti.prev_vertex.assign(len, UINT32_MAX);
            for (std::size_t i = len; i-- > 0;)
                ti.next_vertex[i] = fr.tour[pos[i]].kind == ElemKind::vertex ? std::uint32_t(i) : ti.next_vertex[i + 1];
            for (std::size_t i = 0; i < len; ++i)
                ti.prev_vertex[i] = fr.tour[pos[i]].kind == ElemKind::vertex ? std::uint32_t(i)
                                    : i ? ti.prev_vertex[i - 1]
                                        : UINT32_MAX;
            std::vector<EdgeId> ids;
            for (std::size_t i = 0; i < len; ++i) {
                const TourElem& el = fr.tour[pos[i]];
                if (el.kind != ElemKind::vertex) continue;
                ids.clear();
                for (const Incidence& inc : g.adj(el.v))
                    if (!fr.is_tree[inc.edge] && fr.level[inc.edge] == l) ids.push_back(inc.edge);
                std::sort(ids.begin(), ids.end());
                for (EdgeId e : ids)
                    ti.inc.push_back({std::uint32_t(i), fr.dfs[el.v], fr.dfs[g.other(e, el.v)]});
            }
        }
    }
    return out;
}

/// Unordered endpoint pair, for matching non-tree labels.
inline std::pair<std::uint32_t, std::uint32_t> dfs_pair(std::uint32_t a, std::uint32_t b) { return std::minmax(a, b); }

} // namespace ftconn
