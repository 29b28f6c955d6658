#pragma once

#include "expander_hierarchy.hpp"
#include "graph.hpp"

namespace ftconn {

enum class ElemKind : std::uint8_t { vertex, down, up };

/// One element of Euler(T*): a vertex (first appearance) or an oriented tree edge.
/// `down` goes parent -> child, `up` goes child -> parent.
struct TourElem {
    ElemKind kind;
    Vertex v;    // the vertex, or the child endpoint for oriented edges
    EdgeId edge; // tree edge for oriented elements
};

struct LevelTree {
    std::uint32_t root_pos = 0;              // first element of the tree's tour
    std::vector<std::uint32_t> positions;    // Euler(T) as increasing T* positions
};

struct EulerFrame {
    std::uint32_t h = 1;
    std::vector<std::uint32_t> level;        // copy of the edge levels
    std::vector<char> is_tree;               // per edge
    std::vector<EdgeId> tstar;
    std::vector<TourElem> tour;
    std::vector<std::uint32_t> dfs;          // vertex -> tour position
    std::vector<std::uint32_t> down_pos, up_pos; // per tree edge
    std::vector<Vertex> child, parent;       // per tree edge
    std::vector<std::uint32_t> comp_root;    // vertex -> tour position of its T* root
    std::uint32_t components = 0;
    // trees[l] for l in [1, h]; tree_of[l][v] is the index of v's tree at level l
    std::vector<std::vector<LevelTree>> trees;
    std::vector<std::vector<std::uint32_t>> tree_of;

    Vertex head(std::uint32_t pos) const
    {
        const TourElem& t = tour[pos];
        return t.kind == ElemKind::up ? parent[t.edge] : t.v;
    }
    Vertex tail(std::uint32_t pos) const
    {
        const TourElem& t = tour[pos];
        return t.kind == ElemKind::down ? parent[t.edge] : t.v;
    }
    const LevelTree& tree_at(std::uint32_t l, Vertex v) const { return trees[l][tree_of[l][v]]; }
};

/// Level-minimum spanning forest (Kruskal by level, ties by edge id), DFS from the smallest
/// vertex of each component with children in ascending vertex id.
inline EulerFrame build_frame(const Graph& g, const EdgeLevelAssignment& levels)
{
    EulerFrame fr;
    std::size_t n = g.n(), m = g.m();
    fr.h = levels.h;
    fr.level = levels.level;
    fr.is_tree.assign(m, 0);
    std::vector<EdgeId> order(m);
    std::iota(order.begin(), order.end(), EdgeId{0});
    std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) { return levels.level[a] < levels.level[b]; });
    DisjointSets ds(n);
    for (EdgeId e : order)
        if (ds.unite(g.edge(e).u, g.edge(e).v)) {
            fr.is_tree[e] = 1;
            fr.tstar.push_back(e);
        }
    std::sort(fr.tstar.begin(), fr.tstar.end());

    std::vector<std::vector<Incidence>> children(n);
    for (Vertex v = 0; v < n; ++v) {
        for (const Incidence& inc : g.adj(v))
            if (fr.is_tree[inc.edge]) children[v].push_back(inc);
        std::sort(children[v].begin(), children[v].end(),
                  [](const Incidence& a, const Incidence& b) { return a.to < b.to; });
    }
    fr.dfs.assign(n, UINT32_MAX);
    fr.comp_root.assign(n, 0);
    fr.down_pos.assign(m, UINT32_MAX);
    fr.up_pos.assign(m, UINT32_MAX);
    fr.child.assign(m, 0);
    fr.parent.assign(m, 0);
    fr.tour.reserve(3 * n);
    std::vector<std::pair<Vertex, std::size_t>> stack;
    std::vector<EdgeId> via(n, UINT32_MAX);
    for (Vertex r = 0; r < n; ++r) {
        if (fr.dfs[r] != UINT32_MAX) continue;
        ++fr.components;
        std::uint32_t root_pos = std::uint32_t(fr.tour.size());
        fr.dfs[r] = root_pos;
        fr.comp_root[r] = root_pos;
        fr.tour.push_back({ElemKind::vertex, r, 0});
        stack.assign(1, {r, 0});
        while (!stack.empty()) {
            auto& [v, i] = stack.back();
            if (i < children[v].size()) {
                Incidence inc = children[v][i++];
                if (fr.dfs[inc.to] != UINT32_MAX) continue;
                fr.parent[inc.edge] = v;
                fr.child[inc.edge] = inc.to;
                fr.down_pos[inc.edge] = std::uint32_t(fr.tour.size());
                fr.tour.push_back({ElemKind::down, inc.to, inc.edge});
                fr.dfs[inc.to] = std::uint32_t(fr.tour.size());
                fr.comp_root[inc.to] = root_pos;
                fr.tour.push_back({ElemKind::vertex, inc.to, 0});
                via[inc.to] = inc.edge;
                stack.push_back({inc.to, 0});
            } else {
                Vertex done = v;
                stack.pop_back();
                if (via[done] != UINT32_MAX) {
                    EdgeId e = via[done];
                    fr.up_pos[e] = std::uint32_t(fr.tour.size());
                    fr.tour.push_back({ElemKind::up, done, e});
                }
            }
        }
    }

    fr.trees.assign(fr.h + 1, {});
    fr.tree_of.assign(fr.h + 1, std::vector<std::uint32_t>(n, UINT32_MAX));
    for (std::uint32_t l = 1; l <= fr.h; ++l) {
        DisjointSets lds(n);
        for (EdgeId e : fr.tstar)
            if (fr.level[e] <= l) lds.unite(g.edge(e).u, g.edge(e).v);
        auto& trees = fr.trees[l];
        std::vector<std::uint32_t> index(n, UINT32_MAX);
        for (std::uint32_t p = 0; p < fr.tour.size(); ++p) {
            const TourElem& t = fr.tour[p];
            if (t.kind != ElemKind::vertex && fr.level[t.edge] > l) continue;
            std::size_t rep = lds.find(t.v);
            if (index[rep] == UINT32_MAX) {
                index[rep] = std::uint32_t(trees.size());
                trees.push_back({p, {}});
            }
            trees[index[rep]].positions.push_back(p);
            if (t.kind == ElemKind::vertex) fr.tree_of[l][t.v] = index[rep];
        }
    }
    return fr;
}

/// Index of T* position `pos` inside a tree tour, or npos.
inline std::size_t tour_index(const LevelTree& t, std::uint32_t pos)
{
    auto it = std::lower_bound(t.positions.begin(), t.positions.end(), pos);
    if (it == t.positions.end() || *it != pos) return SIZE_MAX;
    return std::size_t(it - t.positions.begin());
}

/// Weights, slots and balls for one level-l tree.
class WeightedTour {
public:
    WeightedTour(const Graph& g, const EulerFrame& fr, std::uint32_t l, std::uint32_t tree, std::uint32_t jmax)
        : frame_(&fr), tree_(&fr.trees[l][tree]), level_(l), jmax_(jmax)
    {
        const auto& pos = tree_->positions;
        weight_.assign(pos.size(), 0);
        prefix_.assign(pos.size() + 1, 0);
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const TourElem& t = fr.tour[pos[i]];
            if (t.kind == ElemKind::vertex) weight_[i] = is_weighted(g, fr, l, t.v) ? 1 : 0;
            prefix_[i + 1] = prefix_[i] + weight_[i];
        }
        total_ = prefix_.back();
        padded_ = std::max<std::uint64_t>(std::bit_ceil(std::max<std::uint64_t>(total_, 1)), std::uint64_t{1} << jmax);
    }

    static bool is_weighted(const Graph& g, const EulerFrame& fr, std::uint32_t l, Vertex v)
    {
        for (const Incidence& inc : g.adj(v))
            if (!fr.is_tree[inc.edge] && fr.level[inc.edge] == l) return true;
        return false;
    }

    const LevelTree& tree() const { return *tree_; }
    std::uint32_t level() const { return level_; }
    std::size_t size() const { return weight_.size(); }
    std::uint8_t weight(std::size_t i) const { return weight_[i]; }
    std::uint32_t total() const { return total_; }
    std::uint64_t padded() const { return padded_; }
    std::uint32_t jmax() const { return jmax_; }

    /// Weighted elements strictly before element i (the gap index for oriented edges).
    std::uint32_t gap(std::size_t i) const { return prefix_[i]; }

    /// Sum of weights strictly between elements i and j.
    std::uint32_t dist(std::size_t i, std::size_t j) const
    {
        if (i > j) std::swap(i, j);
        if (i == j) return 0;
        return prefix_[j] - prefix_[i + 1];
    }

    /// Tour element range [lo, hi] of Ball(alpha, r).
    std::pair<std::size_t, std::size_t> ball_range(std::size_t alpha, std::uint32_t r) const
    {
        std::size_t lo = alpha, hi = alpha;
        while (lo > 0 && dist(lo - 1, alpha) <= r) --lo;
        while (hi + 1 < size() && dist(alpha, hi + 1) <= r) ++hi;
        return {lo, hi};
    }

    /// Slot range [lo, hi) of weighted vertices in Ball(alpha, r), by prefix arithmetic.
    std::pair<std::uint32_t, std::uint32_t> ball_slots(std::size_t alpha, std::uint32_t r) const
    {
        std::int64_t g = prefix_[alpha];
        std::int64_t lo = g - 1 - std::int64_t(r);
        std::int64_t hi = g + weight_[alpha] + std::int64_t(r);
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min<std::int64_t>(hi, std::int64_t(total_) - 1);
        if (hi < lo) return {0, 0};
        return {std::uint32_t(lo), std::uint32_t(hi + 1)};
    }

    std::vector<Vertex> ball(std::size_t alpha, std::uint32_t r) const
    {
        auto [lo, hi] = ball_range(alpha, r);
        std::vector<Vertex> out;
        for (std::size_t i = lo; i <= hi; ++i) {
            const TourElem& t = frame_->tour[tree_->positions[i]];
            if (t.kind == ElemKind::vertex) out.push_back(t.v);
        }
        return out;
    }

    /// Ball of a tree edge: union of the balls of its two oriented copies.
    std::vector<Vertex> edge_ball(EdgeId e, std::uint32_t r) const
    {
        auto a = ball(tour_index(*tree_, frame_->down_pos[e]), r);
        auto b = ball(tour_index(*tree_, frame_->up_pos[e]), r);
        a.insert(a.end(), b.begin(), b.end());
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        return a;
    }

private:
    const EulerFrame* frame_;
    const LevelTree* tree_;
    std::uint32_t level_;
    std::uint32_t jmax_;
    std::vector<std::uint8_t> weight_;
    std::vector<std::uint32_t> prefix_;
    std::uint32_t total_ = 0;
    std::uint64_t padded_ = 1;
};

/// A dyadic slot block [index * 2^j, (index + 1) * 2^j).
struct DyadicBlock {
    std::uint32_t j;
    std::uint64_t index;

    std::uint64_t begin() const { return index << j; }
    std::uint64_t end() const { return (index + 1) << j; }
    friend bool operator==(const DyadicBlock&, const DyadicBlock&) = default;
};

/// Greedy canonical cover of the slot range [a, b) by blocks of level <= jmax.
inline std::vector<DyadicBlock> dyadic_cover(std::uint64_t a, std::uint64_t b, std::uint32_t jmax)
{
    if (a > b) throw Error(ErrorKind::invalid, "misaligned interval");
    std::vector<DyadicBlock> out;
    std::uint64_t p = a;
    while (p < b) {
        std::uint32_t j = jmax;
        while (j > 0 && ((p & ((std::uint64_t{1} << j) - 1)) != 0 || p + (std::uint64_t{1} << j) > b)) --j;
        out.push_back({j, p >> j});
        p += std::uint64_t{1} << j;
    }
    return out;
}

/// Nearest block at level j entirely right of gap g (starts at round_up(g, 2^j)).
inline DyadicBlock nearest_right(std::uint64_t g, std::uint32_t j)
{
    return {j, (g + (std::uint64_t{1} << j) - 1) >> j};
}

/// Nearest block at level j entirely left of gap g (ends at round_down(g, 2^j)); invalid when g < 2^j.
inline std::optional<DyadicBlock> nearest_left(std::uint64_t g, std::uint32_t j)
{
    std::uint64_t k = g >> j;
    if (k == 0) return std::nullopt;
    return DyadicBlock{j, k - 1};
}

} // namespace ftconn
