#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <random>

#include "graph.hpp"

namespace ftconn {

enum class HierarchyMode { exact, heuristic };

struct EdgeLevelAssignment {
    std::vector<std::uint32_t> level; // per edge, in [1, h]
    std::uint32_t h = 1;
    Rational phi{1, 2};
    bool certified = true;
};

struct VertexComponent {
    std::uint32_t level = 0;
    std::vector<Vertex> vertices; // sorted
    std::vector<Vertex> core;     // V_level ∩ component, sorted
    std::int32_t parent = -1;     // enclosing component one level up
};

struct VertexLevelAssignment {
    std::vector<std::uint32_t> level; // per vertex
    std::uint32_t h = 1;
    Rational phi{1, 1};
    bool certified = true;
    std::vector<VertexComponent> components;
};

struct EdgeCutWitness {
    bool expanding = true;
    std::vector<Vertex> side; // violating S when !expanding
};

struct VertexCutWitness {
    bool expanding = true;
    std::vector<Vertex> left, separator, right;
};

namespace detail {

inline std::vector<std::uint32_t> x_volume(const Graph& g, const std::vector<char>& in_x)
{
    std::vector<std::uint32_t> vol(g.n(), 0);
    for (EdgeId e = 0; e < g.m(); ++e)
        if (in_x[e]) {
            ++vol[g.edge(e).u];
            ++vol[g.edge(e).v];
        }
    return vol;
}

inline bool edge_violation(std::uint64_t cut, std::uint64_t vol_s, std::uint64_t vol_r, Rational phi)
{
    return cut * phi.den < std::uint64_t(phi.num) * std::min(vol_s, vol_r);
}

/// Lexicographic order on the sorted member lists of two vertex masks.
inline bool mask_lex_less(std::uint32_t a, std::uint32_t b)
{
    if (a == b) return false;
    std::uint32_t d = a ^ b;
    std::uint32_t low = d & (~d + 1);
    std::uint32_t above = ~((low << 1) - 1);
    if (a & low) return (b & above) != 0;
    return (a & above) == 0;
}

inline std::vector<Vertex> mask_members(std::uint32_t mask, std::size_t n)
{
    std::vector<Vertex> out;
    for (std::size_t v = 0; v < n; ++v)
        if (mask >> v & 1u) out.push_back(Vertex(v));
    return out;
}

/// Calls visit(mask, cut, vol_s) for every nonempty vertex subset avoiding vertex n-1.
template <class Visit>
void enumerate_edge_cuts(const Graph& g, const std::vector<std::uint32_t>& vol, Visit&& visit)
{
    std::size_t n = g.n();
    if (n < 2) return;
    std::vector<char> in(n, 0);
    std::uint32_t mask = 0;
    std::int64_t cut = 0, vs = 0;
    std::uint64_t limit = std::uint64_t{1} << (n - 1);
    for (std::uint64_t i = 1; i < limit; ++i) {
        unsigned v = unsigned(std::countr_zero(i));
        bool add = !in[v];
        for (const Incidence& inc : g.adj(v)) cut += (in[inc.to] ? -1 : 1) * (add ? 1 : -1);
        vs += add ? std::int64_t(vol[v]) : -std::int64_t(vol[v]);
        in[v] = add;
        mask ^= 1u << v;
        if (!visit(mask, std::uint64_t(cut), std::uint64_t(vs))) return;
    }
}

inline void check_size(std::size_t n)
{
    if (n > std::size_t(exact_size_cap()))
        throw Error(ErrorKind::size_cap, "graph has " + std::to_string(n) + " vertices, above the exact-mode cap of " +
                                             std::to_string(exact_size_cap()) + "; use heuristic mode");
}

} // namespace detail

/// Exact check of |E(S, V\S)| >= phi * min(Deg_X(S), Deg_X(V\S)) over all cuts.
inline EdgeCutWitness verify_edge_expanding(const Graph& g, const std::vector<char>& in_x, Rational phi)
{
    detail::check_size(g.n());
    EdgeCutWitness w;
    auto vol = detail::x_volume(g, in_x);
    std::uint64_t total = 0;
    for (auto x : vol) total += x;
    detail::enumerate_edge_cuts(g, vol, [&](std::uint32_t mask, std::uint64_t cut, std::uint64_t vs) {
        if (detail::edge_violation(cut, vs, total - vs, phi)) {
            w.expanding = false;
            w.side = detail::mask_members(mask, g.n());
            return false;
        }
        return true;
    });
    return w;
}

namespace detail {

/// Violating S with |S| <= n/2 minimizing (cut, lexicographic S), by enumeration.
inline std::optional<std::vector<Vertex>> exact_violating_cut(const Graph& g, const std::vector<char>& in_x,
                                                               Rational phi)
{
    std::size_t n = g.n();
    auto vol = x_volume(g, in_x);
    std::uint64_t total = 0;
    for (auto x : vol) total += x;
    bool found = false;
    std::uint64_t best_cut = 0;
    std::uint32_t best = 0;
    std::uint32_t full = n >= 32 ? ~0u : ((1u << n) - 1);
    auto consider = [&](std::uint32_t s, std::uint64_t cut) {
        if (2 * std::size_t(std::popcount(s)) > n) return;
        if (!found || cut < best_cut || (cut == best_cut && mask_lex_less(s, best))) {
            found = true;
            best_cut = cut;
            best = s;
        }
    };
    enumerate_edge_cuts(g, vol, [&](std::uint32_t mask, std::uint64_t cut, std::uint64_t vs) {
        if (edge_violation(cut, vs, total - vs, phi)) {
            consider(mask, cut);
            consider(full & ~mask, cut);
        }
        return true;
    });
    if (!found) return std::nullopt;
    return mask_members(best, n);
}

/// Evaluates cut and X-volume of vertex prefixes of `order`; returns the violating prefix
/// (or complement) with the smallest cut, and tracks the prefix with the lowest ratio.
struct SweepResult {
    std::optional<std::vector<Vertex>> violating;
    std::uint64_t violating_cut = 0;
    double best_ratio = 1e300;
    std::vector<Vertex> best_ratio_set;
};

inline void sweep_order(const Graph& g, const std::vector<std::uint32_t>& vol, std::uint64_t total,
                        const std::vector<Vertex>& order, Rational phi, SweepResult& out)
{
    std::size_t n = g.n();
    std::vector<char> in(n, 0);
    std::int64_t cut = 0;
    std::uint64_t vs = 0;
    std::size_t best_k = 0, ratio_k = 0;
    bool best_is_prefix = true, ratio_is_prefix = true, found = false;
    std::uint64_t best_cut = 0;
    double best_ratio = out.best_ratio;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        Vertex v = order[k];
        for (const Incidence& inc : g.adj(v)) cut += in[inc.to] ? -1 : 1;
        in[v] = 1;
        vs += vol[v];
        std::size_t size = k + 1;
        std::uint64_t mn = std::min<std::uint64_t>(vs, total - vs);
        if (mn > 0) {
            double ratio = double(cut) / double(mn);
            if (ratio < best_ratio) {
                best_ratio = ratio;
                ratio_k = size;
                ratio_is_prefix = 2 * size <= n;
            }
        }
        if (!edge_violation(std::uint64_t(cut), vs, total - vs, phi)) continue;
        bool prefix_ok = 2 * size <= n;
        std::size_t s_size = prefix_ok ? size : n - size;
        if (2 * s_size > n) continue;
        if (!found || std::uint64_t(cut) < best_cut ||
            (std::uint64_t(cut) == best_cut && s_size < (best_is_prefix ? best_k : n - best_k))) {
            found = true;
            best_cut = std::uint64_t(cut);
            best_k = size;
            best_is_prefix = prefix_ok;
        }
    }
    auto take = [&](std::size_t k, bool prefix) {
        std::vector<Vertex> s;
        if (prefix) s.assign(order.begin(), order.begin() + std::ptrdiff_t(k));
        else s.assign(order.begin() + std::ptrdiff_t(k), order.end());
        std::sort(s.begin(), s.end());
        return s;
    };
    if (found && (!out.violating || best_cut < out.violating_cut ||
                  (best_cut == out.violating_cut &&
                   (best_is_prefix ? best_k : n - best_k) < out.violating->size()))) {
        out.violating = take(best_k, best_is_prefix);
        out.violating_cut = best_cut;
    }
    if (best_ratio < out.best_ratio) {
        out.best_ratio = best_ratio;
        out.best_ratio_set = take(ratio_k, ratio_is_prefix);
    }
}

/// A few low eigenvectors of the lazy random walk, orthogonal to the stationary vector.
inline std::vector<std::vector<double>> spectral_vectors(const Graph& g, std::size_t count, std::mt19937_64& rng)
{
    std::size_t n = g.n();
    std::vector<double> deg(n);
    for (std::size_t v = 0; v < n; ++v) deg[v] = double(std::max<std::size_t>(1, g.degree(Vertex(v))));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> basis;
    // D-inner product projections
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * deg[i];
        return s;
    };
    std::vector<double> ones(n, 1.0);
    std::size_t iters = std::min<std::size_t>(400, 30 + 4 * std::size_t(std::sqrt(double(n))) * 4);
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> x(n), y(n);
        for (auto& xi : x) xi = gauss(rng);
        for (std::size_t it = 0; it < iters; ++it) {
            // project out constants and previous vectors
            double c = dot(x, ones) / dot(ones, ones);
            for (std::size_t i = 0; i < n; ++i) x[i] -= c;
            for (const auto& b : basis) {
                double p = dot(x, b) / dot(b, b);
                for (std::size_t i = 0; i < n; ++i) x[i] -= p * b[i];
            }
            for (std::size_t v = 0; v < n; ++v) {
                double s = 0;
                for (const Incidence& inc : g.adj(Vertex(v))) s += x[inc.to];
                y[v] = 0.5 * x[v] + 0.5 * s / deg[v];
            }
            double norm = std::sqrt(dot(y, y));
            if (norm == 0) break;
            for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
        }
        basis.push_back(x);
    }
    return basis;
}

inline std::vector<Vertex> order_by(const std::vector<double>& key)
{
    std::vector<Vertex> order(key.size());
    std::iota(order.begin(), order.end(), Vertex{0});
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return key[a] < key[b]; });
    return order;
}

inline std::vector<Vertex> bfs_order(const Graph& g, Vertex s, std::mt19937_64& rng)
{
    std::vector<char> seen(g.n(), 0);
    std::vector<Vertex> order{s};
    seen[s] = 1;
    std::vector<Incidence> nb;
    for (std::size_t i = 0; i < order.size(); ++i) {
        nb = g.adj(order[i]);
        std::shuffle(nb.begin(), nb.end(), rng);
        for (const Incidence& inc : nb)
            if (!seen[inc.to]) {
                seen[inc.to] = 1;
                order.push_back(inc.to);
            }
    }
    return order;
}

/// Subtree cuts of a randomized DFS tree: cut(sub(v)) = sum deg - 2 * edges inside, where an
/// edge lies inside sub(v) iff its upper endpoint does.
inline void dfs_subtree_candidates(const Graph& g, const std::vector<std::uint32_t>& vol, std::uint64_t total,
                                   Rational phi, std::mt19937_64& rng, SweepResult& out)
{
    std::size_t n = g.n();
    std::vector<std::uint32_t> pre(n, UINT32_MAX), parent(n, UINT32_MAX);
    std::vector<Vertex> order;
    std::vector<std::pair<Vertex, std::size_t>> stack;
    std::vector<std::vector<Incidence>> nbrs(n);
    Vertex root = Vertex(rng() % n);
    pre[root] = 0;
    order.push_back(root);
    nbrs[root] = g.adj(root);
    std::shuffle(nbrs[root].begin(), nbrs[root].end(), rng);
    stack.push_back({root, 0});
    while (!stack.empty()) {
        auto& [v, i] = stack.back();
        if (i == nbrs[v].size()) {
            nbrs[v].clear();
            nbrs[v].shrink_to_fit();
            stack.pop_back();
            continue;
        }
        Vertex w = nbrs[v][i++].to;
        if (pre[w] != UINT32_MAX) continue;
        pre[w] = std::uint32_t(order.size());
        parent[w] = v;
        order.push_back(w);
        nbrs[w] = g.adj(w);
        std::shuffle(nbrs[w].begin(), nbrs[w].end(), rng);
        stack.push_back({w, 0});
    }
    std::vector<std::int64_t> deg(n, 0), up(n, 0), vx(n, 0), size(n, 1);
    for (EdgeId e = 0; e < g.m(); ++e) {
        Vertex a = g.edge(e).u, b = g.edge(e).v;
        ++deg[a];
        ++deg[b];
        ++up[pre[a] < pre[b] ? a : b];
    }
    for (std::size_t v = 0; v < n; ++v) vx[v] = vol[v];
    for (std::size_t k = order.size(); k-- > 1;) {
        Vertex v = order[k], p = Vertex(parent[v]);
        deg[p] += deg[v];
        up[p] += up[v];
        vx[p] += vx[v];
        size[p] += size[v];
    }
    std::optional<Vertex> best;
    std::uint64_t best_cut = 0;
    std::size_t best_size = 0;
    double best_ratio = out.best_ratio;
    std::optional<std::pair<Vertex, bool>> ratio_pick;
    for (std::size_t k = 1; k < order.size(); ++k) {
        Vertex v = order[k];
        std::uint64_t cut = std::uint64_t(deg[v] - 2 * up[v]);
        std::uint64_t vs = std::uint64_t(vx[v]);
        std::size_t s_size = std::min<std::size_t>(std::size_t(size[v]), n - std::size_t(size[v]));
        std::uint64_t mn = std::min<std::uint64_t>(vs, total - vs);
        if (mn > 0 && double(cut) / double(mn) < best_ratio) {
            best_ratio = double(cut) / double(mn);
            ratio_pick = {v, 2 * std::size_t(size[v]) <= n};
        }
        if (!edge_violation(cut, vs, total - vs, phi)) continue;
        if (!best || cut < best_cut || (cut == best_cut && s_size < best_size)) {
            best = v;
            best_cut = cut;
            best_size = s_size;
        }
    }
    auto subtree = [&](Vertex v, bool inside) {
        std::vector<Vertex> s;
        std::uint32_t lo = pre[v], hi = pre[v] + std::uint32_t(size[v]);
        for (std::size_t u = 0; u < n; ++u)
            if ((pre[u] >= lo && pre[u] < hi) == inside) s.push_back(Vertex(u));
        return s;
    };
    if (best && (!out.violating || best_cut < out.violating_cut ||
                 (best_cut == out.violating_cut && best_size < out.violating->size()))) {
        out.violating = subtree(*best, 2 * std::size_t(size[*best]) <= n);
        out.violating_cut = best_cut;
    }
    if (ratio_pick) {
        out.best_ratio = best_ratio;
        out.best_ratio_set = subtree(ratio_pick->first, ratio_pick->second);
    }
}

/// Greedy single-vertex moves that lower cut / min-volume, keeping |S| <= n/2.
inline std::vector<Vertex> refine_cut(const Graph& g, const std::vector<std::uint32_t>& vol, std::uint64_t total,
                                      std::vector<Vertex> s_list, std::size_t passes)
{
    std::size_t n = g.n();
    std::vector<char> in(n, 0);
    for (Vertex v : s_list) in[v] = 1;
    std::int64_t cut = 0, vs = 0, size = std::int64_t(s_list.size());
    for (const Edge& e : g.edges()) cut += in[e.u] != in[e.v];
    for (Vertex v : s_list) vs += vol[v];
    auto ratio = [&](std::int64_t c, std::int64_t v) {
        std::int64_t mn = std::min<std::int64_t>(v, std::int64_t(total) - v);
        return mn <= 0 ? 1e300 : double(c) / double(mn);
    };
    for (std::size_t pass = 0; pass < passes; ++pass) {
        bool moved = false;
        for (std::size_t v = 0; v < n; ++v) {
            std::int64_t same = 0, other = 0;
            for (const Incidence& inc : g.adj(Vertex(v))) (in[inc.to] == in[v] ? same : other) += 1;
            if (other == 0) continue;
            std::int64_t nc = cut + same - other;
            std::int64_t nv = vs + (in[v] ? -std::int64_t(vol[v]) : std::int64_t(vol[v]));
            std::int64_t ns = size + (in[v] ? -1 : 1);
            if (ns <= 0 || std::size_t(ns) >= n || 2 * std::size_t(ns) > n) continue;
            if (ratio(nc, nv) + 1e-12 < ratio(cut, vs)) {
                in[v] = !in[v];
                cut = nc;
                vs = nv;
                size = ns;
                moved = true;
            }
        }
        if (!moved) break;
    }
    std::vector<Vertex> out;
    for (std::size_t v = 0; v < n; ++v)
        if (in[v]) out.push_back(Vertex(v));
    return out;
}

inline std::uint64_t cut_size(const Graph& g, const std::vector<Vertex>& s)
{
    std::vector<char> in(g.n(), 0);
    for (Vertex v : s) in[v] = 1;
    std::uint64_t c = 0;
    for (const Edge& e : g.edges()) c += in[e.u] != in[e.v];
    return c;
}

inline bool is_violating(const Graph& g, const std::vector<std::uint32_t>& vol, std::uint64_t total,
                         const std::vector<Vertex>& s, Rational phi)
{
    if (s.empty() || 2 * s.size() > g.n()) return false;
    std::uint64_t vs = 0;
    for (Vertex v : s) vs += vol[v];
    return edge_violation(cut_size(g, s), vs, total - vs, phi);
}

inline std::optional<std::vector<Vertex>> heuristic_violating_cut(const Graph& g, const std::vector<char>& in_x,
                                                                   Rational phi, std::mt19937_64& rng,
                                                                   const std::vector<std::vector<double>>& spectral)
{
    auto vol = x_volume(g, in_x);
    std::uint64_t total = 0;
    for (auto x : vol) total += x;
    if (total == 0) return std::nullopt;
    SweepResult res;
    std::size_t trees = g.n() > 2000 ? 4 : 8;
    for (std::size_t t = 0; t < trees; ++t) dfs_subtree_candidates(g, vol, total, phi, rng, res);
    if (res.violating) return res.violating;
    for (const auto& vec : spectral) sweep_order(g, vol, total, order_by(vec), phi, res);
    if (res.violating) return res.violating;
    std::size_t seeds = g.n() > 2000 ? 2 : 6;
    for (std::size_t t = 0; t < seeds; ++t) {
        // seed at an X-heavy vertex half of the time
        Vertex s = Vertex(rng() % g.n());
        if (t % 2 == 0) {
            for (std::size_t k = 0; k < 8; ++k) {
                Vertex c = Vertex(rng() % g.n());
                if (vol[c] > vol[s]) s = c;
            }
        }
        sweep_order(g, vol, total, bfs_order(g, s, rng), phi, res);
    }
    if (res.violating) return res.violating;
    if (!res.best_ratio_set.empty()) {
        auto refined = refine_cut(g, vol, total, res.best_ratio_set, 6);
        if (is_violating(g, vol, total, refined, phi)) return refined;
    }
    return std::nullopt;
}

inline void apply_edge_update(const Graph& g, std::vector<char>& in_x, const std::vector<Vertex>& s)
{
    std::vector<char> in(g.n(), 0);
    for (Vertex v : s) in[v] = 1;
    for (EdgeId e = 0; e < g.m(); ++e) {
        bool a = in[g.edge(e).u], b = in[g.edge(e).v];
        if (a != b) in_x[e] = 1;
        else if (a && b) in_x[e] = 0;
    }
}

/// Below this size heuristic mode switches to exhaustive cut search.
inline std::size_t heuristic_exact_threshold() { return std::min<std::size_t>(16, std::size_t(exact_size_cap())); }

} // namespace detail

struct EdgeSeparator {
    std::vector<char> in_x;
    bool certified = true;
};

/// Improvement loop starting from X = E; each round applies a violating cut S with |S| <= n/2.
inline EdgeSeparator edge_separator(const Graph& g, HierarchyMode mode, std::uint64_t seed = 0x5eed)
{
    if (bfs_components(g).count > 1) throw Error(ErrorKind::invalid, "edge_separator needs a connected graph");
    EdgeSeparator sep;
    sep.in_x.assign(g.m(), 1);
    Rational half{1, 2};
    bool exact = mode == HierarchyMode::exact || g.n() <= detail::heuristic_exact_threshold();
    if (mode == HierarchyMode::exact) detail::check_size(g.n());
    if (exact) {
        while (auto s = detail::exact_violating_cut(g, sep.in_x, half)) detail::apply_edge_update(g, sep.in_x, *s);
        return sep;
    }
    std::mt19937_64 rng(seed ^ (g.n() * 0x9e3779b97f4a7c15ull) ^ g.m());
    auto spectral = detail::spectral_vectors(g, g.n() > 2000 ? 2 : 3, rng);
    while (auto s = detail::heuristic_violating_cut(g, sep.in_x, half, rng, spectral))
        detail::apply_edge_update(g, sep.in_x, *s);
    sep.certified = false;
    return sep;
}

/// Top-down recursion: X of each component becomes its level, components of G \ X recurse.
inline EdgeLevelAssignment build_edge_hierarchy(const Graph& g, HierarchyMode mode, std::uint64_t seed = 0x5eed)
{
    EdgeLevelAssignment out;
    out.phi = {1, 2};
    std::vector<std::uint32_t> depth(g.m(), 0);
    struct Node {
        std::vector<Vertex> vertices;
        std::uint32_t depth;
    };
    std::vector<Node> work;
    std::vector<char> alive(g.m(), 1);
    Components top = bfs_components(g);
    {
        std::vector<std::vector<Vertex>> groups(top.count);
        for (Vertex v = 0; v < g.n(); ++v) groups[top.id[v]].push_back(v);
        for (auto& grp : groups) work.push_back({std::move(grp), 0});
    }
    std::uint32_t max_depth = 0;
    bool any_edge = false;
    while (!work.empty()) {
        Node node = std::move(work.back());
        work.pop_back();
        if (node.vertices.size() < 2) continue;
        Subgraph sub = induced_subgraph(g, node.vertices, alive);
        if (sub.graph.m() == 0) continue;
        EdgeSeparator sep = edge_separator(sub.graph, mode, seed + node.depth);
        if (!sep.certified) out.certified = false;
        any_edge = true;
        max_depth = std::max(max_depth, node.depth);
        std::vector<char> keep(sub.graph.m(), 0);
        for (EdgeId e = 0; e < sub.graph.m(); ++e) {
            if (sep.in_x[e]) {
                depth[sub.edge_ids[e]] = node.depth;
                alive[sub.edge_ids[e]] = 0;
            } else {
                keep[e] = 1;
            }
        }
        Components rest = bfs_components(sub.graph, keep);
        std::vector<std::vector<Vertex>> groups(rest.count);
        for (Vertex v = 0; v < sub.graph.n(); ++v) groups[rest.id[v]].push_back(sub.vertices[v]);
        for (auto& grp : groups)
            if (grp.size() >= 2) work.push_back({std::move(grp), node.depth + 1});
    }
    out.h = any_edge ? max_depth + 1 : 1;
    out.level.resize(g.m());
    for (EdgeId e = 0; e < g.m(); ++e) out.level[e] = out.h - depth[e];
    return out;
}

/// Edges of level <= l as a mask.
inline std::vector<char> edges_up_to(const EdgeLevelAssignment& a, std::uint32_t l)
{
    std::vector<char> keep(a.level.size(), 0);
    for (std::size_t e = 0; e < a.level.size(); ++e) keep[e] = a.level[e] <= l;
    return keep;
}

/// Per-level, per-component expansion check; returns the first failing (level, witness).
struct HierarchyCheck {
    bool ok = true;
    std::uint32_t level = 0;
    std::vector<Vertex> component;
    std::vector<Vertex> witness;
};

inline HierarchyCheck verify_edge_hierarchy(const Graph& g, const EdgeLevelAssignment& a, Rational phi,
                                            std::size_t max_component = SIZE_MAX)
{
    HierarchyCheck res;
    for (std::uint32_t l = 1; l <= a.h; ++l) {
        auto keep = edges_up_to(a, l);
        Components c = bfs_components(g, keep);
        std::vector<std::vector<Vertex>> groups(c.count);
        for (Vertex v = 0; v < g.n(); ++v) groups[c.id[v]].push_back(v);
        for (const auto& grp : groups) {
            if (grp.size() < 2 || grp.size() > max_component) continue;
            Subgraph sub = induced_subgraph(g, grp, keep);
            std::vector<char> in_x(sub.graph.m());
            for (EdgeId e = 0; e < sub.graph.m(); ++e) in_x[e] = a.level[sub.edge_ids[e]] == l;
            auto w = verify_edge_expanding(sub.graph, in_x, phi);
            if (!w.expanding) {
                res.ok = false;
                res.level = l;
                res.component = grp;
                for (Vertex v : w.side) res.witness.push_back(sub.vertices[v]);
                return res;
            }
        }
    }
    return res;
}

inline void export_hierarchy(std::ostream& out, const EdgeLevelAssignment& a)
{
    out << a.h << ' ' << a.phi.num << '/' << a.phi.den << ' ' << (a.certified ? "certified" : "uncertified") << '\n';
    for (std::size_t e = 0; e < a.level.size(); ++e) out << e << ' ' << a.level[e] << '\n';
}

inline void export_hierarchy(std::ostream& out, const VertexLevelAssignment& a)
{
    out << a.h << ' ' << a.phi.num << '/' << a.phi.den << ' ' << (a.certified ? "certified" : "uncertified") << '\n';
    for (std::size_t v = 0; v < a.level.size(); ++v) out << v << ' ' << a.level[v] << '\n';
}

// ---------------------------------------------------------------------------------------------
// Vertex version

namespace detail {

/// Components of G - S restricted to the vertices not in `removed`.
inline std::vector<std::vector<Vertex>> components_without(const Graph& g, const std::vector<char>& removed)
{
    std::vector<std::uint32_t> id(g.n(), UINT32_MAX);
    std::vector<std::vector<Vertex>> out;
    for (Vertex s = 0; s < g.n(); ++s) {
        if (removed[s] || id[s] != UINT32_MAX) continue;
        id[s] = std::uint32_t(out.size());
        out.push_back({s});
        auto& comp = out.back();
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (const Incidence& inc : g.adj(comp[i]))
                if (!removed[inc.to] && id[inc.to] == UINT32_MAX) {
                    id[inc.to] = id[s];
                    comp.push_back(inc.to);
                }
    }
    return out;
}

/// Splits components into two nonempty groups maximizing the smaller X-count.
/// Returns (best min, membership flags) or nullopt when fewer than two components.
inline std::optional<std::pair<std::size_t, std::vector<char>>>
best_split(const std::vector<std::size_t>& xs)
{
    std::size_t k = xs.size();
    if (k < 2) return std::nullopt;
    std::size_t total = 0;
    for (auto x : xs) total += x;
    // reach[i][s]: sum s achievable with components [0, i)
    std::vector<std::vector<char>> reach(k + 1, std::vector<char>(total + 1, 0));
    reach[0][0] = 1;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t s = 0; s <= total; ++s)
            if (reach[i][s]) {
                reach[i + 1][s] = 1;
                reach[i + 1][s + xs[i]] = 1;
            }
    std::size_t best_s = SIZE_MAX, best_min = 0;
    for (std::size_t s = 1; s < total; ++s)
        if (reach[k][s] && std::min(s, total - s) > best_min) {
            best_min = std::min(s, total - s);
            best_s = s;
        }
    std::vector<char> side(k, 0);
    if (best_s == SIZE_MAX) {
        side[0] = 1;
        return std::make_pair(std::min(xs[0], total - xs[0]), side);
    }
    std::size_t s = best_s;
    for (std::size_t i = k; i-- > 0;) {
        if (reach[i][s]) continue;
        side[i] = 1;
        s -= xs[i];
    }
    return std::make_pair(best_min, side);
}

/// Checks the vertex cut with separator `s_mask`; on violation fills (L, R) with |L| <= |R|.
inline bool vertex_violation(const Graph& g, const std::vector<char>& in_x, const std::vector<char>& removed,
                             std::size_t s_size, std::size_t x_in_s, Rational phi, std::vector<Vertex>* left,
                             std::vector<Vertex>* right)
{
    auto comps = components_without(g, removed);
    if (comps.size() < 2) return false;
    std::vector<std::size_t> xs;
    for (const auto& c : comps) {
        std::size_t x = 0;
        for (Vertex v : c) x += in_x[v] ? 1 : 0;
        xs.push_back(x);
    }
    auto split = best_split(xs);
    if (!split) return false;
    // |S| < phi * (min + x_S)
    if (!(std::uint64_t(s_size) * phi.den < std::uint64_t(phi.num) * (split->first + x_in_s))) return false;
    if (left && right) {
        left->clear();
        right->clear();
        for (std::size_t i = 0; i < comps.size(); ++i)
            for (Vertex v : comps[i]) (split->second[i] ? left : right)->push_back(v);
        if (left->size() > right->size()) std::swap(*left, *right);
        std::sort(left->begin(), left->end());
        std::sort(right->begin(), right->end());
    }
    return true;
}

/// Smallest violating separator in (size, lexicographic) order.
inline std::optional<VertexCutWitness> exact_violating_vertex_cut(const Graph& g, const std::vector<char>& in_x,
                                                                  Rational phi)
{
    std::size_t n = g.n();
    std::vector<char> removed(n, 0);
    for (std::size_t k = 1; k + 2 <= n; ++k) {
        std::vector<std::size_t> idx(k);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        while (true) {
            std::fill(removed.begin(), removed.end(), 0);
            std::size_t xs = 0;
            for (auto i : idx) {
                removed[i] = 1;
                xs += in_x[i] ? 1 : 0;
            }
            VertexCutWitness w;
            if (vertex_violation(g, in_x, removed, k, xs, phi, &w.left, &w.right)) {
                w.expanding = false;
                for (auto i : idx) w.separator.push_back(Vertex(i));
                return w;
            }
            std::size_t p = k;
            while (p > 0 && idx[p - 1] == n - k + p - 1) --p;
            if (p == 0) break;
            ++idx[p - 1];
            for (std::size_t q = p; q < k; ++q) idx[q] = idx[q - 1] + 1;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Exact check of |S| >= phi * min(|X ∩ (L ∪ S)|, |X ∩ (R ∪ S)|) over all vertex cuts.
inline VertexCutWitness verify_vertex_expanding(const Graph& g, const std::vector<char>& in_x, Rational phi)
{
    detail::check_size(g.n());
    auto w = detail::exact_violating_vertex_cut(g, in_x, phi);
    return w ? *w : VertexCutWitness{};
}

struct VertexSeparator {
    std::vector<char> in_x;
    bool certified = true;
};

namespace detail {

/// Candidate separators for large graphs: BFS layers and articulation points.
inline std::optional<VertexCutWitness> heuristic_violating_vertex_cut(const Graph& g, const std::vector<char>& in_x,
                                                                      std::mt19937_64& rng)
{
    std::size_t n = g.n();
    Rational one{1, 1};
    std::vector<char> removed(n, 0);
    std::optional<VertexCutWitness> best;
    auto try_sep = [&](const std::vector<Vertex>& s) {
        if (s.empty() || s.size() + 2 > n) return;
        if (best && best->separator.size() <= s.size()) return;
        std::fill(removed.begin(), removed.end(), 0);
        std::size_t xs = 0;
        for (Vertex v : s) {
            removed[v] = 1;
            xs += in_x[v] ? 1 : 0;
        }
        VertexCutWitness w;
        if (vertex_violation(g, in_x, removed, s.size(), xs, one, &w.left, &w.right)) {
            w.expanding = false;
            w.separator = s;
            std::sort(w.separator.begin(), w.separator.end());
            best = w;
        }
    };
    // articulation points
    for (Vertex v = 0; v < n && n <= 4000; ++v) {
        if (g.degree(v) < 2) continue;
        try_sep({v});
        if (best) return best;
    }
    for (std::size_t t = 0; t < 6; ++t) {
        Vertex s = Vertex(rng() % n);
        std::vector<std::uint32_t> dist(n, UINT32_MAX);
        std::vector<Vertex> q{s};
        dist[s] = 0;
        for (std::size_t i = 0; i < q.size(); ++i)
            for (const Incidence& inc : g.adj(q[i]))
                if (dist[inc.to] == UINT32_MAX) {
                    dist[inc.to] = dist[q[i]] + 1;
                    q.push_back(inc.to);
                }
        std::uint32_t maxd = dist[q.back()];
        for (std::uint32_t d = 1; d < maxd; ++d) {
            std::vector<Vertex> layer;
            for (Vertex v : q)
                if (dist[v] == d) layer.push_back(v);
            try_sep(layer);
        }
    }
    return best;
}

} // namespace detail

/// Improvement loop from X = V: on a violating cut (L, S, R) with |L| <= n/2, X <- X \ L ∪ S.
inline VertexSeparator vertex_separator(const Graph& g, HierarchyMode mode, std::uint64_t seed = 0x5eed)
{
    if (bfs_components(g).count > 1) throw Error(ErrorKind::invalid, "vertex_separator needs a connected graph");
    VertexSeparator sep;
    sep.in_x.assign(g.n(), 1);
    bool exact = mode == HierarchyMode::exact || g.n() <= detail::heuristic_exact_threshold();
    if (mode == HierarchyMode::exact) detail::check_size(g.n());
    std::mt19937_64 rng(seed ^ g.n());
    while (true) {
        auto w = exact ? detail::exact_violating_vertex_cut(g, sep.in_x, {1, 1})
                       : detail::heuristic_violating_vertex_cut(g, sep.in_x, rng);
        if (!w) break;
        for (Vertex v : w->left) sep.in_x[v] = 0;
        for (Vertex v : w->separator) sep.in_x[v] = 1;
    }
    if (!exact) sep.certified = false;
    return sep;
}

inline VertexLevelAssignment build_vertex_hierarchy(const Graph& g, HierarchyMode mode, std::uint64_t seed = 0x5eed)
{
    VertexLevelAssignment out;
    out.phi = {1, 1};
    std::vector<std::uint32_t> depth(g.n(), 0);
    struct Node {
        std::vector<Vertex> vertices;
        std::uint32_t depth;
        std::int32_t parent;
    };
    std::vector<Node> work;
    std::vector<std::uint32_t> comp_depth;
    Components top = bfs_components(g);
    {
        std::vector<std::vector<Vertex>> groups(top.count);
        for (Vertex v = 0; v < g.n(); ++v) groups[top.id[v]].push_back(v);
        for (auto it = groups.rbegin(); it != groups.rend(); ++it) work.push_back({std::move(*it), 0, -1});
    }
    std::uint32_t max_depth = 0;
    while (!work.empty()) {
        Node node = std::move(work.back());
        work.pop_back();
        Subgraph sub = induced_subgraph(g, node.vertices);
        VertexSeparator sep = vertex_separator(sub.graph, mode, seed + node.depth);
        if (!sep.certified) out.certified = false;
        max_depth = std::max(max_depth, node.depth);
        VertexComponent comp;
        comp.vertices = node.vertices;
        std::sort(comp.vertices.begin(), comp.vertices.end());
        comp.parent = node.parent;
        std::vector<char> removed(sub.graph.n(), 0);
        for (Vertex v = 0; v < sub.graph.n(); ++v)
            if (sep.in_x[v]) {
                removed[v] = 1;
                depth[sub.vertices[v]] = node.depth;
                comp.core.push_back(sub.vertices[v]);
            }
        std::sort(comp.core.begin(), comp.core.end());
        std::int32_t id = std::int32_t(out.components.size());
        out.components.push_back(std::move(comp));
        comp_depth.push_back(node.depth);
        auto rest = detail::components_without(sub.graph, removed);
        for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
            std::vector<Vertex> vs;
            for (Vertex v : *it) vs.push_back(sub.vertices[v]);
            std::sort(vs.begin(), vs.end());
            work.push_back({std::move(vs), node.depth + 1, id});
        }
    }
    out.h = max_depth + 1;
    out.level.resize(g.n());
    for (Vertex v = 0; v < g.n(); ++v) out.level[v] = out.h - depth[v];
    for (std::size_t i = 0; i < out.components.size(); ++i) out.components[i].level = out.h - comp_depth[i];
    return out;
}

/// Structural checks: laminar family, cores partition V, no edge between disjoint components.
inline bool check_vertex_hierarchy_structure(const Graph& g, const VertexLevelAssignment& a, std::string* why = nullptr)
{
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    std::vector<int> core_owner(g.n(), -1);
    for (std::size_t i = 0; i < a.components.size(); ++i) {
        const auto& c = a.components[i];
        for (Vertex v : c.core) {
            if (core_owner[v] != -1) return fail("cores overlap");
            core_owner[v] = int(i);
            if (a.level[v] != c.level) return fail("core level mismatch");
        }
        if (c.parent >= 0) {
            const auto& p = a.components[std::size_t(c.parent)];
            if (!std::includes(p.vertices.begin(), p.vertices.end(), c.vertices.begin(), c.vertices.end()))
                return fail("component not nested in parent");
            if (p.level != c.level + 1) return fail("parent level mismatch");
        }
    }
    for (Vertex v = 0; v < g.n(); ++v)
        if (core_owner[v] < 0) return fail("vertex without core");
    // laminarity and edge separation across all pairs
    std::vector<std::vector<int>> member(g.n());
    for (std::size_t i = 0; i < a.components.size(); ++i)
        for (Vertex v : a.components[i].vertices) member[v].push_back(int(i));
    for (std::size_t i = 0; i < a.components.size(); ++i)
        for (std::size_t j = i + 1; j < a.components.size(); ++j) {
            const auto& x = a.components[i].vertices;
            const auto& y = a.components[j].vertices;
            std::vector<Vertex> common;
            std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
            if (!common.empty() && common.size() != x.size() && common.size() != y.size())
                return fail("components not laminar");
        }
    for (const Edge& e : g.edges()) {
        for (int i : member[e.u]) {
            bool v_in = std::binary_search(a.components[std::size_t(i)].vertices.begin(),
                                           a.components[std::size_t(i)].vertices.end(), e.v);
            if (v_in) continue;
            // e.v must lie in a component containing component i
            bool ok = false;
            for (int j : member[e.v]) {
                const auto& big = a.components[std::size_t(j)].vertices;
                const auto& small = a.components[std::size_t(i)].vertices;
                if (std::includes(big.begin(), big.end(), small.begin(), small.end())) ok = true;
            }
            if (!ok) return fail("edge between disjoint components");
        }
    }
    return true;
}

/// For each component Γ: V_level ∩ Γ is phi-vertex-expanding in Γ (induced on V_{<= level}).
inline HierarchyCheck verify_vertex_hierarchy(const Graph& g, const VertexLevelAssignment& a, Rational phi,
                                              std::size_t max_component = SIZE_MAX)
{
    HierarchyCheck res;
    for (const auto& c : a.components) {
        if (c.vertices.size() > max_component) continue;
        Subgraph sub = induced_subgraph(g, c.vertices);
        std::vector<char> in_x(sub.graph.n());
        for (Vertex v = 0; v < sub.graph.n(); ++v) in_x[v] = a.level[sub.vertices[v]] == c.level;
        auto w = verify_vertex_expanding(sub.graph, in_x, phi);
        if (!w.expanding) {
            res.ok = false;
            res.level = c.level;
            res.component = c.vertices;
            for (Vertex v : w.separator) res.witness.push_back(sub.vertices[v]);
            return res;
        }
    }
    return res;
}

} // namespace ftconn
