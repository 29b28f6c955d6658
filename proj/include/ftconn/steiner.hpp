#pragma once

#include <deque>
#include <functional>
#include <map>

#include "expander_hierarchy.hpp"

namespace ftconn {

/// Toughness |S| / c_{G-S}(X) as an exact fraction; den = 0 encodes +infinity.
struct Toughness {
    std::uint64_t num = 1, den = 0;
    std::vector<Vertex> witness; // minimizing S

    bool infinite() const { return den == 0; }
    /// this >= a/b
    bool at_least(std::uint64_t a, std::uint64_t b) const { return infinite() || num * b >= a * den; }
};

namespace detail {

/// Components of G - S that contain a vertex of X.
inline std::size_t terminal_components(const Graph& g, const std::vector<char>& in_x, const std::vector<char>& removed)
{
    std::size_t c = 0;
    for (const auto& comp : components_without(g, removed))
        c += std::any_of(comp.begin(), comp.end(), [&](Vertex v) { return in_x[v]; });
    return c;
}

} // namespace detail

/// Exact toughness of X in G by enumerating every S.
inline Toughness toughness(const Graph& g, const std::vector<char>& in_x)
{
    detail::check_size(g.n());
    std::size_t n = g.n();
    Toughness best;
    std::vector<char> removed(n);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        std::uint64_t s = 0;
        for (std::size_t v = 0; v < n; ++v) {
            removed[v] = mask >> v & 1;
            s += removed[v];
        }
        std::size_t c = detail::terminal_components(g, in_x, removed);
        if (c < 2) continue;
        if (best.infinite() || s * best.den < best.num * c) {
            best.num = s;
            best.den = c;
            best.witness = detail::mask_members(mask, n);
        }
    }
    return best;
}

/// Checks on one instance that 3*phi-vertex-expansion implies phi-toughness.
inline bool expanding_implies_tough_check(const Graph& g, const std::vector<char>& in_x, Rational phi)
{
    Rational three{3 * phi.num, phi.den};
    if (!verify_vertex_expanding(g, in_x, three).expanding) return true;
    return toughness(g, in_x).at_least(phi.num, phi.den);
}

struct SteinerTree {
    std::vector<EdgeId> edges;
    std::vector<Vertex> vertices;
    std::vector<Vertex> residual; // B: every member has tree degree >= max_degree - 1
    std::size_t max_degree = 0;
};

namespace detail {

class SteinerImprover {
public:
    SteinerImprover(const Graph& g, const std::vector<char>& in_x) : g_(g), in_x_(in_x), in_tree_(g.n(), 0), adj_(g.n())
    {
        Vertex s = Vertex(std::find(in_x.begin(), in_x.end(), 1) - in_x.begin());
        std::vector<char> seen(g.n(), 0);
        std::vector<Vertex> queue{s};
        seen[s] = 1;
        in_tree_[s] = 1;
        for (std::size_t i = 0; i < queue.size(); ++i)
            for (const Incidence& inc : g.adj(queue[i]))
                if (!seen[inc.to]) {
                    seen[inc.to] = 1;
                    queue.push_back(inc.to);
                    link(queue[i], inc.to, inc.edge);
                }
        for (Vertex v = 0; v < g.n(); ++v)
            if (in_x[v] && !seen[v]) throw Error(ErrorKind::invalid, "terminals are not connected");
        prune();
    }

    SteinerTree run()
    {
        while (improve()) prune();
        SteinerTree t;
        for (Vertex v = 0; v < g_.n(); ++v) {
            if (!in_tree_[v]) continue;
            t.vertices.push_back(v);
            t.max_degree = std::max(t.max_degree, adj_[v].size());
            for (auto [w, e] : adj_[v])
                if (v < w) t.edges.push_back(e);
        }
        std::sort(t.edges.begin(), t.edges.end());
        t.edges.erase(std::unique(t.edges.begin(), t.edges.end()), t.edges.end());
        t.residual = residual_;
        return t;
    }

private:
    using Path = std::vector<std::pair<Vertex, EdgeId>>; // (vertex, edge to the next vertex); last edge unused

    void link(Vertex a, Vertex b, EdgeId e)
    {
        in_tree_[a] = in_tree_[b] = 1;
        adj_[a].push_back({b, e});
        adj_[b].push_back({a, e});
    }

    void unlink(Vertex a, Vertex b)
    {
        auto drop = [](auto& list, Vertex x) {
            auto it = std::find_if(list.begin(), list.end(), [&](auto& p) { return p.first == x; });
            list.erase(it);
        };
        drop(adj_[a], b);
        drop(adj_[b], a);
    }

    void prune()
    {
        std::vector<Vertex> leaves;
        for (Vertex v = 0; v < g_.n(); ++v)
            if (in_tree_[v] && !in_x_[v] && adj_[v].size() <= 1) leaves.push_back(v);
        while (!leaves.empty()) {
            Vertex v = leaves.back();
            leaves.pop_back();
            if (!in_tree_[v] || in_x_[v] || adj_[v].size() > 1) continue;
            in_tree_[v] = 0;
            if (adj_[v].empty()) continue;
            Vertex w = adj_[v][0].first;
            unlink(v, w);
            if (!in_x_[w] && adj_[w].size() <= 1) leaves.push_back(w);
        }
    }

    /// Tree path from a to b as a vertex list.
    std::vector<Vertex> tree_path(Vertex a, Vertex b) const
    {
        std::vector<Vertex> parent(g_.n(), Vertex(-1));
        std::vector<Vertex> queue{a};
        parent[a] = a;
        for (std::size_t i = 0; i < queue.size() && parent[b] == Vertex(-1); ++i)
            for (auto [w, e] : adj_[queue[i]])
                if (parent[w] == Vertex(-1)) {
                    parent[w] = queue[i];
                    queue.push_back(w);
                }
        if (parent[b] == Vertex(-1)) return {};
        std::vector<Vertex> out{b};
        while (out.back() != a) out.push_back(parent[out.back()]);
        std::reverse(out.begin(), out.end());
        return out;
    }

    /// Swaps in path p and drops the cycle edge next to w. False when p no longer closes a cycle through w.
    bool swap_in(const Path& p, Vertex w)
    {
        Vertex a = p.front().first, b = p.back().first;
        if (!in_tree_[a] || !in_tree_[b]) return false;
        for (std::size_t i = 1; i + 1 < p.size(); ++i)
            if (in_tree_[p[i].first]) return false;
        auto cyc = tree_path(a, b);
        auto it = std::find(cyc.begin(), cyc.end(), w);
        if (it == cyc.end()) return false;
        Vertex nb = it + 1 != cyc.end() ? *(it + 1) : *(it - 1);
        unlink(w, nb);
        for (std::size_t i = 0; i + 1 < p.size(); ++i) link(p[i].first, p[i + 1].first, p[i].second);
        return true;
    }

    /// One improvement at the current maximum degree, with the blocking-set search. False when none exists;
    /// residual_ then holds the final blocking set.
    bool improve()
    {
        std::size_t n = g_.n(), k = 0;
        for (Vertex v = 0; v < n; ++v)
            if (in_tree_[v]) k = std::max(k, adj_[v].size());
        std::vector<char> blocked(n, 0);
        for (Vertex v = 0; v < n; ++v) blocked[v] = in_tree_[v] && k >= 2 && adj_[v].size() + 1 >= k;
        std::map<Vertex, Path> stored;
        while (true) {
            // groups: components of T - blocked
            std::vector<std::uint32_t> group(n, UINT32_MAX);
            std::uint32_t groups = 0;
            for (Vertex s = 0; s < n; ++s) {
                if (!in_tree_[s] || blocked[s] || group[s] != UINT32_MAX) continue;
                std::vector<Vertex> stack{s};
                group[s] = groups;
                while (!stack.empty()) {
                    Vertex x = stack.back();
                    stack.pop_back();
                    for (auto [w, e] : adj_[x])
                        if (!blocked[w] && group[w] == UINT32_MAX) {
                            group[w] = groups;
                            stack.push_back(w);
                        }
                }
                ++groups;
            }
            auto p = connecting_path(group, blocked);
            if (!p) {
                residual_.clear();
                for (Vertex v = 0; v < n; ++v)
                    if (blocked[v]) residual_.push_back(v);
                return false;
            }
            auto cyc = tree_path(p->front().first, p->back().first);
            std::vector<Vertex> on_cycle;
            for (Vertex v : cyc)
                if (blocked[v]) on_cycle.push_back(v);
            auto top = std::find_if(on_cycle.begin(), on_cycle.end(), [&](Vertex v) { return adj_[v].size() == k; });
            if (top == on_cycle.end()) {
                for (Vertex v : on_cycle) {
                    blocked[v] = 0;
                    stored[v] = *p;
                }
                continue;
            }
            auto saved_adj = adj_;
            auto saved_in = in_tree_;
            if (apply_cascade(*p, *top, k, stored)) return true;
            adj_ = std::move(saved_adj);
            in_tree_ = std::move(saved_in);
            throw Error(ErrorKind::invalid, "steiner improvement cascade failed");
        }
    }

    bool apply_cascade(const Path& p, Vertex w, std::size_t k, const std::map<Vertex, Path>& stored)
    {
        std::deque<std::pair<const Path*, Vertex>> todo{{&p, w}};
        std::size_t guard = 0;
        while (!todo.empty()) {
            if (++guard > 4 * g_.n() + 8) return false;
            auto [path, at] = todo.front();
            todo.pop_front();
            if (!swap_in(*path, at)) return false;
            for (Vertex end : {path->front().first, path->back().first})
                if (adj_[end].size() >= k) {
                    auto it = stored.find(end);
                    if (it == stored.end()) return false;
                    todo.push_back({&it->second, end});
                }
        }
        return true;
    }

    /// Shortest path between two different groups whose interior avoids the tree.
    std::optional<Path> connecting_path(const std::vector<std::uint32_t>& group, const std::vector<char>& blocked) const
    {
        std::size_t n = g_.n();
        std::vector<std::uint32_t> label(n, UINT32_MAX);
        std::vector<std::pair<Vertex, EdgeId>> from(n, {Vertex(-1), 0});
        std::vector<Vertex> queue;
        for (Vertex v = 0; v < n; ++v)
            if (group[v] != UINT32_MAX) {
                label[v] = group[v];
                queue.push_back(v);
            }
        auto trace = [&](Vertex v) {
            Path out;
            while (true) {
                out.push_back({v, 0});
                if (from[v].first == Vertex(-1)) break;
                out.back().second = from[v].second;
                v = from[v].first;
            }
            return out; // from v back to its source
        };
        for (std::size_t i = 0; i < queue.size(); ++i) {
            Vertex x = queue[i];
            for (const Incidence& inc : g_.adj(x)) {
                Vertex y = inc.to;
                if (blocked[y]) continue;
                bool y_free = !in_tree_[y];
                if (label[y] == UINT32_MAX && y_free) {
                    label[y] = label[x];
                    from[y] = {x, inc.edge};
                    queue.push_back(y);
                } else if (label[y] != UINT32_MAX && label[y] != label[x]) {
                    // source(x) ... x - y ... source(y)
                    Path left = trace(x), right = trace(y);
                    std::reverse(left.begin(), left.end());
                    // left currently holds (vertex, edge to the previous one); shift edges forward
                    Path out;
                    for (std::size_t j = 0; j < left.size(); ++j)
                        out.push_back({left[j].first, j + 1 < left.size() ? left[j + 1].second : inc.edge});
                    for (std::size_t j = 0; j < right.size(); ++j) out.push_back(right[j]);
                    return out;
                }
            }
        }
        return std::nullopt;
    }

    const Graph& g_;
    const std::vector<char>& in_x_;
    std::vector<char> in_tree_;
    std::vector<std::vector<std::pair<Vertex, EdgeId>>> adj_;
    std::vector<Vertex> residual_;
};

} // namespace detail

/// Steiner tree over X with near-minimum maximum degree, by local improvement with blocking sets.
inline SteinerTree low_degree_steiner(const Graph& g, const std::vector<char>& in_x)
{
    if (std::none_of(in_x.begin(), in_x.end(), [](char c) { return c; })) return {};
    return detail::SteinerImprover(g, in_x).run();
}

/// Smallest maximum degree of any Steiner tree over X, by backtracking over edge subsets.
inline std::size_t min_degree_steiner_exhaustive(const Graph& g, const std::vector<char>& in_x)
{
    detail::check_size(g.n());
    std::size_t n = g.n(), m = g.m();
    std::vector<Vertex> xs;
    for (Vertex v = 0; v < n; ++v)
        if (in_x[v]) xs.push_back(v);
    if (xs.size() <= 1) return 0;
    for (std::size_t d = 1; d < n; ++d) {
        std::vector<std::size_t> deg(n, 0);
        bool found = false;
        // chosen edges form a forest; success once all terminals share a tree
        std::function<void(EdgeId, DisjointSets)> go = [&](EdgeId e, DisjointSets ds) {
            if (found) return;
            bool done = true;
            for (Vertex x : xs)
                if (!ds.same(x, xs[0])) done = false;
            if (done) {
                found = true;
                return;
            }
            if (e == m) return;
            Edge ed = g.edge(e);
            if (ed.u != ed.v && deg[ed.u] < d && deg[ed.v] < d && !ds.same(ed.u, ed.v)) {
                DisjointSets next = ds;
                next.unite(ed.u, ed.v);
                ++deg[ed.u];
                ++deg[ed.v];
                go(e + 1, std::move(next));
                --deg[ed.u];
                --deg[ed.v];
            }
            go(e + 1, std::move(ds));
        };
        go(0, DisjointSets(n));
        if (found) return d;
    }
    throw Error(ErrorKind::invalid, "terminals are not connected");
}

/// Union of d successive scan-first (BFS) spanning forests; forest i is the i-th entry.
inline std::vector<std::vector<EdgeId>> ni_forests(const Graph& r, std::size_t d)
{
    std::vector<char> used(r.m(), 0);
    std::vector<std::vector<EdgeId>> forests;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<EdgeId> forest;
        std::vector<char> seen(r.n(), 0);
        for (Vertex s = 0; s < r.n(); ++s) {
            if (seen[s]) continue;
            seen[s] = 1;
            std::vector<Vertex> queue{s};
            for (std::size_t q = 0; q < queue.size(); ++q)
                for (const Incidence& inc : r.adj(queue[q]))
                    if (!used[inc.edge] && !seen[inc.to]) {
                        seen[inc.to] = 1;
                        used[inc.edge] = 1;
                        forest.push_back(inc.edge);
                        queue.push_back(inc.to);
                    }
        }
        forests.push_back(std::move(forest));
    }
    return forests;
}

/// Sparse subgraph preserving connectivity under fewer than d vertex deletions. Edge j of the result
/// is edge kept[j] of r.
struct Sparsified {
    Graph graph;
    std::vector<EdgeId> kept;
};

inline Sparsified ni_sparsify(const Graph& r, std::size_t d)
{
    if (d < 1) throw Error(ErrorKind::invalid, "d must be at least 1");
    Sparsified out;
    for (const auto& f : ni_forests(r, d)) out.kept.insert(out.kept.end(), f.begin(), f.end());
    std::sort(out.kept.begin(), out.kept.end());
    out.graph = Graph(r.n());
    for (EdgeId e : out.kept) out.graph.add_edge(r.edge(e).u, r.edge(e).v);
    return out;
}

} // namespace ftconn
