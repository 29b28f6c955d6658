#pragma once

#include <istream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace ftconn {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
    Vertex u;
    Vertex v;
};

struct Incidence {
    Vertex to;
    EdgeId edge;
};

/// Undirected multigraph with stable edge ids. No self-loops.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : adj_(n) {}

    Graph(std::size_t n, const std::vector<Edge>& edges) : adj_(n)
    {
        for (const Edge& e : edges) add_edge(e.u, e.v);
    }

    EdgeId add_edge(Vertex u, Vertex v)
    {
        if (u >= adj_.size() || v >= adj_.size()) throw Error(ErrorKind::invalid, "edge endpoint out of range");
        if (u == v) throw Error(ErrorKind::invalid, "self-loop");
        EdgeId id = EdgeId(edges_.size());
        edges_.push_back({u, v});
        adj_[u].push_back({v, id});
        adj_[v].push_back({u, id});
        return id;
    }

    std::size_t n() const { return adj_.size(); }
    std::size_t m() const { return edges_.size(); }
    const Edge& edge(EdgeId e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Incidence>& adj(Vertex v) const { return adj_[v]; }
    std::size_t degree(Vertex v) const { return adj_[v].size(); }

    std::size_t max_degree() const
    {
        std::size_t d = 0;
        for (const auto& a : adj_) d = std::max(d, a.size());
        return d;
    }

    Vertex other(EdgeId e, Vertex x) const { return edges_[e].u == x ? edges_[e].v : edges_[e].u; }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> adj_;
};

/// Reads "n m" followed by m lines "u v". Lines starting with '#' are ignored.
inline Graph load_graph(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    auto next = [&](std::string& out) -> bool {
        while (std::getline(in, out)) {
            ++lineno;
            std::size_t p = out.find_first_not_of(" \t\r");
            if (p == std::string::npos || out[p] == '#') continue;
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + msg);
    };
    auto read_pair = [&](const std::string& text, long long& a, long long& b) {
        std::istringstream ss(text);
        std::string extra;
        if (!(ss >> a >> b) || (ss >> extra)) fail("expected two integers");
    };

    if (!next(line)) throw Error(ErrorKind::parse, "line 1: missing header \"n m\"");
    long long n = 0, m = 0;
    read_pair(line, n, m);
    if (n < 0 || m < 0 || n > (1ll << 30)) fail("bad header");
    Graph g{std::size_t(n)};
    for (long long i = 0; i < m; ++i) {
        if (!next(line)) throw Error(ErrorKind::parse, "line " + std::to_string(lineno + 1) + ": missing edge");
        long long u = 0, v = 0;
        read_pair(line, u, v);
        if (u < 0 || v < 0 || u >= n || v >= n) fail("vertex out of range");
        if (u == v) fail("self-loop");
        g.add_edge(Vertex(u), Vertex(v));
    }
    while (next(line)) fail("trailing content");
    return g;
}

inline Graph load_graph(const std::string& text)
{
    std::istringstream in(text);
    return load_graph(in);
}

inline std::string dump_graph(const Graph& g)
{
    std::ostringstream out;
    out << g.n() << ' ' << g.m() << '\n';
    for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
    return out.str();
}

/// Validated set of failed edge ids.
class FaultSet {
public:
    FaultSet() = default;
    FaultSet(const Graph& g, std::vector<EdgeId> ids) : ids_(std::move(ids))
    {
        std::vector<EdgeId> s = ids_;
        std::sort(s.begin(), s.end());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] >= g.m()) throw Error(ErrorKind::invalid, "fault id out of range");
            if (i > 0 && s[i] == s[i - 1]) throw Error(ErrorKind::invalid, "duplicate fault id");
        }
    }

    const std::vector<EdgeId>& ids() const { return ids_; }
    std::size_t size() const { return ids_.size(); }

    std::vector<char> mask(std::size_t m) const
    {
        std::vector<char> out(m, 0);
        for (EdgeId e : ids_) out[e] = 1;
        return out;
    }

private:
    std::vector<EdgeId> ids_;
};

/// Component id per vertex, numbered by smallest member.
struct Components {
    std::vector<std::uint32_t> id;
    std::uint32_t count = 0;

    bool connected(Vertex a, Vertex b) const { return id[a] == id[b]; }
};

inline Components canonical_components(DisjointSets& ds, std::size_t n)
{
    Components c;
    c.id.assign(n, 0);
    std::vector<std::uint32_t> label(n, UINT32_MAX);
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t r = ds.find(v);
        if (label[r] == UINT32_MAX) label[r] = c.count++;
        c.id[v] = label[r];
    }
    return c;
}

/// Ground truth: connected components of G - F by union-find.
inline Components oracle_components(const Graph& g, const FaultSet& f)
{
    std::vector<char> dead = f.mask(g.m());
    DisjointSets ds(g.n());
    for (EdgeId e = 0; e < g.m(); ++e)
        if (!dead[e]) ds.unite(g.edge(e).u, g.edge(e).v);
    return canonical_components(ds, g.n());
}

/// Components by BFS over edges with keep[e] != 0 (all edges when keep is empty).
inline Components bfs_components(const Graph& g, const std::vector<char>& keep = {})
{
    Components c;
    c.id.assign(g.n(), UINT32_MAX);
    std::vector<Vertex> queue;
    for (Vertex s = 0; s < g.n(); ++s) {
        if (c.id[s] != UINT32_MAX) continue;
        c.id[s] = c.count;
        queue.assign(1, s);
        for (std::size_t i = 0; i < queue.size(); ++i) {
            for (const Incidence& inc : g.adj(queue[i])) {
                if (!keep.empty() && !keep[inc.edge]) continue;
                if (c.id[inc.to] == UINT32_MAX) {
                    c.id[inc.to] = c.count;
                    queue.push_back(inc.to);
                }
            }
        }
        ++c.count;
    }
    return c;
}

/// Induced subgraph on `vertices` keeping edges with keep[e] (all if empty).
/// Local vertex i corresponds to vertices[i]; local edge j to edge_ids[j].
struct Subgraph {
    Graph graph;
    std::vector<Vertex> vertices;
    std::vector<EdgeId> edge_ids;
};

inline Subgraph induced_subgraph(const Graph& g, const std::vector<Vertex>& vertices,
                                 const std::vector<char>& keep = {})
{
    Subgraph s;
    s.vertices = vertices;
    s.graph = Graph(vertices.size());
    std::vector<std::uint32_t> local(g.n(), UINT32_MAX);
    for (std::size_t i = 0; i < vertices.size(); ++i) local[vertices[i]] = std::uint32_t(i);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (const Incidence& inc : g.adj(vertices[i])) {
            // each edge is taken once, from its lower local endpoint
            if (local[inc.to] == UINT32_MAX || local[inc.to] < i) continue;
            if (!keep.empty() && !keep[inc.edge]) continue;
            s.graph.add_edge(Vertex(i), local[inc.to]);
            s.edge_ids.push_back(inc.edge);
        }
    }
    return s;
}

struct Degree3Reduction {
    Graph reduced;
    std::vector<EdgeId> edge_map;   // original edge -> reduced edge
    std::vector<Vertex> vertex_map; // original vertex -> representative
};

/// Replaces every vertex of degree >= 3 by a cycle of length Deg(v), attaching each incident
/// edge to its own cycle vertex. Vertices of degree <= 2 are kept as they are.
inline Degree3Reduction reduce_degree3(const Graph& g)
{
    Degree3Reduction r;
    std::vector<Vertex> first(g.n());
    std::size_t count = 0;
    for (Vertex v = 0; v < g.n(); ++v) {
        first[v] = Vertex(count);
        count += g.degree(v) >= 3 ? g.degree(v) : 1;
    }
    r.reduced = Graph(count);
    r.vertex_map = first;
    // slot of each edge endpoint within its cycle
    auto endpoint = [&](Vertex v, std::size_t slot) -> Vertex {
        return g.degree(v) >= 3 ? Vertex(first[v] + slot) : first[v];
    };
    std::vector<std::pair<std::size_t, std::size_t>> slots(g.m());
    for (Vertex v = 0; v < g.n(); ++v) {
        const auto& a = g.adj(v);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EdgeId e = a[i].edge;
            if (g.edge(e).u == v) slots[e].first = i;
            else slots[e].second = i;
        }
    }
    r.edge_map.resize(g.m());
    for (EdgeId e = 0; e < g.m(); ++e) {
        const Edge& ed = g.edge(e);
        r.edge_map[e] = r.reduced.add_edge(endpoint(ed.u, slots[e].first), endpoint(ed.v, slots[e].second));
    }
    for (Vertex v = 0; v < g.n(); ++v) {
        std::size_t d = g.degree(v);
        if (d < 3) continue;
        for (std::size_t i = 0; i < d; ++i) r.reduced.add_edge(Vertex(first[v] + i), Vertex(first[v] + (i + 1) % d));
    }
    return r;
}

} // namespace ftconn
