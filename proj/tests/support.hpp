#pragma once

#include <random>
#include <set>

#include "ftconn/graph.hpp"

namespace ftconn::testkit {

/// G(n, p) conditioned on connectivity by adding a random spanning path first when asked.
inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng, bool connected = true)
{
    std::vector<Edge> edges;
    std::bernoulli_distribution coin(p);
    std::set<std::pair<Vertex, Vertex>> have;
    if (connected && n > 1) {
        std::vector<Vertex> perm(n);
        std::iota(perm.begin(), perm.end(), Vertex{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 1; i < n; ++i) {
            // random tree: attach to an earlier vertex
            Vertex a = perm[i], b = perm[rng() % i];
            edges.push_back({a, b});
            have.insert({std::min(a, b), std::max(a, b)});
        }
    }
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (!have.count({u, v}) && coin(rng)) edges.push_back({u, v});
    std::shuffle(edges.begin(), edges.end(), rng);
    return Graph(n, edges);
}

/// Connected graph with maximum degree at most 3.
inline Graph random_degree3_graph(std::size_t n, std::size_t extra, std::mt19937_64& rng)
{
    Graph g(n);
    std::vector<std::size_t> deg(n, 0);
    std::set<std::pair<Vertex, Vertex>> have;
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<Vertex> cand;
        for (Vertex j = 0; j < i; ++j)
            if (deg[j] < 3) cand.push_back(j);
        Vertex b = cand[rng() % cand.size()];
        g.add_edge(Vertex(i), b);
        ++deg[i];
        ++deg[b];
        have.insert({b, Vertex(i)});
    }
    for (std::size_t t = 0; t < extra * 8 && extra > 0; ++t) {
        Vertex a = Vertex(rng() % n), b = Vertex(rng() % n);
        if (a == b || deg[a] >= 3 || deg[b] >= 3 || have.count({std::min(a, b), std::max(a, b)})) continue;
        g.add_edge(a, b);
        ++deg[a];
        ++deg[b];
        have.insert({std::min(a, b), std::max(a, b)});
        if (--extra == 0) break;
    }
    return g;
}

/// Random simple 3-regular graph by the pairing model with restarts.
inline Graph random_cubic_graph(std::size_t n, std::mt19937_64& rng)
{
    while (true) {
        std::vector<Vertex> points;
        for (Vertex v = 0; v < n; ++v)
            for (int k = 0; k < 3; ++k) points.push_back(v);
        std::shuffle(points.begin(), points.end(), rng);
        std::set<std::pair<Vertex, Vertex>> have;
        bool ok = true;
        std::vector<Edge> edges;
        for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
            Vertex a = std::min(points[i], points[i + 1]), b = std::max(points[i], points[i + 1]);
            if (a == b || have.count({a, b})) {
                ok = false;
                break;
            }
            have.insert({a, b});
            edges.push_back({a, b});
        }
        if (!ok) continue;
        Graph g(n, edges);
        if (bfs_components(g).count == 1) return g;
    }
}

inline std::vector<EdgeId> random_faults(const Graph& g, std::size_t k, std::mt19937_64& rng)
{
    std::vector<EdgeId> all(g.m());
    std::iota(all.begin(), all.end(), EdgeId{0});
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(k, all.size()));
    return all;
}

/// Independent reachability check by DFS over surviving edges.
inline bool dfs_connected(const Graph& g, const std::vector<char>& dead, Vertex s, Vertex t)
{
    std::vector<char> seen(g.n(), 0);
    std::vector<Vertex> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
        Vertex x = stack.back();
        stack.pop_back();
        if (x == t) return true;
        for (const Incidence& inc : g.adj(x))
            if (!dead[inc.edge] && !seen[inc.to]) {
                seen[inc.to] = 1;
                stack.push_back(inc.to);
            }
    }
    return false;
}

} // namespace ftconn::testkit
