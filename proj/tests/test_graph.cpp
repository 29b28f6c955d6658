#include <gtest/gtest.h>

#include "ftconn/graph.hpp"
#include "support.hpp"

using namespace ftconn;

TEST(LoadGraph, Triangle)
{
    Graph g = load_graph("3 3\n0 1\n1 2\n0 2\n");
    EXPECT_EQ(g.n(), 3u);
    EXPECT_EQ(g.m(), 3u);
    EXPECT_EQ(g.edge(2).u, 0u);
    EXPECT_EQ(g.edge(2).v, 2u);
    EXPECT_EQ(g.degree(1), 2u);
}

TEST(LoadGraph, IsolatedVertices)
{
    Graph g = load_graph("2 0\n");
    EXPECT_EQ(g.n(), 2u);
    EXPECT_EQ(g.m(), 0u);
}

TEST(LoadGraph, PathWithComments)
{
    Graph g = load_graph("# P4\n4 3\n0 1\n# middle\n1 2\n2 3\n");
    EXPECT_EQ(g.m(), 3u);
    EXPECT_EQ(g.edge(1).u, 1u);
}

TEST(LoadGraph, ErrorsNameTheLine)
{
    auto expect_line = [](const std::string& text, const std::string& needle) {
        try {
            load_graph(text);
            FAIL() << "no error for " << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::parse);
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_line("3 2\n0 1\n1 x\n", "line 3");
    expect_line("3 1\n0 3\n", "line 2");
    expect_line("3 1\n1 1\n", "self-loop");
    expect_line("3 2\n0 1\n", "missing edge");
}

TEST(LoadGraph, ParallelEdgesKeepDistinctIds)
{
    Graph g = load_graph("2 2\n0 1\n1 0\n");
    EXPECT_EQ(g.m(), 2u);
    EXPECT_EQ(g.adj(0).size(), 2u);
    EXPECT_NE(g.adj(0)[0].edge, g.adj(0)[1].edge);
}

TEST(FaultSet, RejectsDuplicatesAndRange)
{
    Graph g = load_graph("3 2\n0 1\n1 2\n");
    EXPECT_THROW(FaultSet(g, {0, 0}), Error);
    EXPECT_THROW(FaultSet(g, {2}), Error);
    EXPECT_NO_THROW(FaultSet(g, {1, 0}));
}

TEST(Oracle, SmallCases)
{
    Graph tri = load_graph("3 3\n0 1\n1 2\n0 2\n");
    EXPECT_EQ(oracle_components(tri, {}).count, 1u);
    Graph p4 = load_graph("4 3\n0 1\n1 2\n2 3\n");
    Components c = oracle_components(p4, FaultSet(p4, {1}));
    EXPECT_EQ(c.count, 2u);
    EXPECT_TRUE(c.connected(0, 1));
    EXPECT_TRUE(c.connected(2, 3));
    EXPECT_FALSE(c.connected(1, 2));
}

TEST(Oracle, MatchesIndependentSearch)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        Graph g = testkit::random_graph(20, 0.3, rng, trial % 2 == 0);
        FaultSet f(g, testkit::random_faults(g, 5, rng));
        Components c = oracle_components(g, f);
        auto dead = f.mask(g.m());
        std::vector<char> keep(g.m());
        for (EdgeId e = 0; e < g.m(); ++e) keep[e] = !dead[e];
        Components b = bfs_components(g, keep);
        EXPECT_EQ(b.count, c.count);
        for (Vertex s = 0; s < g.n(); ++s)
            for (Vertex t = 0; t < g.n(); ++t) {
                bool expect = testkit::dfs_connected(g, dead, s, t);
                ASSERT_EQ(c.connected(s, t), expect);
                ASSERT_EQ(b.connected(s, t), expect);
            }
    }
}

TEST(Reduction, StarCenterBecomesCycle)
{
    Graph star = load_graph("4 3\n0 1\n0 2\n0 3\n");
    auto r = reduce_degree3(star);
    EXPECT_EQ(r.reduced.max_degree(), 3u);
    EXPECT_EQ(r.reduced.n(), 6u);
    EXPECT_EQ(r.reduced.m(), 6u);
}

TEST(Reduction, PathUnchanged)
{
    Graph p3 = load_graph("3 2\n0 1\n1 2\n");
    auto r = reduce_degree3(p3);
    EXPECT_EQ(r.reduced.n(), 3u);
    EXPECT_EQ(r.reduced.m(), 2u);
    for (EdgeId e = 0; e < 2; ++e) {
        EXPECT_EQ(r.reduced.edge(r.edge_map[e]).u, p3.edge(e).u);
        EXPECT_EQ(r.reduced.edge(r.edge_map[e]).v, p3.edge(e).v);
    }
}

namespace {

void expect_reduction_preserves(const Graph& g, const std::vector<std::vector<EdgeId>>& fault_sets)
{
    auto r = reduce_degree3(g);
    EXPECT_LE(r.reduced.max_degree(), 3u);
    for (const auto& ids : fault_sets) {
        Components orig = oracle_components(g, FaultSet(g, ids));
        std::vector<EdgeId> mapped;
        for (EdgeId e : ids) mapped.push_back(r.edge_map[e]);
        Components red = oracle_components(r.reduced, FaultSet(r.reduced, mapped));
        for (Vertex s = 0; s < g.n(); ++s)
            for (Vertex t = 0; t < g.n(); ++t)
                ASSERT_EQ(orig.connected(s, t), red.connected(r.vertex_map[s], r.vertex_map[t]));
    }
}

} // namespace

TEST(Reduction, K4AllSingleFaults)
{
    Graph k4 = load_graph("4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    auto r = reduce_degree3(k4);
    EXPECT_EQ(r.reduced.n(), 12u);
    EXPECT_EQ(r.reduced.max_degree(), 3u);
    std::vector<std::vector<EdgeId>> sets;
    for (EdgeId e = 0; e < 6; ++e) sets.push_back({e});
    expect_reduction_preserves(k4, sets);
}

TEST(Reduction, RandomGraphsPreserveConnectivity)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = testkit::random_graph(12, 0.35, rng, trial % 3 != 0);
        if (g.m() == 0) continue;
        std::size_t half_degree_sum = 0;
        for (Vertex v = 0; v < g.n(); ++v) half_degree_sum += g.degree(v) >= 3 ? g.degree(v) : 1;
        EXPECT_EQ(reduce_degree3(g).reduced.n(), half_degree_sum);
        std::vector<std::vector<EdgeId>> sets;
        for (int k = 0; k < 20; ++k) sets.push_back(testkit::random_faults(g, 1 + k % 4, rng));
        expect_reduction_preserves(g, sets);
    }
}

TEST(Subgraph, InducedKeepsMapping)
{
    Graph g = load_graph("5 5\n0 1\n1 2\n2 3\n3 4\n0 4\n");
    Subgraph s = induced_subgraph(g, {1, 2, 3});
    EXPECT_EQ(s.graph.n(), 3u);
    EXPECT_EQ(s.graph.m(), 2u);
    for (EdgeId e = 0; e < s.graph.m(); ++e) {
        Edge a = s.graph.edge(e), b = g.edge(s.edge_ids[e]);
        EXPECT_EQ(std::minmax(s.vertices[a.u], s.vertices[a.v]), std::minmax(b.u, b.v));
    }
}
