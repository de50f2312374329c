#include <catch2/catch_amalgamated.hpp>

#include "gossip/graph.hpp"
#include "gossip/incidence.hpp"
#include "gossip/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>

using namespace gossip;

namespace {

// Reference component search: BFS over the selected-edge subgraph.
std::vector<Component> bfs_components(const Graph& g, const std::vector<EdgeId>& selected)
{
    std::vector<std::vector<NodeId>> adj(g.num_nodes());
    std::vector<char> touched(g.num_nodes(), 0);
    for (EdgeId e : selected) {
        const Edge& ed = g.edge(e);
        adj[ed.u].push_back(ed.v);
        adj[ed.v].push_back(ed.u);
        touched[ed.u] = touched[ed.v] = 1;
    }
    std::vector<char> seen(g.num_nodes(), 0);
    std::vector<Component> out;
    for (NodeId s = 0; s < g.num_nodes(); ++s) {
        if (!touched[s] || seen[s])
            continue;
        Component c;
        std::queue<NodeId> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            const NodeId x = q.front();
            q.pop();
            c.nodes.push_back(x);
            for (NodeId y : adj[x])
                if (!seen[y]) {
                    seen[y] = 1;
                    q.push(y);
                }
        }
        std::sort(c.nodes.begin(), c.nodes.end());
        out.push_back(std::move(c));
    }
    return out;
}

// Random connected graph: random spanning tree plus extra edges.
Graph random_connected(std::size_t n, double extra, std::mt19937_64& gen)
{
    std::vector<Edge> edges;
    std::set<std::pair<NodeId, NodeId>> have;
    for (NodeId v = 1; v < n; ++v) {
        const NodeId u = std::uniform_int_distribution<NodeId>(0, v - 1)(gen);
        edges.push_back({u, v});
        have.insert({u, v});
    }
    std::bernoulli_distribution coin(extra);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (!have.count({i, j}) && coin(gen))
                edges.push_back({i, j});
    std::shuffle(edges.begin(), edges.end(), gen);
    for (Edge& e : edges)
        if (gen() & 1)
            std::swap(e.u, e.v);
    return Graph(n, std::move(edges));
}

} // namespace

TEST_CASE("generators produce the expected sizes", "[graph]")
{
    const Graph ring = make_ring(30);
    CHECK(ring.num_nodes() == 30);
    CHECK(ring.num_edges() == 30);

    const Graph p2 = make_path(2);
    CHECK(p2.num_nodes() == 2);
    REQUIRE(p2.num_edges() == 1);
    CHECK(p2.edge(0) == Edge{0, 1});

    const Graph grid = make_grid(4, 4);
    CHECK(grid.num_nodes() == 16);
    CHECK(grid.num_edges() == 24);
    CHECK(make_grid(3, 5).num_edges() == 3 * 4 + 5 * 2);

    CHECK(make_complete(8).num_edges() == 28);
}

TEST_CASE("edge order is lexicographic and canonicalization is idempotent", "[graph]")
{
    std::mt19937_64 gen(11);
    for (int t = 0; t < 50; ++t) {
        const Graph g = random_connected(3 + static_cast<std::size_t>(t % 12), 0.3, gen);
        CHECK(std::is_sorted(g.edges().begin(), g.edges().end()));
        for (const Edge& e : g.edges())
            CHECK(e.u < e.v);
        const Graph again(g.num_nodes(), {g.edges().begin(), g.edges().end()});
        CHECK(again == g);
    }
    const Graph ring = make_ring(5);
    CHECK(ring.edge_index(4, 0) == ring.edge_index(0, 4));
    CHECK(ring.edge(ring.edge_index(3, 4)) == Edge{3, 4});
    CHECK_THROWS_AS(ring.edge_index(0, 2), GraphError);
}

TEST_CASE("invalid graphs are rejected", "[graph][errors]")
{
    CHECK_THROWS_AS(Graph(3, {{0, 0}, {0, 1}, {1, 2}}), GraphError);
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}, {1, 2}}), GraphError);
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 3}}), GraphError);
    CHECK_THROWS_AS(make_ring(2), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 4), std::invalid_argument);

    try {
        Graph(6, {{0, 1}, {2, 3}, {4, 5}});
        FAIL("disconnected graph accepted");
    } catch (const GraphError& e) {
        CHECK(e.component_count() == 3);
    }
}

TEST_CASE("edge-list parsing", "[graph][io]")
{
    SECTION("comments, blank lines and arbitrary orientation")
    {
        std::istringstream in("# a 4-cycle\n0 1\n\n2 1   # trailing comment\n3 2\n0 3\n");
        const Graph g = read_edge_list(in);
        CHECK(g == make_ring(4));
    }
    SECTION("malformed line reports its number")
    {
        std::istringstream in("0 1\n1 2\n1 x\n");
        try {
            read_edge_list(in);
            FAIL("malformed input accepted");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SECTION("wrong field count")
    {
        std::istringstream in("0 1 2\n");
        CHECK_THROWS_AS(read_edge_list(in), ParseError);
    }
    SECTION("disconnected input reports component count")
    {
        std::istringstream in("0 1\n2 3\n");
        try {
            read_edge_list(in);
            FAIL("disconnected input accepted");
        } catch (const GraphError& e) {
            CHECK(e.component_count() == 2);
        }
    }
}

TEST_CASE("graph specs", "[graph]")
{
    CHECK(graph_from_spec("ring:30") == make_ring(30));
    CHECK(graph_from_spec("grid:4x4") == make_grid(4, 4));
    CHECK(graph_from_spec("path:10") == make_path(10));
    CHECK(graph_from_spec("complete:8") == make_complete(8));
    CHECK_THROWS_AS(graph_from_spec("ring"), std::invalid_argument);
    CHECK_THROWS_AS(graph_from_spec("ring:abc"), std::invalid_argument);
    CHECK_THROWS_AS(graph_from_spec("grid:4"), std::invalid_argument);
    CHECK_THROWS_AS(graph_from_spec("star:5"), std::invalid_argument);
}

TEST_CASE("incidence matrix conventions", "[incidence]")
{
    SECTION("path(2)")
    {
        const IncidenceSystem sys(make_path(2));
        CHECK(sys.matrix() == linalg::DenseMatrix(1, 2, {1.0, -1.0}));
    }
    SECTION("triangle")
    {
        const IncidenceSystem sys(make_complete(3));
        CHECK(sys.matrix() == linalg::DenseMatrix(3, 3, {1, -1, 0, 1, 0, -1, 0, 1, -1}));
    }
    SECTION("rows sum to zero exactly and the rank is n - 1")
    {
        for (const Graph& g : {make_ring(9), make_grid(3, 3), make_complete(6), make_path(5)}) {
            const IncidenceSystem sys(g);
            const std::vector<double> ones(g.num_nodes(), 1.0);
            for (double v : sys.apply(ones))
                CHECK(v == 0.0);
            const auto eig = linalg::sym_eigen(sys.matrix().transpose() * sys.matrix());
            const double cut = linalg::zero_cutoff(eig.eigenvalues);
            CHECK(std::count_if(eig.eigenvalues.begin(), eig.eigenvalues.end(),
                                [cut](double l) { return l <= cut; })
                  == 1);
            // The null vector is constant.
            for (std::size_t i = 0; i < g.num_nodes(); ++i)
                CHECK(std::abs(eig.eigenvectors(i, 0)) == Catch::Approx(1.0 / std::sqrt(g.num_nodes())).margin(1e-10));
        }
    }
    SECTION("sparse products match the dense matrix")
    {
        const Graph g = make_grid(3, 4);
        const IncidenceSystem sys(g);
        std::vector<double> x(g.num_nodes()), y(g.num_edges());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = 0.5 * static_cast<double>(i * i) - 3.0;
        for (std::size_t e = 0; e < y.size(); ++e)
            y[e] = static_cast<double>(e) - 4.25;
        CHECK(sys.apply(x) == sys.matrix() * std::span<const double>(x));
        CHECK(sys.apply_transpose(y) == sys.matrix().transpose() * std::span<const double>(y));
    }
    SECTION("gram submatrix is the principal block of A A^T")
    {
        const Graph g = make_complete(5);
        const IncidenceSystem sys(g);
        const linalg::DenseMatrix full = sys.matrix() * sys.matrix().transpose();
        const std::vector<EdgeId> s{0, 3, 4, 7, 9};
        const linalg::DenseMatrix sub = sys.gram_submatrix(s);
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = 0; b < s.size(); ++b)
                CHECK(sub(a, b) == full(s[a], s[b]));
    }
}

TEST_CASE("gram_pseudoinverse matches pinv_psd", "[incidence][property]")
{
    std::mt19937_64 gen(5);
    for (int t = 0; t < 300; ++t) {
        const Graph g = random_connected(3 + static_cast<std::size_t>(t % 9), 0.35, gen);
        const IncidenceSystem sys(g);
        std::vector<EdgeId> all(g.num_edges());
        std::iota(all.begin(), all.end(), EdgeId{0});
        std::shuffle(all.begin(), all.end(), gen);
        const std::size_t tau = 1 + static_cast<std::size_t>(gen() % g.num_edges());
        std::vector<EdgeId> s(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(tau));
        std::sort(s.begin(), s.end());
        const auto pieces = components(g, s);
        const linalg::DenseMatrix fast = sys.gram_pseudoinverse(s, pieces);
        const linalg::DenseMatrix ref = linalg::pinv_psd(sys.gram_submatrix(s));
        CHECK(linalg::max_abs_diff(fast, ref) < 1e-10);
    }
}

TEST_CASE("components examples", "[graph][components]")
{
    const Graph ring6 = make_ring(6);
    const std::vector<EdgeId> two{ring6.edge_index(0, 1), ring6.edge_index(3, 4)};
    const auto comps = components(ring6, two);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].nodes == std::vector<NodeId>{0, 1});
    CHECK(comps[1].nodes == std::vector<NodeId>{3, 4});

    const Graph grid = make_grid(3, 3);
    std::vector<EdgeId> all(grid.num_edges());
    std::iota(all.begin(), all.end(), EdgeId{0});
    const auto whole = components(grid, all);
    REQUIRE(whole.size() == 1);
    CHECK(whole[0].nodes.size() == 9);

    // Three selected edges forming two pieces, as in the block-gossip picture:
    // a two-edge path 0-1-2 and a separate edge 4-5.
    const Graph net(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {0, 6}, {1, 5}, {2, 6}});
    const std::vector<EdgeId> three{net.edge_index(0, 1), net.edge_index(1, 2), net.edge_index(4, 5)};
    const auto pieces = components(net, three);
    REQUIRE(pieces.size() == 2);
    CHECK(pieces[0].nodes == std::vector<NodeId>{0, 1, 2});
    CHECK(pieces[1].nodes == std::vector<NodeId>{4, 5});

    CHECK_THROWS_AS(components(ring6, std::vector<EdgeId>{}), std::invalid_argument);
    CHECK_THROWS_AS(components(ring6, std::vector<EdgeId>{6}), std::out_of_range);
}

TEST_CASE("union-find components agree with BFS", "[graph][components][property]")
{
    std::mt19937_64 gen(1234);
    for (int t = 0; t < 1000; ++t) {
        const Graph g = random_connected(2 + static_cast<std::size_t>(gen() % 15), 0.2, gen);
        std::vector<EdgeId> s;
        for (EdgeId e = 0; e < g.num_edges(); ++e)
            if (gen() % 3 == 0)
                s.push_back(e);
        if (s.empty())
            s.push_back(static_cast<EdgeId>(gen() % g.num_edges()));
        const auto got = components(g, s);
        CHECK(got == bfs_components(g, s));

        // Pairwise disjoint, every piece has >= 2 nodes, union = endpoints.
        std::set<NodeId> endpoints, seen;
        for (EdgeId e : s) {
            endpoints.insert(g.edge(e).u);
            endpoints.insert(g.edge(e).v);
        }
        for (const Component& c : got) {
            CHECK(c.nodes.size() >= 2);
            for (NodeId x : c.nodes)
                CHECK(seen.insert(x).second);
        }
        CHECK(seen == endpoints);
    }
}

TEST_CASE("ComponentFinder reuse leaves no stale state", "[graph][components]")
{
    const Graph g = make_grid(4, 4);
    ComponentFinder finder(g.num_nodes());
    std::vector<Component> out;
    std::mt19937_64 gen(9);
    for (int t = 0; t < 200; ++t) {
        std::vector<EdgeId> s;
        for (EdgeId e = 0; e < g.num_edges(); ++e)
            if (gen() % 4 == 0)
                s.push_back(e);
        if (s.empty())
            s.push_back(0);
        finder.find(g, s, out);
        CHECK(out == bfs_components(g, s));
    }
}
