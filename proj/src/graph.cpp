#include "gossip/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

namespace gossip {

namespace {

    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    std::size_t parse_count(std::string_view text, std::string_view what)
    {
        std::size_t value = 0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (ec != std::errc{} || ptr != end || text.empty())
            throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(text)
                                        + "'");
        return value;
    }

    void require_nodes(std::string_view kind, std::size_t n, std::size_t min)
    {
        if (n < min)
            throw std::invalid_argument(std::string(kind) + " graph needs at least "
                                        + std::to_string(min) + " nodes, got "
                                        + std::to_string(n));
    }

} // namespace

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges) : n_(num_nodes), edges_(std::move(edges))
{
    if (n_ < 2)
        throw GraphError("graph must have at least 2 nodes");
    for (Edge& e : edges_) {
        if (e.u >= n_ || e.v >= n_)
            throw GraphError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v)
                             + ") references a node outside 0.." + std::to_string(n_ - 1));
        if (e.u == e.v)
            throw GraphError("self-loop at node " + std::to_string(e.u));
        if (e.u > e.v)
            std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end());
    const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
    if (dup != edges_.end())
        throw GraphError("duplicate edge (" + std::to_string(dup->u) + ", " + std::to_string(dup->v)
                         + ")");
    const std::size_t pieces = count_components(n_, edges_);
    if (pieces != 1)
        throw GraphError("graph is disconnected: " + std::to_string(pieces) + " components", pieces);
}

EdgeId Graph::edge_index(NodeId a, NodeId b) const
{
    const Edge key{std::min(a, b), std::max(a, b)};
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key)
        throw GraphError("no edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    return static_cast<EdgeId>(it - edges_.begin());
}

Graph make_ring(std::size_t n)
{
    require_nodes("ring", n, 3);
    std::vector<Edge> edges;
    edges.reserve(n);
    for (NodeId i = 0; i < n; ++i)
        edges.push_back({i, (i + 1) % n});
    return Graph(n, std::move(edges));
}

Graph make_grid(std::size_t rows, std::size_t cols)
{
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("grid graph needs at least 2x2 nodes");
    std::vector<Edge> edges;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const NodeId v = r * cols + c;
            if (c + 1 < cols)
                edges.push_back({v, v + 1});
            if (r + 1 < rows)
                edges.push_back({v, v + cols});
        }
    }
    return Graph(rows * cols, std::move(edges));
}

Graph make_path(std::size_t n)
{
    require_nodes("path", n, 2);
    std::vector<Edge> edges;
    for (NodeId i = 0; i + 1 < n; ++i)
        edges.push_back({i, i + 1});
    return Graph(n, std::move(edges));
}

Graph make_complete(std::size_t n)
{
    require_nodes("complete", n, 2);
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            edges.push_back({i, j});
    return Graph(n, std::move(edges));
}

Graph read_edge_list(std::istream& in)
{
    std::vector<Edge> edges;
    std::size_t n = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;)
            tokens.push_back(tok);
        if (tokens.empty())
            continue;
        if (tokens.size() != 2)
            throw ParseError("expected two node indices, found " + std::to_string(tokens.size())
                                 + " fields",
                             lineno);
        NodeId ends[2];
        for (int k = 0; k < 2; ++k) {
            try {
                ends[k] = parse_count(tokens[k], "node index");
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), lineno);
            }
        }
        if (ends[0] == ends[1])
            throw ParseError("self-loop at node " + std::to_string(ends[0]), lineno);
        edges.push_back({ends[0], ends[1]});
        n = std::max({n, ends[0] + 1, ends[1] + 1});
    }
    if (edges.empty())
        throw ParseError("edge list contains no edges", lineno);
    return Graph(n, std::move(edges));
}

Graph load_edge_list(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open edge list '" + path.string() + "'");
    return read_edge_list(in);
}

Graph graph_from_spec(std::string_view spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw std::invalid_argument("graph spec '" + std::string(spec)
                                    + "' must look like kind:args (ring:30, grid:4x4, ...)");
    const std::string_view kind = spec.substr(0, colon);
    const std::string_view arg = spec.substr(colon + 1);
    if (kind == "ring")
        return make_ring(parse_count(arg, "ring size"));
    if (kind == "path")
        return make_path(parse_count(arg, "path size"));
    if (kind == "complete")
        return make_complete(parse_count(arg, "complete graph size"));
    if (kind == "grid") {
        const auto x = arg.find('x');
        if (x == std::string_view::npos)
            throw std::invalid_argument("grid spec must be grid:RxC, got '" + std::string(spec) + "'");
        return make_grid(parse_count(arg.substr(0, x), "grid rows"),
                         parse_count(arg.substr(x + 1), "grid columns"));
    }
    if (kind == "file")
        return load_edge_list(std::filesystem::path(std::string(arg)));
    throw std::invalid_argument("unknown graph kind '" + std::string(kind) + "'");
}

ComponentFinder::ComponentFinder(std::size_t num_nodes)
    : parent_(num_nodes), slot_(num_nodes, kNone)
{
    std::iota(parent_.begin(), parent_.end(), NodeId{0});
}

NodeId ComponentFinder::root(NodeId x)
{
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

void ComponentFinder::find(const Graph& g, std::span<const EdgeId> selected,
                           std::vector<Component>& out)
{
    if (selected.empty())
        throw std::invalid_argument("component search needs at least one selected edge");
    if (g.num_nodes() != parent_.size())
        throw std::invalid_argument("ComponentFinder sized for a different graph");

    touched_.clear();
    auto touch = [this](NodeId x) {
        // slot_ doubles as the "seen" marker until components are numbered.
        if (slot_[x] == kNone) {
            slot_[x] = 0;
            touched_.push_back(x);
        }
    };
    for (EdgeId e : selected) {
        if (e >= g.num_edges())
            throw std::out_of_range("edge index " + std::to_string(e) + " out of range");
        const Edge& ed = g.edges()[e];
        touch(ed.u);
        touch(ed.v);
        const NodeId a = root(ed.u);
        const NodeId b = root(ed.v);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }
    std::sort(touched_.begin(), touched_.end());

    // Ascending scan reaches every root before its members (root = smallest
    // node), so components come out ordered by smallest node.
    for (NodeId x : touched_)
        slot_[x] = kNone;
    std::size_t used = 0;
    for (NodeId x : touched_) {
        const NodeId r = root(x);
        if (slot_[r] == kNone) {
            slot_[r] = used;
            if (used < out.size())
                out[used].nodes.clear();
            else
                out.emplace_back();
            ++used;
        }
        out[slot_[r]].nodes.push_back(x);
    }
    out.resize(used);

    for (NodeId x : touched_) {
        parent_[x] = x;
        slot_[x] = kNone;
    }
}

std::vector<Component> components(const Graph& g, std::span<const EdgeId> selected)
{
    ComponentFinder finder(g.num_nodes());
    std::vector<Component> out;
    finder.find(g, selected, out);
    return out;
}

std::size_t count_components(std::size_t num_nodes, std::span<const Edge> edges)
{
    std::vector<NodeId> parent(num_nodes);
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto root = [&](NodeId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::size_t pieces = num_nodes;
    for (const Edge& e : edges) {
        const NodeId a = root(e.u);
        const NodeId b = root(e.v);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
            --pieces;
        }
    }
    return pieces;
}

} // namespace gossip
