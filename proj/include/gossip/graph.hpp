#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gossip {

using NodeId = std::size_t;
using EdgeId = std::size_t;

/// Undirected edge stored with u < v.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Invalid graph structure (self-loop, duplicate, disconnected, ...).
class GraphError : public std::invalid_argument {
public:
    explicit GraphError(const std::string& what, std::size_t component_count = 0)
        : std::invalid_argument(what), component_count_(component_count)
    {
    }

    /// Number of connected components found when the graph was rejected as
    /// disconnected; 0 for other failures.
    std::size_t component_count() const noexcept { return component_count_; }

private:
    std::size_t component_count_;
};

/// Malformed edge-list input.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Connected, simple, undirected graph on nodes 0..n-1.
///
/// The constructor canonicalizes every edge to (min, max) and sorts the edge
/// list lexicographically; the resulting position of an edge is its EdgeId and
/// fixes the row order of the incidence matrix.
class Graph {
public:
    Graph(std::size_t num_nodes, std::vector<Edge> edges);

    std::size_t num_nodes() const noexcept { return n_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }

    /// Index of edge {a, b}; throws GraphError if absent.
    EdgeId edge_index(NodeId a, NodeId b) const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
};

Graph make_ring(std::size_t n);
Graph make_grid(std::size_t rows, std::size_t cols);
Graph make_path(std::size_t n);
Graph make_complete(std::size_t n);

/// Edge list: one "i j" pair per line, '#' starts a comment, blank lines
/// ignored. The node count is one past the largest index seen.
Graph read_edge_list(std::istream& in);
Graph load_edge_list(const std::filesystem::path& path);

/// "ring:30", "grid:4x4", "path:10", "complete:8", "file:PATH".
Graph graph_from_spec(std::string_view spec);

/// Node set of one connected piece of a selected-edge subgraph, ascending.
struct Component {
    std::vector<NodeId> nodes;

    friend bool operator==(const Component&, const Component&) = default;
};

/// Union-find over node ids that only resets the nodes it touched, so it can
/// be reused every gossip step at O(|selected|) cost.
class ComponentFinder {
public:
    explicit ComponentFinder(std::size_t num_nodes);

    /// Components of the subgraph formed by `selected`, ordered by smallest
    /// node. Nodes not incident to a selected edge are omitted.
    void find(const Graph& g, std::span<const EdgeId> selected, std::vector<Component>& out);

private:
    NodeId root(NodeId x);

    std::vector<NodeId> parent_;
    std::vector<std::size_t> slot_;
    std::vector<NodeId> touched_;
};

std::vector<Component> components(const Graph& g, std::span<const EdgeId> selected);

/// Number of connected components of (n, edges), isolated nodes included.
std::size_t count_components(std::size_t num_nodes, std::span<const Edge> edges);

} // namespace gossip
