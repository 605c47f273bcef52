#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cml/errors.hpp"

namespace cml {

/// Sorted, duplicate-free list of node indices.
using NodeSet = std::vector<int>;

namespace nodeset {

NodeSet make(std::vector<int> nodes);
bool contains(const NodeSet& s, int v);
NodeSet unite(const NodeSet& a, const NodeSet& b);
NodeSet intersect(const NodeSet& a, const NodeSet& b);
NodeSet minus(const NodeSet& a, const NodeSet& b);
NodeSet without(const NodeSet& a, int v);
NodeSet with(const NodeSet& a, int v);
/// Membership mask of length p.
std::vector<char> mask(const NodeSet& s, int p);

}  // namespace nodeset

/// Edge endpoint mark. `None` marks an absent edge in the endpoint table.
enum class Mark : std::uint8_t { None = 0, Tail = 1, Arrow = 2, Circle = 3 };

char mark_code(Mark m);
Mark mark_from_code(char c);

struct Edge {
    int i;
    int j;
    Mark at_i;
    Mark at_j;

    bool operator==(const Edge&) const = default;
};

/// Endpoint-marked graph covering DAGs, MAGs, PAGs and CPDAGs.
///
/// Each unordered pair {i, j} is either absent or carries one mark per end.
/// `endpoint(i, j)` is the mark at j on the edge between i and j, so
/// i -> j has endpoint(i, j) == Arrow and endpoint(j, i) == Tail.
///
/// The endpoint table is dense (p*p bytes) up to `dense_limit` nodes and a
/// hash map above it; adjacency queries are O(1) either way.
class MixedGraph {
public:
    static constexpr int kDefaultDenseLimit = 4096;

    MixedGraph() = default;
    explicit MixedGraph(int p, std::vector<std::string> names = {}, int dense_limit = kDefaultDenseLimit);

    int size() const { return p_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int v) const;
    void set_names(std::vector<std::string> names);
    /// Index of the node called `name`, if any.
    std::optional<int> find(const std::string& name) const;

    bool adjacent(int i, int j) const { return endpoint(i, j) != Mark::None; }
    Mark endpoint(int i, int j) const;
    const std::vector<int>& neighbors(int v) const;
    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
    std::size_t num_edges() const { return num_edges_; }

    void set_edge(int i, int j, Mark at_i, Mark at_j);
    /// Sets the mark at j; the edge must exist.
    void set_endpoint(int i, int j, Mark at_j);
    void remove_edge(int i, int j);

    void add_directed(int from, int to) { set_edge(from, to, Mark::Tail, Mark::Arrow); }
    void add_undirected(int i, int j) { set_edge(i, j, Mark::Tail, Mark::Tail); }
    void add_bidirected(int i, int j) { set_edge(i, j, Mark::Arrow, Mark::Arrow); }

    /// i -> j
    bool is_directed(int i, int j) const {
        return endpoint(i, j) == Mark::Arrow && endpoint(j, i) == Mark::Tail;
    }
    bool is_undirected(int i, int j) const {
        return endpoint(i, j) == Mark::Tail && endpoint(j, i) == Mark::Tail;
    }
    bool is_bidirected(int i, int j) const {
        return endpoint(i, j) == Mark::Arrow && endpoint(j, i) == Mark::Arrow;
    }

    NodeSet parents(int v) const;
    NodeSet children(int v) const;
    bool has_circles() const;

    /// Edges with i < j, in lexicographic order.
    std::vector<Edge> edges() const;

    /// Same node count, only the edges with both ends in `nodes`.
    MixedGraph induced(const NodeSet& nodes) const;
    /// Same node count and adjacencies, every mark replaced by `m`.
    MixedGraph with_uniform_marks(Mark m) const;

    void check_node(int v) const;

    /// Structural equality: node count and endpoint marks. Names are metadata.
    friend bool operator==(const MixedGraph& a, const MixedGraph& b);

private:
    std::uint8_t raw(int i, int j) const;
    void put(int i, int j, std::uint8_t v);

    int p_ = 0;
    bool dense_ = true;
    std::vector<std::string> names_;
    std::vector<std::uint8_t> table_;
    std::unordered_map<std::uint64_t, std::uint8_t> sparse_;
    std::vector<std::vector<int>> adj_;
    std::size_t num_edges_ = 0;
};

/// Directed acyclic graph. Immutable once constructed; acyclicity is checked on construction.
class Dag {
public:
    Dag() = default;
    /// Throws CyclicInput when `edges` (from, to) contain a directed cycle.
    Dag(int p, const std::vector<std::pair<int, int>>& edges, std::vector<std::string> names = {});
    /// Throws InvalidArgument for non-directed edges and CyclicInput for cycles.
    static Dag from_graph(const MixedGraph& g);

    int size() const { return graph_.size(); }
    const MixedGraph& graph() const { return graph_; }
    const NodeSet& parents(int v) const { return parents_[static_cast<std::size_t>(v)]; }
    const NodeSet& children(int v) const { return children_[static_cast<std::size_t>(v)]; }
    const std::vector<int>& topological_order() const { return order_; }
    /// Directed edges sorted by (from, to).
    std::vector<std::pair<int, int>> edge_list() const;

private:
    MixedGraph graph_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    std::vector<int> order_;
};

/// Non-empty set of distinct target nodes.
class TargetSpec {
public:
    TargetSpec() = default;
    TargetSpec(std::vector<int> targets, int p);

    const NodeSet& nodes() const { return targets_; }
    std::size_t size() const { return targets_.size(); }
    auto begin() const { return targets_.begin(); }
    auto end() const { return targets_.end(); }

private:
    NodeSet targets_;
};

/// Topological order of the directed (Tail -> Arrow) part of g, or nullopt if it has a directed cycle.
std::optional<std::vector<int>> directed_topological_order(const MixedGraph& g);

}  // namespace cml
