#include "cml/graph.hpp"

#include <algorithm>
#include <string>

namespace cml {

namespace nodeset {

NodeSet make(std::vector<int> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

bool contains(const NodeSet& s, int v) { return std::binary_search(s.begin(), s.end(), v); }

NodeSet unite(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet intersect(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet minus(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet without(const NodeSet& a, int v) {
    NodeSet out;
    out.reserve(a.size());
    for (int x : a)
        if (x != v) out.push_back(x);
    return out;
}

NodeSet with(const NodeSet& a, int v) {
    NodeSet out = a;
    auto it = std::lower_bound(out.begin(), out.end(), v);
    if (it == out.end() || *it != v) out.insert(it, v);
    return out;
}

std::vector<char> mask(const NodeSet& s, int p) {
    std::vector<char> m(static_cast<std::size_t>(p), 0);
    for (int v : s) m[static_cast<std::size_t>(v)] = 1;
    return m;
}

}  // namespace nodeset

char mark_code(Mark m) {
    switch (m) {
        case Mark::Tail: return 't';
        case Mark::Arrow: return 'a';
        case Mark::Circle: return 'c';
        case Mark::None: break;
    }
    throw InvalidArgument("absent edge has no mark code");
}

Mark mark_from_code(char c) {
    switch (c) {
        case 't': return Mark::Tail;
        case 'a': return Mark::Arrow;
        case 'c': return Mark::Circle;
        default: break;
    }
    throw ParseError(std::string("unknown mark code '") + c + "'");
}

MixedGraph::MixedGraph(int p, std::vector<std::string> names, int dense_limit) : p_(p), adj_(static_cast<std::size_t>(p)) {
    if (p < 0) throw InvalidArgument("node count must be non-negative");
    dense_ = p <= dense_limit;
    if (dense_) table_.assign(static_cast<std::size_t>(p) * static_cast<std::size_t>(p), 0);
    set_names(std::move(names));
}

void MixedGraph::set_names(std::vector<std::string> names) {
    if (names.empty()) {
        names.reserve(static_cast<std::size_t>(p_));
        for (int v = 0; v < p_; ++v) names.push_back("X" + std::to_string(v + 1));
    }
    if (static_cast<int>(names.size()) != p_) throw InvalidArgument("name count does not match node count");
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("node names must be unique");
    names_ = std::move(names);
}

const std::string& MixedGraph::name(int v) const {
    check_node(v);
    return names_[static_cast<std::size_t>(v)];
}

std::optional<int> MixedGraph::find(const std::string& name) const {
    for (int v = 0; v < p_; ++v)
        if (names_[static_cast<std::size_t>(v)] == name) return v;
    return std::nullopt;
}

void MixedGraph::check_node(int v) const {
    if (v < 0 || v >= p_) throw InvalidArgument("node index " + std::to_string(v) + " out of range");
}

std::uint8_t MixedGraph::raw(int i, int j) const {
    if (dense_) return table_[static_cast<std::size_t>(i) * static_cast<std::size_t>(p_) + static_cast<std::size_t>(j)];
    auto it = sparse_.find((static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j));
    return it == sparse_.end() ? 0 : it->second;
}

void MixedGraph::put(int i, int j, std::uint8_t v) {
    if (dense_) {
        table_[static_cast<std::size_t>(i) * static_cast<std::size_t>(p_) + static_cast<std::size_t>(j)] = v;
        return;
    }
    auto key = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
    if (v == 0)
        sparse_.erase(key);
    else
        sparse_[key] = v;
}

Mark MixedGraph::endpoint(int i, int j) const {
    check_node(i);
    check_node(j);
    return static_cast<Mark>(raw(i, j));
}

const std::vector<int>& MixedGraph::neighbors(int v) const {
    check_node(v);
    return adj_[static_cast<std::size_t>(v)];
}

void MixedGraph::set_edge(int i, int j, Mark at_i, Mark at_j) {
    check_node(i);
    check_node(j);
    if (i == j) throw InvalidArgument("self-loops are not allowed");
    if (at_i == Mark::None || at_j == Mark::None) throw InvalidArgument("edge marks must be Tail, Arrow or Circle");
    if (raw(i, j) == 0) {
        auto& ai = adj_[static_cast<std::size_t>(i)];
        auto& aj = adj_[static_cast<std::size_t>(j)];
        ai.insert(std::lower_bound(ai.begin(), ai.end(), j), j);
        aj.insert(std::lower_bound(aj.begin(), aj.end(), i), i);
        ++num_edges_;
    }
    put(i, j, static_cast<std::uint8_t>(at_j));
    put(j, i, static_cast<std::uint8_t>(at_i));
}

void MixedGraph::set_endpoint(int i, int j, Mark at_j) {
    check_node(i);
    check_node(j);
    if (raw(i, j) == 0) throw InvalidArgument("set_endpoint on an absent edge");
    if (at_j == Mark::None) throw InvalidArgument("use remove_edge to delete an edge");
    put(i, j, static_cast<std::uint8_t>(at_j));
}

void MixedGraph::remove_edge(int i, int j) {
    check_node(i);
    check_node(j);
    if (raw(i, j) == 0) return;
    put(i, j, 0);
    put(j, i, 0);
    auto& ai = adj_[static_cast<std::size_t>(i)];
    auto& aj = adj_[static_cast<std::size_t>(j)];
    ai.erase(std::lower_bound(ai.begin(), ai.end(), j));
    aj.erase(std::lower_bound(aj.begin(), aj.end(), i));
    --num_edges_;
}

NodeSet MixedGraph::parents(int v) const {
    NodeSet out;
    for (int u : neighbors(v))
        if (is_directed(u, v)) out.push_back(u);
    return out;
}

NodeSet MixedGraph::children(int v) const {
    NodeSet out;
    for (int u : neighbors(v))
        if (is_directed(v, u)) out.push_back(u);
    return out;
}

bool MixedGraph::has_circles() const {
    for (int i = 0; i < p_; ++i)
        for (int j : adj_[static_cast<std::size_t>(i)])
            if (static_cast<Mark>(raw(i, j)) == Mark::Circle) return true;
    return false;
}

std::vector<Edge> MixedGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges_);
    for (int i = 0; i < p_; ++i)
        for (int j : adj_[static_cast<std::size_t>(i)])
            if (i < j) out.push_back({i, j, static_cast<Mark>(raw(j, i)), static_cast<Mark>(raw(i, j))});
    return out;
}

MixedGraph MixedGraph::induced(const NodeSet& nodes) const {
    MixedGraph out(p_, names_, dense_ ? kDefaultDenseLimit : 0);
    auto in = nodeset::mask(nodes, p_);
    for (const auto& e : edges())
        if (in[static_cast<std::size_t>(e.i)] && in[static_cast<std::size_t>(e.j)]) out.set_edge(e.i, e.j, e.at_i, e.at_j);
    return out;
}

MixedGraph MixedGraph::with_uniform_marks(Mark m) const {
    MixedGraph out(p_, names_, dense_ ? kDefaultDenseLimit : 0);
    for (const auto& e : edges()) out.set_edge(e.i, e.j, m, m);
    return out;
}

bool operator==(const MixedGraph& a, const MixedGraph& b) {
    if (a.p_ != b.p_ || a.num_edges_ != b.num_edges_) return false;
    for (int i = 0; i < a.p_; ++i) {
        if (a.adj_[static_cast<std::size_t>(i)] != b.adj_[static_cast<std::size_t>(i)]) return false;
        for (int j : a.adj_[static_cast<std::size_t>(i)])
            if (a.raw(i, j) != b.raw(i, j)) return false;
    }
    return true;
}

std::optional<std::vector<int>> directed_topological_order(const MixedGraph& g) {
    const int p = g.size();
    std::vector<int> indeg(static_cast<std::size_t>(p), 0);
    for (int v = 0; v < p; ++v)
        for (int u : g.neighbors(v))
            if (g.is_directed(u, v)) ++indeg[static_cast<std::size_t>(v)];
    // Kahn's algorithm, smallest available index first so the order is canonical.
    std::vector<int> ready;
    for (int v = p - 1; v >= 0; --v)
        if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(p));
    while (!ready.empty()) {
        std::pop_heap(ready.begin(), ready.end(), std::greater<>());
        int v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (int w : g.neighbors(v)) {
            if (!g.is_directed(v, w)) continue;
            if (--indeg[static_cast<std::size_t>(w)] == 0) {
                ready.push_back(w);
                std::push_heap(ready.begin(), ready.end(), std::greater<>());
            }
        }
    }
    if (static_cast<int>(order.size()) != p) return std::nullopt;
    return order;
}

Dag::Dag(int p, const std::vector<std::pair<int, int>>& edges, std::vector<std::string> names)
    : graph_(p, std::move(names)) {
    for (auto [from, to] : edges) {
        if (graph_.adjacent(from, to) && !graph_.is_directed(from, to))
            throw CyclicInput("edges " + std::to_string(from) + "->" + std::to_string(to) + " and reverse form a cycle");
        graph_.add_directed(from, to);
    }
    auto order = directed_topological_order(graph_);
    if (!order) throw CyclicInput("edge list contains a directed cycle");
    order_ = std::move(*order);
    parents_.resize(static_cast<std::size_t>(p));
    children_.resize(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) {
        parents_[static_cast<std::size_t>(v)] = graph_.parents(v);
        children_[static_cast<std::size_t>(v)] = graph_.children(v);
    }
}

Dag Dag::from_graph(const MixedGraph& g) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : g.edges()) {
        if (e.at_i == Mark::Tail && e.at_j == Mark::Arrow)
            edges.emplace_back(e.i, e.j);
        else if (e.at_i == Mark::Arrow && e.at_j == Mark::Tail)
            edges.emplace_back(e.j, e.i);
        else
            throw InvalidArgument("DAG edges must be Tail -> Arrow");
    }
    return Dag(g.size(), edges, g.names());
}

std::vector<std::pair<int, int>> Dag::edge_list() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < size(); ++v)
        for (int c : children(v)) out.emplace_back(v, c);
    return out;
}

TargetSpec::TargetSpec(std::vector<int> targets, int p) {
    if (targets.empty()) throw InvalidArgument("target set must be non-empty");
    for (int t : targets)
        if (t < 0 || t >= p) throw InvalidArgument("target index " + std::to_string(t) + " out of range");
    auto sorted = nodeset::make(targets);
    if (sorted.size() != targets.size()) throw InvalidArgument("targets must be distinct");
    targets_ = std::move(sorted);
}

}  // namespace cml
