#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <tuple>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cml/ci.hpp"
#include "cml/graph.hpp"
#include "cml/rng.hpp"
#include "cml/separation.hpp"
#include "cml/simgen.hpp"

namespace oracle {

using cml::Mark;
using cml::MixedGraph;
using cml::NodeSet;

/// The running example: nodes "1".."13" stored at index label - 1.
inline cml::Dag fig1_dag() {
    const std::vector<std::pair<int, int>> labels{{1, 3}, {2, 3},  {3, 4},  {3, 5},  {4, 6},   {6, 11}, {8, 7},
                                                  {8, 10}, {9, 8}, {11, 9}, {12, 2}, {12, 9}, {13, 1}, {13, 2}};
    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : labels) edges.emplace_back(a - 1, b - 1);
    std::vector<std::string> names;
    for (int v = 1; v <= 13; ++v) names.push_back(std::to_string(v));
    return cml::Dag(13, edges, names);
}

inline int n(int label) { return label - 1; }

/// Graph over the Fig. 1 node set with the given labelled directed edges.
inline MixedGraph directed_graph(const std::vector<std::pair<int, int>>& labels) {
    std::vector<std::string> names;
    for (int v = 1; v <= 13; ++v) names.push_back(std::to_string(v));
    MixedGraph g(13, names);
    for (auto [a, b] : labels) g.add_directed(a - 1, b - 1);
    return g;
}

/// Fig. 1(c) as printed: the CML output for T = {3, 8}.
inline MixedGraph fig1c() {
    return directed_graph({{1, 3}, {2, 3}, {3, 4}, {3, 5}, {2, 9}, {4, 9}, {9, 8}, {8, 7}, {8, 10}});
}

/// Fig. 1(d): the SNL output for T = {3, 8}.
inline MixedGraph fig1d() {
    MixedGraph g = directed_graph({{1, 3}, {2, 3}, {3, 4}, {3, 5}});
    g.add_undirected(n(7), n(8));
    g.add_undirected(n(8), n(9));
    g.add_undirected(n(8), n(10));
    return g;
}

inline std::vector<char> ancestor_closure(const MixedGraph& g, const NodeSet& seeds) {
    std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
    for (int v : seeds) in[static_cast<std::size_t>(v)] = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        for (int a = 0; a < g.size(); ++a)
            for (int b = 0; b < g.size(); ++b)
                if (!in[static_cast<std::size_t>(a)] && in[static_cast<std::size_t>(b)] &&
                    g.endpoint(a, b) == Mark::Arrow && g.endpoint(b, a) == Mark::Tail) {
                    in[static_cast<std::size_t>(a)] = 1;
                    grew = true;
                }
    }
    return in;
}

/// m-connection by enumerating every simple path between i and j.
inline bool path_connected(const MixedGraph& g, int i, int j, const NodeSet& s) {
    const auto an_s = ancestor_closure(g, s);
    std::vector<char> in_s(static_cast<std::size_t>(g.size()), 0);
    for (int v : s) in_s[static_cast<std::size_t>(v)] = 1;
    std::vector<int> path{i};
    std::vector<char> on(static_cast<std::size_t>(g.size()), 0);
    on[static_cast<std::size_t>(i)] = 1;
    auto open = [&] {
        for (std::size_t k = 1; k + 1 < path.size(); ++k) {
            int a = path[k - 1], m = path[k], b = path[k + 1];
            bool collider = g.endpoint(a, m) == Mark::Arrow && g.endpoint(b, m) == Mark::Arrow;
            if (collider && !an_s[static_cast<std::size_t>(m)]) return false;
            if (!collider && in_s[static_cast<std::size_t>(m)]) return false;
        }
        return true;
    };
    std::function<bool(int)> dfs = [&](int cur) {
        for (int next = 0; next < g.size(); ++next) {
            if (on[static_cast<std::size_t>(next)] || g.endpoint(cur, next) == Mark::None) continue;
            path.push_back(next);
            if (next == j) {
                if (open()) return true;
            } else {
                on[static_cast<std::size_t>(next)] = 1;
                if (dfs(next)) return true;
                on[static_cast<std::size_t>(next)] = 0;
            }
            path.pop_back();
        }
        return false;
    };
    return dfs(i);
}

/// A random DAG plus up to two bidirected edges between non-adjacent pairs
/// that are not ancestrally related, which keeps the graph ancestral.
inline MixedGraph random_ancestral(int p, std::uint64_t seed) {
    cml::Dag d = cml::random_dag(p, 2.0, seed);
    MixedGraph g = d.graph();
    cml::Rng rng(seed ^ 0x5bd1e995);
    for (int k = 0; k < 2; ++k) {
        int a = static_cast<int>(rng.uniform_int(0, p - 1)), b = static_cast<int>(rng.uniform_int(0, p - 1));
        if (a == b || g.adjacent(a, b)) continue;
        auto an_a = cml::ancestors(g, a), an_b = cml::ancestors(g, b);
        if (cml::nodeset::contains(an_a, b) || cml::nodeset::contains(an_b, a)) continue;
        g.add_bidirected(a, b);
    }
    return g;
}

/// Correlation of the least-squares residuals of columns i and j on [1, X_s].
inline double residual_partial_correlation(const Eigen::MatrixXd& x, int i, int j, const NodeSet& s) {
    const auto rows = x.rows();
    Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(s.size()) + 1);
    design.col(0).setOnes();
    for (std::size_t k = 0; k < s.size(); ++k) design.col(static_cast<Eigen::Index>(k) + 1) = x.col(s[k]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    Eigen::VectorXd ri = x.col(i) - design * qr.solve(Eigen::VectorXd(x.col(i)));
    Eigen::VectorXd rj = x.col(j) - design * qr.solve(Eigen::VectorXd(x.col(j)));
    return ri.dot(rj) / std::sqrt(ri.squaredNorm() * rj.squaredNorm());
}

using Arc = std::pair<int, int>;

inline std::set<std::tuple<int, int, int>> unshielded_colliders(int p, const std::set<Arc>& arcs) {
    auto adjacent = [&](int a, int b) { return arcs.count({a, b}) || arcs.count({b, a}); };
    std::set<std::tuple<int, int, int>> out;
    for (int m = 0; m < p; ++m)
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b)
                if (arcs.count({a, m}) && arcs.count({b, m}) && !adjacent(a, b)) out.emplace(a, m, b);
    return out;
}

inline bool acyclic(int p, const std::set<Arc>& arcs) {
    std::vector<int> state(static_cast<std::size_t>(p), 0);
    std::function<bool(int)> visit = [&](int v) {
        state[static_cast<std::size_t>(v)] = 1;
        for (auto [a, b] : arcs) {
            if (a != v) continue;
            if (state[static_cast<std::size_t>(b)] == 1) return false;
            if (state[static_cast<std::size_t>(b)] == 0 && !visit(b)) return false;
        }
        state[static_cast<std::size_t>(v)] = 2;
        return true;
    };
    for (int v = 0; v < p; ++v)
        if (state[static_cast<std::size_t>(v)] == 0 && !visit(v)) return false;
    return true;
}

/// CPDAG by enumerating every DAG with the same skeleton and unshielded
/// colliders: an edge is directed iff all members of the class agree on it.
inline MixedGraph brute_force_cpdag(const cml::Dag& dag) {
    const int p = dag.size();
    std::set<Arc> truth;
    for (auto e : dag.edge_list()) truth.insert(e);
    const auto target = unshielded_colliders(p, truth);
    std::vector<Arc> skeleton(truth.begin(), truth.end());
    const std::size_t m = skeleton.size();
    std::vector<int> forward(m, 0), backward(m, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        std::set<Arc> arcs;
        for (std::size_t k = 0; k < m; ++k) {
            auto [a, b] = skeleton[k];
            arcs.insert((mask >> k) & 1 ? Arc{b, a} : Arc{a, b});
        }
        if (!acyclic(p, arcs) || unshielded_colliders(p, arcs) != target) continue;
        for (std::size_t k = 0; k < m; ++k) ((mask >> k) & 1 ? backward : forward)[k] = 1;
    }
    MixedGraph out(p, dag.graph().names());
    for (std::size_t k = 0; k < m; ++k) {
        auto [a, b] = skeleton[k];
        if (forward[k] && backward[k])
            out.add_undirected(a, b);
        else if (forward[k])
            out.add_directed(a, b);
        else
            out.add_directed(b, a);
    }
    return out;
}

}  // namespace oracle
