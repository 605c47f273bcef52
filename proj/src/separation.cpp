#include "cml/separation.hpp"

#include <string>

namespace cml {

namespace {

std::size_t idx(int v) { return static_cast<std::size_t>(v); }

std::vector<char> ancestor_mask(const MixedGraph& g, const NodeSet& seeds) {
    std::vector<char> seen(idx(g.size()), 0);
    std::vector<int> stack;
    for (int v : seeds) {
        if (!seen[idx(v)]) {
            seen[idx(v)] = 1;
            stack.push_back(v);
        }
    }
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : g.neighbors(v)) {
            if (!seen[idx(u)] && g.is_directed(u, v)) {
                seen[idx(u)] = 1;
                stack.push_back(u);
            }
        }
    }
    return seen;
}

NodeSet mask_to_set(const std::vector<char>& m) {
    NodeSet out;
    for (std::size_t v = 0; v < m.size(); ++v)
        if (m[v]) out.push_back(static_cast<int>(v));
    return out;
}

struct InducingSearch {
    const MixedGraph& g;
    int target;
    const std::vector<char>& latent;
    const std::vector<char>& must_visit;
    const std::vector<char>& allowed;
    std::vector<char> on_path;
    bool need_visit;

    // `arrow_in` is true when the edge we arrived on has an arrowhead at `cur`.
    bool extend(int cur, bool arrow_in, int visits) {
        for (int next : g.neighbors(cur)) {
            if (on_path[idx(next)]) continue;
            bool collider = arrow_in && g.endpoint(next, cur) == Mark::Arrow;
            // Every intermediate lies in An({i, j}), so colliders automatically satisfy the ancestor clause.
            if (!collider && !latent[idx(cur)]) continue;
            if (next == target) {
                if (!need_visit || visits > 0) return true;
                continue;
            }
            if (!allowed[idx(next)]) continue;
            on_path[idx(next)] = 1;
            bool found = extend(next, g.endpoint(cur, next) == Mark::Arrow, visits + (must_visit[idx(next)] ? 1 : 0));
            on_path[idx(next)] = 0;
            if (found) return true;
        }
        return false;
    }
};

}  // namespace

NodeSet ancestors(const MixedGraph& g, int j) {
    g.check_node(j);
    return mask_to_set(ancestor_mask(g, {j}));
}

NodeSet ancestors(const MixedGraph& g, const NodeSet& nodes) {
    for (int v : nodes) g.check_node(v);
    return mask_to_set(ancestor_mask(g, nodes));
}

bool is_ancestral(const MixedGraph& g) {
    for (const auto& e : g.edges()) {
        if (e.at_i == Mark::Circle || e.at_j == Mark::Circle) return false;
        if (e.at_i == Mark::Tail && e.at_j == Mark::Tail) return false;
    }
    if (!directed_topological_order(g)) return false;
    for (const auto& e : g.edges()) {
        if (e.at_i != Mark::Arrow || e.at_j != Mark::Arrow) continue;
        auto an_i = ancestor_mask(g, {e.i});
        auto an_j = ancestor_mask(g, {e.j});
        if (an_i[idx(e.j)] || an_j[idx(e.i)]) return false;
    }
    return true;
}

namespace detail {

void check_pair(const MixedGraph& g, int i, int j, const NodeSet& s) {
    g.check_node(i);
    g.check_node(j);
    if (i == j) throw InvalidArgument("separation query needs two distinct nodes");
    for (int v : s) {
        g.check_node(v);
        if (v == i || v == j) throw InvalidArgument("conditioning set must exclude the queried pair");
    }
}

bool m_connected(const MixedGraph& g, int i, int j, const std::vector<char>& in_s) {
    // Walk formulation: a walk is m-connecting when every collider occurrence is
    // in S and every non-collider occurrence is outside S. Walks may reverse
    // along an edge, which is how colliders in an(S) \ S are reached.
    const int p = g.size();
    std::vector<char> seen(idx(p) * 2, 0);
    std::vector<std::pair<int, bool>> queue;
    for (int m : g.neighbors(i)) {
        bool arrow = g.endpoint(i, m) == Mark::Arrow;
        if (m == j) return true;
        auto key = idx(m) * 2 + (arrow ? 1 : 0);
        if (!seen[key]) {
            seen[key] = 1;
            queue.emplace_back(m, arrow);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [k, arrow_in] = queue[head];
        for (int m : g.neighbors(k)) {
            bool collider = arrow_in && g.endpoint(m, k) == Mark::Arrow;
            if (collider ? !in_s[idx(k)] : in_s[idx(k)]) continue;
            if (m == j) return true;
            bool arrow = g.endpoint(k, m) == Mark::Arrow;
            auto key = idx(m) * 2 + (arrow ? 1 : 0);
            if (!seen[key]) {
                seen[key] = 1;
                queue.emplace_back(m, arrow);
            }
        }
    }
    return false;
}

bool find_inducing_path(const MixedGraph& g, int i, int j, const std::vector<char>& latent,
                        const std::vector<char>& must_visit) {
    bool need_visit = false;
    for (char c : must_visit)
        if (c) {
            need_visit = true;
            break;
        }
    if (g.adjacent(i, j) && !need_visit) return true;
    auto allowed = ancestor_mask(g, {i, j});
    std::vector<char> visit_mask = must_visit.empty() ? std::vector<char>(idx(g.size()), 0) : must_visit;
    InducingSearch search{g, j, latent, visit_mask, allowed, std::vector<char>(idx(g.size()), 0), need_visit};
    search.on_path[idx(i)] = 1;
    for (int next : g.neighbors(i)) {
        if (next == j || !allowed[idx(next)]) continue;
        search.on_path[idx(next)] = 1;
        bool found = search.extend(next, g.endpoint(i, next) == Mark::Arrow, visit_mask[idx(next)] ? 1 : 0);
        search.on_path[idx(next)] = 0;
        if (found) return true;
    }
    return false;
}

}  // namespace detail

bool m_separated(const MixedGraph& g, int i, int j, const NodeSet& s) {
    detail::check_pair(g, i, j, s);
    if (!is_ancestral(g)) throw NotAncestral("m_separated requires an ancestral graph");
    auto in_s = nodeset::mask(s, g.size());
    return !detail::m_connected(g, i, j, in_s);
}

bool d_separated(const Dag& g, int i, int j, const NodeSet& s) {
    detail::check_pair(g.graph(), i, j, s);
    auto in_s = nodeset::mask(s, g.size());
    return !detail::m_connected(g.graph(), i, j, in_s);
}

bool inducing_path_exists(const Dag& g, int i, int j, const NodeSet& latent) {
    detail::check_pair(g.graph(), i, j, latent);
    return detail::find_inducing_path(g.graph(), i, j, nodeset::mask(latent, g.size()), {});
}

NodeSet markov_blanket(const Dag& g, int v) {
    g.graph().check_node(v);
    NodeSet out = nodeset::unite(g.parents(v), g.children(v));
    for (int c : g.children(v)) out = nodeset::unite(out, g.parents(c));
    return nodeset::without(out, v);
}

std::vector<NodeSet> true_neighborhoods(const Dag& g, const TargetSpec& t) {
    std::vector<NodeSet> out;
    for (int v : t) {
        g.graph().check_node(v);
        out.push_back(nodeset::with(markov_blanket(g, v), v));
    }
    return out;
}

namespace {

NodeSet union_of(const std::vector<NodeSet>& sets) {
    NodeSet out;
    for (const auto& s : sets) out = nodeset::unite(out, s);
    return out;
}

bool share_neighborhood(const std::vector<NodeSet>& nbs, int a, int b) {
    for (const auto& nb : nbs)
        if (nodeset::contains(nb, a) && nodeset::contains(nb, b)) return true;
    return false;
}

}  // namespace

MixedGraph ground_truth_mag(const Dag& g, const TargetSpec& t) {
    auto nbs = true_neighborhoods(g, t);
    NodeSet n = union_of(nbs);
    MixedGraph out = g.graph().induced(n);
    auto in_n = nodeset::mask(n, g.size());
    std::vector<char> latent(idx(g.size()));
    for (std::size_t v = 0; v < latent.size(); ++v) latent[v] = in_n[v] ? 0 : 1;

    for (std::size_t a = 0; a < n.size(); ++a) {
        for (std::size_t b = a + 1; b < n.size(); ++b) {
            int i = n[a], j = n[b];
            if (out.adjacent(i, j) || share_neighborhood(nbs, i, j)) continue;
            if (!detail::find_inducing_path(g.graph(), i, j, latent, {})) continue;
            auto an_j = ancestor_mask(g.graph(), {j});
            auto an_i = ancestor_mask(g.graph(), {i});
            if (an_j[idx(i)])
                out.add_directed(i, j);
            else if (an_i[idx(j)])
                out.add_directed(j, i);
            else
                out.add_bidirected(i, j);
        }
    }
    return out;
}

bool check_assumption_inp(const Dag& g, const TargetSpec& t) {
    auto nbs = true_neighborhoods(g, t);
    NodeSet n = union_of(nbs);
    auto in_n = nodeset::mask(n, g.size());
    std::vector<char> latent(idx(g.size()));
    for (std::size_t v = 0; v < latent.size(); ++v) latent[v] = in_n[v] ? 0 : 1;

    for (const auto& nb : nbs) {
        auto outside = nodeset::mask(nodeset::minus(n, nb), g.size());
        bool any = false;
        for (char c : outside) any = any || c;
        if (!any) continue;
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b)
                if (detail::find_inducing_path(g.graph(), nb[a], nb[b], latent, outside)) return false;
    }
    return true;
}

bool validate_mag(const MixedGraph& g) {
    if (!is_ancestral(g)) return false;
    std::vector<char> none(idx(g.size()), 0);
    for (int i = 0; i < g.size(); ++i)
        for (int j = i + 1; j < g.size(); ++j)
            if (!g.adjacent(i, j) && detail::find_inducing_path(g, i, j, none, {})) return false;
    return true;
}

}  // namespace cml
