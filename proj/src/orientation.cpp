#include "cml/orientation.hpp"

#include <algorithm>
#include <deque>

namespace cml {

bool SepsetMap::set(int i, int j, NodeSet s) {
    if (i == j) throw InvalidArgument("sepset needs two distinct nodes");
    return map_.emplace(std::minmax(i, j), std::move(s)).second;
}

const NodeSet* SepsetMap::find(int i, int j) const {
    auto it = map_.find(std::minmax(i, j));
    return it == map_.end() ? nullptr : &it->second;
}

namespace {

// Sets the mark at j on edge i-j when it is currently a circle.
bool settle(MixedGraph& g, int i, int j, Mark m) {
    if (g.endpoint(i, j) != Mark::Circle) return false;
    g.set_endpoint(i, j, m);
    return true;
}

// Edge a *-* b can start a potentially directed path a ... b: no arrowhead at a, no tail at b.
bool pd_edge(const MixedGraph& g, int a, int b) {
    return g.endpoint(b, a) != Mark::Arrow && g.endpoint(a, b) != Mark::Tail;
}

// Depth-first search for an uncovered potentially directed path that has
// reached `cur` from `prev` and must end at `target`.
bool uncovered_pd(const MixedGraph& g, int prev, int cur, int target, std::vector<char>& on_path) {
    if (cur == target) return true;
    for (int next : g.neighbors(cur)) {
        if (on_path[static_cast<std::size_t>(next)] || next == prev) continue;
        if (g.adjacent(prev, next) || !pd_edge(g, cur, next)) continue;
        on_path[static_cast<std::size_t>(next)] = 1;
        bool found = uncovered_pd(g, cur, next, target, on_path);
        on_path[static_cast<std::size_t>(next)] = 0;
        if (found) return true;
    }
    return false;
}

}  // namespace

void orient_v_structures(MixedGraph& g, const SepsetMap& sepsets) {
    for (int k = 0; k < g.size(); ++k) {
        const auto nbrs = g.neighbors(k);
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                int i = nbrs[a], j = nbrs[b];
                if (g.adjacent(i, j)) continue;
                const NodeSet* s = sepsets.find(i, j);
                if (!s || nodeset::contains(*s, k)) continue;
                g.set_endpoint(i, k, Mark::Arrow);
                g.set_endpoint(j, k, Mark::Arrow);
            }
    }
}

namespace fci {

bool rule1(MixedGraph& g) {
    bool changed = false;
    for (int b = 0; b < g.size(); ++b) {
        for (int a : g.neighbors(b)) {
            if (g.endpoint(a, b) != Mark::Arrow) continue;
            for (int c : g.neighbors(b)) {
                if (c == a || g.adjacent(a, c) || g.endpoint(c, b) != Mark::Circle) continue;
                settle(g, c, b, Mark::Tail);
                settle(g, b, c, Mark::Arrow);
                changed = true;
            }
        }
    }
    return changed;
}

bool rule2(MixedGraph& g) {
    bool changed = false;
    for (int a = 0; a < g.size(); ++a) {
        for (int c : g.neighbors(a)) {
            if (g.endpoint(a, c) != Mark::Circle) continue;
            for (int b : g.neighbors(a)) {
                if (b == c || !g.adjacent(b, c)) continue;
                bool via_first = g.is_directed(a, b) && g.endpoint(b, c) == Mark::Arrow;
                bool via_second = g.endpoint(a, b) == Mark::Arrow && g.is_directed(b, c);
                if (via_first || via_second) {
                    changed |= settle(g, a, c, Mark::Arrow);
                    break;
                }
            }
        }
    }
    return changed;
}

bool rule3(MixedGraph& g) {
    bool changed = false;
    for (int t = 0; t < g.size(); ++t) {
        for (int b : g.neighbors(t)) {
            if (g.endpoint(t, b) != Mark::Circle) continue;
            const auto& nb = g.neighbors(b);
            bool fire = false;
            for (std::size_t x = 0; x < nb.size() && !fire; ++x) {
                int a = nb[x];
                if (a == t || g.endpoint(a, b) != Mark::Arrow || !g.adjacent(a, t) || g.endpoint(a, t) != Mark::Circle) continue;
                for (std::size_t y = x + 1; y < nb.size() && !fire; ++y) {
                    int c = nb[y];
                    if (c == t || g.endpoint(c, b) != Mark::Arrow || !g.adjacent(c, t) || g.endpoint(c, t) != Mark::Circle) continue;
                    fire = !g.adjacent(a, c);
                }
            }
            if (fire) changed |= settle(g, t, b, Mark::Arrow);
        }
    }
    return changed;
}

bool rule4(MixedGraph& g, const SepsetMap& sepsets) {
    bool changed = false;
    const auto n = static_cast<std::size_t>(g.size());
    for (int b = 0; b < g.size(); ++b) {
        for (int c : std::vector<int>(g.neighbors(b))) {
            if (g.endpoint(c, b) != Mark::Circle) continue;
            // Breadth-first search back from c for <theta, ..., a, b, c>: every node
            // strictly between theta and b is a collider on the path and a parent of c.
            bool done = false;
            for (int a : g.neighbors(b)) {
                if (done) break;
                if (a == c || g.endpoint(b, a) != Mark::Arrow || !g.adjacent(a, c) || !g.is_directed(a, c)) continue;
                std::vector<int> prev(n, -2);
                prev[static_cast<std::size_t>(b)] = -1;
                prev[static_cast<std::size_t>(c)] = -1;
                prev[static_cast<std::size_t>(a)] = b;
                std::deque<int> queue{a};
                while (!queue.empty() && !done) {
                    int v = queue.front();
                    queue.pop_front();
                    for (int w : g.neighbors(v)) {
                        if (prev[static_cast<std::size_t>(w)] != -2 || g.endpoint(w, v) != Mark::Arrow) continue;
                        if (!g.adjacent(w, c)) {
                            const NodeSet* s = sepsets.find(w, c);
                            if (!s) continue;
                            if (nodeset::contains(*s, b)) {
                                settle(g, c, b, Mark::Tail);
                                settle(g, b, c, Mark::Arrow);
                            } else {
                                int last = a;
                                settle(g, last, b, Mark::Arrow);
                                settle(g, b, last, Mark::Arrow);
                                settle(g, b, c, Mark::Arrow);
                                settle(g, c, b, Mark::Arrow);
                            }
                            changed = true;
                            done = true;
                            break;
                        }
                        if (g.is_directed(w, c) && g.endpoint(v, w) == Mark::Arrow) {
                            prev[static_cast<std::size_t>(w)] = v;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
    }
    return changed;
}

bool rule8(MixedGraph& g) {
    bool changed = false;
    for (int a = 0; a < g.size(); ++a) {
        for (int c : g.neighbors(a)) {
            if (g.endpoint(c, a) != Mark::Circle || g.endpoint(a, c) != Mark::Arrow) continue;
            for (int b : g.neighbors(a)) {
                if (b == c || !g.adjacent(b, c) || !g.is_directed(b, c)) continue;
                bool first = g.is_directed(a, b) || (g.endpoint(b, a) == Mark::Tail && g.endpoint(a, b) == Mark::Circle);
                if (first) {
                    changed |= settle(g, c, a, Mark::Tail);
                    break;
                }
            }
        }
    }
    return changed;
}

bool rule9(MixedGraph& g) {
    bool changed = false;
    std::vector<char> on_path(static_cast<std::size_t>(g.size()), 0);
    for (int a = 0; a < g.size(); ++a) {
        for (int c : g.neighbors(a)) {
            if (g.endpoint(c, a) != Mark::Circle || g.endpoint(a, c) != Mark::Arrow) continue;
            for (int b : g.neighbors(a)) {
                if (b == c || g.adjacent(b, c) || !pd_edge(g, a, b)) continue;
                on_path[static_cast<std::size_t>(a)] = 1;
                on_path[static_cast<std::size_t>(b)] = 1;
                bool found = uncovered_pd(g, a, b, c, on_path);
                on_path[static_cast<std::size_t>(a)] = 0;
                on_path[static_cast<std::size_t>(b)] = 0;
                if (found) {
                    changed |= settle(g, c, a, Mark::Tail);
                    break;
                }
            }
        }
    }
    return changed;
}

bool rule10(MixedGraph& g) {
    bool changed = false;
    std::vector<char> on_path(static_cast<std::size_t>(g.size()), 0);
    for (int a = 0; a < g.size(); ++a) {
        for (int c : g.neighbors(a)) {
            if (g.endpoint(c, a) != Mark::Circle || g.endpoint(a, c) != Mark::Arrow) continue;
            NodeSet parents;
            for (int v : g.neighbors(c))
                if (v != a && g.is_directed(v, c)) parents.push_back(v);
            if (parents.size() < 2) continue;
            // First nodes after a on uncovered p.d. paths from a to each parent, avoiding c.
            std::vector<NodeSet> firsts;
            for (int target : parents) {
                NodeSet f;
                for (int m : g.neighbors(a)) {
                    if (m == c || !pd_edge(g, a, m)) continue;
                    on_path[static_cast<std::size_t>(a)] = 1;
                    on_path[static_cast<std::size_t>(c)] = 1;
                    on_path[static_cast<std::size_t>(m)] = 1;
                    if (uncovered_pd(g, a, m, target, on_path)) f.push_back(m);
                    on_path[static_cast<std::size_t>(a)] = 0;
                    on_path[static_cast<std::size_t>(c)] = 0;
                    on_path[static_cast<std::size_t>(m)] = 0;
                }
                firsts.push_back(std::move(f));
            }
            bool fire = false;
            for (std::size_t x = 0; x < parents.size() && !fire; ++x)
                for (std::size_t y = x + 1; y < parents.size() && !fire; ++y)
                    for (int mu : firsts[x]) {
                        for (int om : firsts[y])
                            if (mu != om && !g.adjacent(mu, om)) {
                                fire = true;
                                break;
                            }
                        if (fire) break;
                    }
            if (fire) changed |= settle(g, c, a, Mark::Tail);
        }
    }
    return changed;
}

}  // namespace fci

void apply_fci_rules(MixedGraph& g, const SepsetMap& sepsets, const RuleToggles& rules) {
    bool changed = true;
    while (changed) {
        changed = false;
        if (rules.r1) changed |= fci::rule1(g);
        if (rules.r2) changed |= fci::rule2(g);
        if (rules.r3) changed |= fci::rule3(g);
        if (rules.r4) changed |= fci::rule4(g, sepsets);
        if (rules.r8) changed |= fci::rule8(g);
        if (rules.r9) changed |= fci::rule9(g);
        if (rules.r10) changed |= fci::rule10(g);
    }
}

void apply_rn(MixedGraph& g, const NeighborSets& nbs) {
    for (const auto& e : g.edges()) {
        if (!nbs.same_neighborhood(e.i, e.j)) continue;
        if (e.at_i == Mark::Circle && e.at_j == Mark::Circle) {
            g.add_undirected(e.i, e.j);
        } else if (e.at_i == Mark::Circle && e.at_j == Mark::Arrow) {
            g.set_endpoint(e.j, e.i, Mark::Tail);
        } else if (e.at_j == Mark::Circle && e.at_i == Mark::Arrow) {
            g.set_endpoint(e.i, e.j, Mark::Tail);
        }
    }
}

namespace {

bool reaches(const MixedGraph& g, int from, int to) {
    std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : g.neighbors(v)) {
            if (seen[static_cast<std::size_t>(w)] || !g.is_directed(v, w)) continue;
            if (w == to) return true;
            seen[static_cast<std::size_t>(w)] = 1;
            stack.push_back(w);
        }
    }
    return false;
}

}  // namespace

void close_ancestral_circles(MixedGraph& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : g.edges()) {
            for (auto [a, b] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
                if (g.endpoint(b, a) == Mark::Circle && g.endpoint(a, b) == Mark::Arrow && reaches(g, a, b)) {
                    g.set_endpoint(b, a, Mark::Tail);
                    changed = true;
                }
            }
        }
    }
}

std::vector<std::pair<int, int>> bidirected_within(const MixedGraph& g, const NeighborSets& nbs) {
    std::vector<std::pair<int, int>> out;
    for (const auto& e : g.edges())
        if (e.at_i == Mark::Arrow && e.at_j == Mark::Arrow && nbs.same_neighborhood(e.i, e.j)) out.emplace_back(e.i, e.j);
    return out;
}

std::vector<std::pair<int, int>> orient_pc_v_structures(MixedGraph& g, const SepsetMap& sepsets) {
    for (int k = 0; k < g.size(); ++k) {
        const auto nbrs = g.neighbors(k);
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                int i = nbrs[a], j = nbrs[b];
                if (g.adjacent(i, j)) continue;
                const NodeSet* s = sepsets.find(i, j);
                if (!s || nodeset::contains(*s, k)) continue;
                g.set_endpoint(i, k, Mark::Arrow);
                g.set_endpoint(j, k, Mark::Arrow);
            }
    }
    std::vector<std::pair<int, int>> conflicts;
    for (const auto& e : g.edges())
        if (e.at_i == Mark::Arrow && e.at_j == Mark::Arrow) conflicts.emplace_back(e.i, e.j);
    return conflicts;
}

}  // namespace cml
