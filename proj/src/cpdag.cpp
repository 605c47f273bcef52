#include "cml/cpdag.hpp"

namespace cml {

namespace {

bool rule1(const MixedGraph& g, int a, int b) {
    for (int c : g.neighbors(a))
        if (c != b && g.is_directed(c, a) && !g.adjacent(c, b)) return true;
    return false;
}

bool rule2(const MixedGraph& g, int a, int b) {
    for (int c : g.neighbors(a))
        if (c != b && g.is_directed(a, c) && g.adjacent(c, b) && g.is_directed(c, b)) return true;
    return false;
}

bool rule3(const MixedGraph& g, int a, int b) {
    const auto& nbrs = g.neighbors(a);
    for (std::size_t x = 0; x < nbrs.size(); ++x) {
        int c = nbrs[x];
        if (c == b || !g.is_undirected(a, c) || !g.adjacent(c, b) || !g.is_directed(c, b)) continue;
        for (std::size_t y = x + 1; y < nbrs.size(); ++y) {
            int d = nbrs[y];
            if (d == b || !g.is_undirected(a, d) || !g.adjacent(d, b) || !g.is_directed(d, b)) continue;
            if (!g.adjacent(c, d)) return true;
        }
    }
    return false;
}

bool rule4(const MixedGraph& g, int a, int b) {
    for (int d : g.neighbors(b)) {
        if (d == a || !g.is_directed(d, b) || !g.adjacent(a, d)) continue;
        for (int c : g.neighbors(d)) {
            if (c == a || c == b || !g.is_directed(c, d)) continue;
            if (!g.adjacent(c, b) && g.adjacent(a, c) && g.is_undirected(a, c)) return true;
        }
    }
    return false;
}

}  // namespace

void meek_closure(MixedGraph& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : g.edges()) {
            if (!g.is_undirected(e.i, e.j)) continue;
            for (auto [a, b] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
                if (rule1(g, a, b) || rule2(g, a, b) || rule3(g, a, b) || rule4(g, a, b)) {
                    g.add_directed(a, b);
                    changed = true;
                    break;
                }
            }
        }
    }
}

MixedGraph cpdag(const Dag& g) {
    MixedGraph out = g.graph().with_uniform_marks(Mark::Tail);
    for (int k = 0; k < g.size(); ++k) {
        const auto& pa = g.parents(k);
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!out.adjacent(pa[x], pa[y])) {
                    out.set_endpoint(pa[x], k, Mark::Arrow);
                    out.set_endpoint(pa[y], k, Mark::Arrow);
                }
    }
    meek_closure(out);
    return out;
}

}  // namespace cml
