#pragma once

#include <vector>

#include "cml/graph.hpp"

namespace cml {

/// Visits every size-k subset of `pool` in lexicographic order of positions.
/// `fn` receives a sorted NodeSet and returns true to stop early; the return
/// value tells whether the enumeration was stopped.
template <class Fn>
bool for_each_subset(const NodeSet& pool, int k, Fn&& fn) {
    const int n = static_cast<int>(pool.size());
    if (k < 0 || k > n) return false;
    std::vector<int> pos(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) pos[static_cast<std::size_t>(a)] = a;
    NodeSet subset(static_cast<std::size_t>(k));
    for (;;) {
        for (int a = 0; a < k; ++a) subset[static_cast<std::size_t>(a)] = pool[static_cast<std::size_t>(pos[static_cast<std::size_t>(a)])];
        if (fn(static_cast<const NodeSet&>(subset))) return true;
        int a = k - 1;
        while (a >= 0 && pos[static_cast<std::size_t>(a)] == n - k + a) --a;
        if (a < 0) return false;
        ++pos[static_cast<std::size_t>(a)];
        for (int b = a + 1; b < k; ++b) pos[static_cast<std::size_t>(b)] = pos[static_cast<std::size_t>(b - 1)] + 1;
    }
}

}  // namespace cml
