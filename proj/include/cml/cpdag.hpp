#pragma once

#include "cml/graph.hpp"

namespace cml {

/// Closes a partially directed graph (Tail/Arrow marks) under Meek's four
/// rules. Only fully undirected edges are ever re-oriented; existing
/// arrowheads, including conflicting bidirected ones, are left untouched.
void meek_closure(MixedGraph& g);

/// Completed partially directed graph of g: compelled edges Tail -> Arrow,
/// reversible edges Tail - Tail.
MixedGraph cpdag(const Dag& g);

}  // namespace cml
