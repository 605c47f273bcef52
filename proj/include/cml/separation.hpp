#pragma once

#include <vector>

#include "cml/graph.hpp"

namespace cml {

/// Nodes with a directed path into j, j included.
NodeSet ancestors(const MixedGraph& g, int j);
/// Union of ancestors over `nodes` (each node is its own ancestor).
NodeSet ancestors(const MixedGraph& g, const NodeSet& nodes);

/// True iff g has no directed cycle and no almost directed cycle (i <-> j with j an ancestor of i),
/// and uses only Tail and Arrow marks with no undirected edges.
bool is_ancestral(const MixedGraph& g);

/// m-separation of i and j given s. Throws NotAncestral if g is not ancestral.
bool m_separated(const MixedGraph& g, int i, int j, const NodeSet& s);
/// d-separation in a DAG.
bool d_separated(const Dag& g, int i, int j, const NodeSet& s);

namespace detail {

/// Reachability over (node, arrowhead-at-node) states; g is assumed
/// ancestral and the arguments valid. `in_s` is the membership mask of S.
bool m_connected(const MixedGraph& g, int i, int j, const std::vector<char>& in_s);

/// Depth-first search for an inducing path between i and j. Intermediate
/// nodes outside `latent` must be colliders; every collider must be an
/// ancestor of i or j. When `must_visit` is non-empty the path needs at least
/// one intermediate node from it.
bool find_inducing_path(const MixedGraph& g, int i, int j, const std::vector<char>& latent,
                        const std::vector<char>& must_visit);

void check_pair(const MixedGraph& g, int i, int j, const NodeSet& s);

}  // namespace detail

/// Inducing path between i and j relative to `latent` in a DAG.
bool inducing_path_exists(const Dag& g, int i, int j, const NodeSet& latent);

NodeSet markov_blanket(const Dag& g, int v);

/// True neighborhood NB_t = mb(t) + t for each target, in target order.
std::vector<NodeSet> true_neighborhoods(const Dag& g, const TargetSpec& t);

/// The MAG over N = union of true neighborhoods: the induced subgraph of g plus,
/// for every between-neighborhood pair joined by an inducing path relative to
/// V \ N, an edge oriented by ancestry (i -> j, j -> i, else i <-> j).
/// Nodes outside N are kept as isolated indices.
MixedGraph ground_truth_mag(const Dag& g, const TargetSpec& t);

/// False iff two nodes of one neighborhood NB_t are joined by an inducing path
/// relative to V \ N that passes through N \ NB_t.
bool check_assumption_inp(const Dag& g, const TargetSpec& t);

/// Ancestral (no directed or almost directed cycle) and maximal (no inducing
/// path between non-adjacent nodes). Exhaustive DFS, intended for graphs of at
/// most a few hundred nodes.
bool validate_mag(const MixedGraph& g);

}  // namespace cml
