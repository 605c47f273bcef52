#pragma once

#include <map>
#include <utility>
#include <vector>

#include "cml/graph.hpp"
#include "cml/neighbors.hpp"

namespace cml {

/// Separating set recorded for each removed edge; the first set stored for a pair wins.
class SepsetMap {
public:
    /// Stores s for {i, j} unless the pair already has an entry. Returns true if stored.
    bool set(int i, int j, NodeSet s);
    const NodeSet* find(int i, int j) const;
    bool contains(int i, int j) const { return find(i, j) != nullptr; }
    std::size_t size() const { return map_.size(); }
    /// Entries keyed by (min, max), ascending.
    const std::map<std::pair<int, int>, NodeSet>& entries() const { return map_; }

private:
    std::map<std::pair<int, int>, NodeSet> map_;
};

/// Which orientation rules run; everything is on by default.
struct RuleToggles {
    bool r1 = true, r2 = true, r3 = true, r4 = true, r8 = true, r9 = true, r10 = true;
};

/// R0 on a graph whose marks are all Circle: for each unshielded triple
/// i *-* k *-* j whose recorded sepset excludes k, arrowheads are put at k on
/// both edges. Arrowheads accumulate, so two triples can meet in i <-> k.
void orient_v_structures(MixedGraph& g, const SepsetMap& sepsets);

/// Each rule sweeps the graph once, rewriting only Circle marks, and reports
/// whether it changed anything. Statements follow the FCI rule set for the
/// case without selection bias (rules 1-4 and 8-10).
namespace fci {
bool rule1(MixedGraph& g);
bool rule2(MixedGraph& g);
bool rule3(MixedGraph& g);
bool rule4(MixedGraph& g, const SepsetMap& sepsets);
bool rule8(MixedGraph& g);
bool rule9(MixedGraph& g);
bool rule10(MixedGraph& g);
}  // namespace fci

/// Repeats the enabled rules until none of them fires.
void apply_fci_rules(MixedGraph& g, const SepsetMap& sepsets, const RuleToggles& rules = {});

/// R_N: for pairs inside one neighborhood, i o-o j becomes i - j and
/// i o-> j becomes i -> j. Other edges are left alone.
void apply_rn(MixedGraph& g, const NeighborSets& nbs);

/// After R_N fixes directions inside the neighborhoods, an edge a o-> b whose
/// endpoint b is reachable from a by a directed path cannot be a <-> b in an
/// ancestral graph, so the circle at a becomes a tail. Repeated to a fixed point.
void close_ancestral_circles(MixedGraph& g);

/// Pairs (i < j) sharing a neighborhood that are joined by i <-> j.
std::vector<std::pair<int, int>> bidirected_within(const MixedGraph& g, const NeighborSets& nbs);

/// PC-style v-structures on a Tail-Tail skeleton: unshielded i - k - j with
/// k outside the sepset gets arrowheads at k. Returns the pairs that ended up
/// bidirected because two v-structures disagree.
std::vector<std::pair<int, int>> orient_pc_v_structures(MixedGraph& g, const SepsetMap& sepsets);

}  // namespace cml
