#pragma once

#include "cml/discovery.hpp"
#include "cml/separation.hpp"

namespace oracle {

/// PAG built from the ground-truth MAG over N: its skeleton, separating sets
/// An({i, j}) - {i, j} taken in the MAG (each checked by m-separation), then
/// the CML orientation stage with the true neighbor sets.
inline cml::MixedGraph reference_pag(const cml::Dag& g, const cml::TargetSpec& t) {
    using namespace cml;
    MixedGraph mag = ground_truth_mag(g, t);
    NeighborSets nbs = true_neighbor_sets(g, t);
    SepsetMap seps;
    for (std::size_t a = 0; a < nbs.all.size(); ++a)
        for (std::size_t b = a + 1; b < nbs.all.size(); ++b) {
            int i = nbs.all[a], j = nbs.all[b];
            if (mag.adjacent(i, j)) continue;
            NodeSet s = nodeset::minus(ancestors(mag, NodeSet{i, j}), NodeSet{i, j});
            if (!m_separated(mag, i, j, s)) throw Error("reference separating set does not separate");
            seps.set(i, j, s);
        }
    return orient_cml(mag.with_uniform_marks(Mark::Tail), seps, nbs);
}

}  // namespace oracle
