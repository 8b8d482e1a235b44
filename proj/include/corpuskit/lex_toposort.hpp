#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "corpuskit/repo_graph.hpp"

namespace corpuskit {

struct TopoOrder {
    std::vector<std::uint32_t> order;
    /// Nodes emitted while they still had unremoved predecessors.
    std::set<std::uint32_t> cycle_broken;
    bool operator==(const TopoOrder&) const = default;
};

/// Checks that the graph is directed, ids are dense and match lexicographic path
/// rank, and edges are in range without self-loops. Throws ValidationError.
void validate_graph(const ImportGraph& graph);

/// Lexicographical topological sort that tolerates cycles.
///
/// Repeatedly removes the remaining node with the smallest residual in-degree,
/// ties going to the smallest path. If that in-degree is positive the node is
/// recorded as cycle-broken. Runs in O((V + E) log V) with an ordered set keyed
/// by (in-degree, id); ids follow path order so the key equals (in-degree, path).
TopoOrder lex_topo_sort(const ImportGraph& graph);

/// Every edge (u, v) whose dependent v appears before u. Throws UsageError when
/// the order is not a permutation of the graph's nodes.
std::vector<std::pair<std::uint32_t, std::uint32_t>> validate_order(const ImportGraph& graph,
                                                                    const TopoOrder& topo);

}  // namespace corpuskit
