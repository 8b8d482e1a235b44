#include "corpuskit/lex_toposort.hpp"

#include <string>

#include "corpuskit/errors.hpp"

namespace corpuskit {

void validate_graph(const ImportGraph& graph) {
    if (!graph.directed) throw ValidationError("graph", "import graph must be directed");
    const auto n = graph.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (graph.nodes[i].id != i) throw ValidationError("graph.nodes", "node ids must be dense and ordered");
        if (i > 0 && !(graph.nodes[i - 1].path < graph.nodes[i].path)) {
            throw ValidationError("graph.nodes", "node ids must follow strictly increasing path order at " +
                                                     graph.nodes[i].path);
        }
    }
    for (const auto& [u, v] : graph.edges) {
        if (u >= n || v >= n) throw ValidationError("graph.edges", "edge endpoint out of range");
        if (u == v) throw ValidationError("graph.edges", "self-loop on " + graph.nodes[u].path);
    }
}

TopoOrder lex_topo_sort(const ImportGraph& graph) {
    validate_graph(graph);
    const auto n = graph.nodes.size();

    // CSR adjacency; parallel edges counted once each, matching in-degree.
    std::vector<std::uint32_t> offsets(n + 1, 0);
    std::vector<std::uint32_t> indeg(n, 0);
    for (const auto& [u, v] : graph.edges) {
        ++offsets[u + 1];
        ++indeg[v];
    }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    std::vector<std::uint32_t> succ(graph.edges.size());
    {
        auto fill = offsets;
        for (const auto& [u, v] : graph.edges) succ[fill[u]++] = v;
    }

    std::set<std::pair<std::uint32_t, std::uint32_t>> queue;
    for (std::uint32_t i = 0; i < n; ++i) queue.emplace(indeg[i], i);

    std::vector<bool> removed(n, false);
    TopoOrder out;
    out.order.reserve(n);
    while (!queue.empty()) {
        const auto [degree, node] = *queue.begin();
        queue.erase(queue.begin());
        if (degree > 0) out.cycle_broken.insert(node);
        removed[node] = true;
        out.order.push_back(node);
        for (auto k = offsets[node]; k < offsets[node + 1]; ++k) {
            const auto s = succ[k];
            if (removed[s]) continue;
            queue.erase({indeg[s], s});
            --indeg[s];
            queue.emplace(indeg[s], s);
        }
    }
    return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> validate_order(const ImportGraph& graph, const TopoOrder& topo) {
    const auto n = graph.nodes.size();
    if (topo.order.size() != n) throw UsageError("order is not a permutation of the graph's nodes");
    std::vector<std::size_t> position(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto node = topo.order[i];
        if (node >= n || position[node] != n) throw UsageError("order is not a permutation of the graph's nodes");
        position[node] = i;
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> violated;
    for (const auto& edge : graph.edges) {
        if (edge.first < n && edge.second < n && position[edge.second] < position[edge.first]) violated.push_back(edge);
    }
    return violated;
}

}  // namespace corpuskit
