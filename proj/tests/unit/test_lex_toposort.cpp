#include <doctest.h>

#include <random>

#include "corpuskit/errors.hpp"
#include "corpuskit/lex_toposort.hpp"
#include "oracles.hpp"

using namespace corpuskit;

namespace {

std::vector<std::string> paths_of(const ImportGraph& g, const TopoOrder& t) {
    std::vector<std::string> out;
    for (auto id : t.order) out.push_back(g.nodes[id].path);
    return out;
}

std::set<std::string> broken_of(const ImportGraph& g, const TopoOrder& t) {
    std::set<std::string> out;
    for (auto id : t.cycle_broken) out.insert(g.nodes[id].path);
    return out;
}

using Strings = std::vector<std::string>;

}  // namespace

TEST_CASE("ties go to the smallest path") {
    const auto g = make_graph({"c", "b", "a"}, {});
    const auto t = lex_topo_sort(g);
    CHECK(paths_of(g, t) == Strings{"a", "b", "c"});
    CHECK(t.cycle_broken.empty());
}

TEST_CASE("dependencies come first") {
    // a depends on b, b depends on c.
    const auto g = make_graph({"a", "b", "c"}, {{"c", "b"}, {"b", "a"}});
    const auto t = lex_topo_sort(g);
    CHECK(paths_of(g, t) == Strings{"c", "b", "a"});
    CHECK(validate_order(g, t).empty());
}

TEST_CASE("a diamond keeps lexicographic order among ready nodes") {
    const auto g = make_graph({"root", "x", "y", "z"}, {{"z", "x"}, {"z", "y"}, {"x", "root"}, {"y", "root"}});
    CHECK(paths_of(g, lex_topo_sort(g)) == Strings{"z", "x", "y", "root"});
}

TEST_CASE("a three-cycle is broken at the smallest path") {
    const auto g = make_graph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}});
    const auto t = lex_topo_sort(g);
    CHECK(paths_of(g, t) == Strings{"a", "b", "c"});
    CHECK(broken_of(g, t) == std::set<std::string>{"a"});
    CHECK(validate_order(g, t).size() == 1);
}

TEST_CASE("a cycle hanging off a DAG") {
    // d -> a -> b -> a, with c independent.
    const auto g = make_graph({"a", "b", "c", "d"}, {{"d", "a"}, {"a", "b"}, {"b", "a"}});
    const auto t = lex_topo_sort(g);
    CHECK(paths_of(g, t) == Strings{"c", "d", "a", "b"});
    CHECK(broken_of(g, t) == std::set<std::string>{"a"});
}

TEST_CASE("empty and single-node graphs") {
    CHECK(lex_topo_sort(ImportGraph{}).order.empty());
    const auto g = make_graph({"only"}, {});
    CHECK(lex_topo_sort(g).order == std::vector<std::uint32_t>{0});
}

TEST_CASE("malformed graphs are rejected") {
    ImportGraph g = make_graph({"a", "b"}, {});
    auto undirected = g;
    undirected.directed = false;
    CHECK_THROWS_AS(lex_topo_sort(undirected), ValidationError);
    auto bad_edge = g;
    bad_edge.edges.push_back({0, 7});
    CHECK_THROWS_AS(lex_topo_sort(bad_edge), ValidationError);
    auto loop = g;
    loop.edges.push_back({1, 1});
    CHECK_THROWS_AS(lex_topo_sort(loop), ValidationError);
    auto unsorted = g;
    std::swap(unsorted.nodes[0].path, unsorted.nodes[1].path);
    CHECK_THROWS_AS(lex_topo_sort(unsorted), ValidationError);
}

TEST_CASE("validate_order requires a permutation") {
    const auto g = make_graph({"a", "b"}, {});
    CHECK_THROWS_AS(validate_order(g, TopoOrder{{0}, {}}), UsageError);
    CHECK_THROWS_AS(validate_order(g, TopoOrder{{0, 0}, {}}), UsageError);
}

TEST_CASE("matches the quadratic reference on random graphs") {
    std::mt19937_64 rng(20241019);
    for (int round = 0; round < 300; ++round) {
        const std::size_t n = 1 + rng() % 40;
        const double density = (rng() % 100) / 400.0;
        const bool acyclic = round % 2 == 0;
        auto [names, edges] = oracles::random_graph(rng, n, density, acyclic);
        const auto g = make_graph(names, edges);
        const auto fast = lex_topo_sort(g);
        CHECK(fast == oracles::naive_topo(g));
        if (acyclic) {
            CHECK(fast.cycle_broken.empty());
            CHECK(validate_order(g, fast).empty());
        }
    }
}
