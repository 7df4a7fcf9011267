#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "bcc/graph.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bcc;

namespace {

contiguity_graph c4() {
    return contiguity_graph::from_edge_list(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
}

contiguity_graph k4() {
    return contiguity_graph::from_edge_list(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

}  // namespace

TEST_CASE("from_edge_list deduplicates orientations") {
    auto g = contiguity_graph::from_edge_list(2, {{0, 1}, {1, 0}});
    CHECK(g.num_edges() == 1);
    CHECK(g.has_edge(0, 1));
}

TEST_CASE("from_edge_list rejects bad input") {
    CHECK_THROWS_AS(contiguity_graph::from_edge_list(3, {{0, 0}}), validation_error);
    CHECK_THROWS_AS(contiguity_graph::from_edge_list(3, {{0, 3}}), validation_error);
    CHECK_THROWS_AS(contiguity_graph::from_edge_list(3, {{-1, 0}}), validation_error);
}

TEST_CASE("cycle construction") {
    auto g = c4();
    CHECK(g.num_nodes() == 4);
    CHECK(g.num_edges() == 4);
    CHECK(g.is_connected());
}

TEST_CASE("grid graphs") {
    CHECK(contiguity_graph::grid(2, 2).num_edges() == 4);
    CHECK(contiguity_graph::grid(2, 2, true).num_edges() == 6);
    CHECK(contiguity_graph::grid(30, 30).num_edges() == 1740);
    CHECK_THROWS_AS(contiguity_graph::grid(0, 3), validation_error);
}

TEST_CASE("induced subgraphs") {
    auto g = c4();
    CHECK(g.induced_subgraph({0, 1}).num_edges() == 1);
    auto opposite = g.induced_subgraph({0, 2});
    CHECK(opposite.num_edges() == 0);
    CHECK(opposite.num_nodes() == 2);
    auto full = g.induced_subgraph({0, 1, 2, 3});
    CHECK(full.num_edges() == g.num_edges());
}

TEST_CASE("cutset sizes") {
    auto g = c4();
    CHECK(cutset_size(g, {0, 1}, {2, 3}) == 2);
    CHECK(cutset_size(g, {0}, {2}) == 0);
    CHECK(cutset_size(k4(), {0, 1}, {2, 3}) == 4);
    CHECK_THROWS_AS(cutset_size(g, {0, 1}, {1, 2}), validation_error);
}

TEST_CASE("quotient multigraph") {
    auto g = c4();
    auto p = partition::from_clusters(4, {{0, 1}, {2, 3}});
    auto q = quotient_multigraph(g, p);
    CHECK(q.num_nodes() == 2);
    CHECK(q.multiplicity(0, 1) == 2);

    auto singles = partition::from_assignment({0, 1, 2, 3});
    auto qs = quotient_multigraph(g, singles);
    CHECK(qs.num_nodes() == 4);
    CHECK(qs.total_multiplicity() == 4);
    for (const auto& [e, m] : qs.edges()) CHECK(m == 1);

    auto q3 = quotient_multigraph(k4(), partition::from_clusters(4, {{0}, {1}, {2, 3}}));
    CHECK(q3.num_nodes() == 3);
    CHECK(q3.multiplicity(0, 1) == 1);
    CHECK(q3.multiplicity(0, 2) == 2);
    CHECK(q3.multiplicity(1, 2) == 2);
}

TEST_CASE("edge contraction") {
    multi_graph tri(3);
    tri.add_edge(0, 1, 1);
    tri.add_edge(1, 2, 1);
    tri.add_edge(0, 2, 1);
    auto c = tri.contract_edge(0, 1);
    CHECK(c.num_nodes() == 2);
    CHECK(c.multiplicity(0, 1) == 2);

    multi_graph two(2);
    two.add_edge(0, 1, 3);
    auto one = two.contract_edge(0, 1);
    CHECK(one.num_nodes() == 1);
    CHECK(one.edges().empty());

    auto qc4 = multi_graph::from_graph(c4()).contract_edge(0, 1);
    CHECK(qc4.num_nodes() == 3);
    CHECK(qc4.total_multiplicity() == 3);
    for (const auto& [e, m] : qc4.edges()) CHECK(m == 1);
    CHECK(qc4.is_connected());

    CHECK_THROWS_AS(multi_graph::from_graph(c4()).contract_edge(0, 2), validation_error);
}

TEST_CASE("connectivity") {
    CHECK(c4().is_connected());
    CHECK_FALSE(contiguity_graph::from_edge_list(2, {}).is_connected());
    CHECK(contiguity_graph::from_edge_list(1, {}).is_connected());
    multi_graph lonely(1);
    CHECK(lonely.is_connected());
}

TEST_CASE("partition validation") {
    CHECK_THROWS_AS(partition::from_clusters(4, {{0, 1}, {1, 2, 3}}), validation_error);
    CHECK_THROWS_AS(partition::from_clusters(4, {{0, 1}, {2}}), validation_error);
    CHECK_THROWS_AS(partition::from_clusters(4, {{0, 1}, {2, 3}, {}}), validation_error);
    auto p = partition::from_clusters(4, {{2, 3}, {0, 1}});
    CHECK(p.assignment() == std::vector<cluster_id>{1, 1, 0, 0});
}

TEST_CASE("contraction conserves counts") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = testutil::random_connected_multigraph(6, rng);
        const auto& [e, m] = *g.edges().begin();
        auto c = g.contract_edge(e.first, e.second);
        CHECK(c.num_nodes() == g.num_nodes() - 1);
        CHECK(c.total_multiplicity() == g.total_multiplicity() - m);
    }
}

TEST_CASE("quotient multiplicities total |E| minus intra edges") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = testutil::random_connected_graph(8, rng);
        auto p = testutil::random_connected_partition(g, rng, 4);
        auto q = quotient_multigraph(g, p);
        std::int64_t intra = 0;
        for (const auto& [u, v] : g.edges())
            if (p.assignment()[static_cast<std::size_t>(u)] ==
                p.assignment()[static_cast<std::size_t>(v)])
                ++intra;
        CHECK(q.total_multiplicity() == static_cast<std::int64_t>(g.num_edges()) - intra);
    }
}

TEST_CASE("quotient after merging two clusters matches contraction") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = testutil::random_connected_graph(8, rng);
        auto p = testutil::random_connected_partition(g, rng, 5);
        if (p.num_clusters() < 2) continue;
        auto q = quotient_multigraph(g, p);
        // Merge clusters 0 and 1 in the partition if they are adjacent.
        if (q.multiplicity(0, 1) == 0) continue;
        std::vector<cluster_id> assign = p.assignment();
        for (auto& a : assign)
            if (a == 1) a = 0;
        for (auto& a : assign)
            if (a > 1) --a;
        auto merged = partition::from_assignment(assign);
        auto q_direct = quotient_multigraph(g, merged);
        auto q_contracted = q.contract_edge(0, 1);
        CHECK(q_direct.num_nodes() == q_contracted.num_nodes());
        CHECK(q_direct.edges() == q_contracted.edges());
    }
}
