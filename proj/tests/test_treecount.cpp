#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "bcc/oracle.hpp"
#include "bcc/treecount.hpp"
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

contiguity_graph path(node_id n) {
    std::vector<edge> e;
    for (node_id i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return contiguity_graph::from_edge_list(n, e);
}

}  // namespace

TEST_CASE("log_tree_count on known graphs") {
    CHECK(log_tree_count(k4()) == doctest::Approx(std::log(16.0)).epsilon(1e-12));
    CHECK(log_tree_count(path(5)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(log_tree_count(c4()) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    auto c5 = contiguity_graph::from_edge_list(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
    CHECK(log_tree_count(c5) == doctest::Approx(std::log(5.0)).epsilon(1e-12));

    multi_graph two(2);
    two.add_edge(0, 1, 3);
    CHECK(log_tree_count(two) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("log_tree_count rejects disconnected graphs") {
    CHECK_THROWS_AS(log_tree_count(contiguity_graph::from_edge_list(3, {{0, 1}})),
                    validation_error);
}

TEST_CASE("factorize small cases") {
    CHECK(ldl_factor().log_det() == 0.0);
    CHECK(ldl_factor::factorize(contiguity_graph::from_edge_list(1, {})).dim() == 0);
    auto single = ldl_factor::factorize(contiguity_graph::from_edge_list(2, {{0, 1}}));
    CHECK(single.dim() == 1);
    CHECK(single.log_det() == doctest::Approx(0.0));
    CHECK(ldl_factor::factorize(c4()).log_det() == doctest::Approx(std::log(4.0)));
}

TEST_CASE("factor reconstructs the reduced Laplacian") {
    auto g = k4();
    auto f = ldl_factor::factorize(g);
    // Reduced Laplacian of K4 (node 3 removed): diag 3, off-diag -1.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j)
            CHECK(f.reconstruct(i, j) == doctest::Approx(i == j ? 3.0 : -1.0).epsilon(1e-10));
}

TEST_CASE("ordering does not change the determinant") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = testutil::random_connected_graph(7, rng);
        auto a = ldl_factor::factorize(g, ordering::rcm).log_det();
        auto b = ldl_factor::factorize(g, ordering::natural).log_det();
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
}

TEST_CASE("cofactor choice is immaterial (relabeling invariance)") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = testutil::random_connected_graph(7, rng);
        const double reference = log_tree_count(g);
        // Swap node u with the highest label: the removed row/column changes.
        for (node_id u = 0; u < g.num_nodes(); ++u) {
            std::vector<edge> relabeled;
            auto swap_label = [&](node_id x) {
                if (x == u) return g.num_nodes() - 1;
                if (x == g.num_nodes() - 1) return u;
                return x;
            };
            for (const auto& [a, b] : g.edges())
                relabeled.emplace_back(swap_label(a), swap_label(b));
            auto h = contiguity_graph::from_edge_list(g.num_nodes(), relabeled);
            CHECK(log_tree_count(h) == doctest::Approx(reference).epsilon(1e-10));
        }
    }
}

TEST_CASE("matrix-tree equals enumeration on random graphs and multigraphs") {
    std::mt19937 rng(17);
    int done = 0;
    while (done < 100) {
        auto g = testutil::random_connected_graph(3 + static_cast<node_id>(rng() % 5), rng);
        auto count = oracle::enumerate_spanning_trees(g);
        CHECK(log_tree_count(g) == doctest::Approx(std::log(static_cast<double>(count))).epsilon(1e-9));
        ++done;
    }
    done = 0;
    while (done < 100) {
        auto g = testutil::random_connected_multigraph(2 + static_cast<node_id>(rng() % 5), rng);
        auto count = oracle::enumerate_spanning_trees(g);
        CHECK(log_tree_count(g) == doctest::Approx(std::log(static_cast<double>(count))).epsilon(1e-9));
        ++done;
    }
}

TEST_CASE("merge_factors on the spec fixtures") {
    // Two singletons joined by one edge.
    auto f = merge_factors(ldl_factor(), ldl_factor(), {{0, 0}});
    CHECK(f.dim() == 1);
    CHECK(f.log_det() == doctest::Approx(0.0).epsilon(1e-12));

    // Two singletons joined by three parallel edges.
    auto f3 = merge_factors(ldl_factor(), ldl_factor(), {{0, 0}, {0, 0}, {0, 0}});
    CHECK(f3.log_det() == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    // Two single-edge clusters cut by two edges: a C4.
    auto single = ldl_factor::factorize(contiguity_graph::from_edge_list(2, {{0, 1}}));
    auto fc4 = merge_factors(single, single, {{0, 1}, {1, 0}});
    CHECK(fc4.dim() == 3);
    CHECK(fc4.log_det() == doctest::Approx(std::log(4.0)).epsilon(1e-10));

    CHECK_THROWS_AS(merge_factors(ldl_factor(), ldl_factor(), {}), validation_error);
}

TEST_CASE("merge_factors agrees with from-scratch factorization") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const node_id na = 1 + static_cast<node_id>(rng() % 5);
        const node_id nb = 1 + static_cast<node_id>(rng() % 5);
        auto ga = testutil::random_connected_graph(na, rng, 0.7);
        auto gb = testutil::random_connected_graph(nb, rng, 0.7);
        // Union graph: a's nodes then b's nodes, plus random cut edges.
        std::vector<edge> union_edges = ga.edges();
        for (const auto& [u, v] : gb.edges()) union_edges.emplace_back(na + u, na + v);
        std::vector<std::pair<int, int>> cut;
        std::uniform_int_distribution<node_id> ua(0, na - 1), vb(0, nb - 1);
        const int cut_count = 1 + static_cast<int>(rng() % 4);
        for (int c = 0; c < cut_count; ++c) {
            const node_id u = ua(rng), v = vb(rng);
            if (std::find(cut.begin(), cut.end(), std::pair<int, int>(u, v)) != cut.end())
                continue;
            cut.emplace_back(u, v);
            union_edges.emplace_back(u, na + v);
        }
        auto merged = merge_factors(ldl_factor::factorize(ga), ldl_factor::factorize(gb), cut);
        auto direct = ldl_factor::factorize(contiguity_graph::from_edge_list(na + nb, union_edges));
        CHECK(merged.log_det() == doctest::Approx(direct.log_det()).epsilon(1e-8));
    }
}

TEST_CASE("downdate_factor on the spec fixtures") {
    auto fc4 = ldl_factor::factorize(c4());
    // Removing one C4 edge leaves a path: exactly one spanning tree.
    CHECK(downdate_factor(fc4, {{0, 1}}).log_det() == doctest::Approx(0.0).epsilon(1e-10));

    auto fk4 = ldl_factor::factorize(k4());
    CHECK(downdate_factor(fk4, {{0, 1}}).log_det() ==
          doctest::Approx(std::log(8.0)).epsilon(1e-10));

    // Removing every edge at node 0 disconnects the graph.
    CHECK_THROWS_AS(
        downdate_factor(fk4, {{0, 1}, {0, 2}, {0, ldl_factor::removed_index()}}),
        numeric_error);
}

TEST_CASE("update and downdate match fresh factorizations") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = testutil::random_connected_graph(8, rng, 0.6);
        auto f = ldl_factor::factorize(g);
        // Remove a random non-bridging edge if possible, then re-add it.
        for (const auto& [u, v] : g.edges()) {
            std::vector<edge> without;
            for (const auto& e : g.edges())
                if (e != edge{u, v}) without.push_back(e);
            auto gm = contiguity_graph::from_edge_list(g.num_nodes(), without);
            if (!gm.is_connected()) continue;
            const int lu = (u == g.num_nodes() - 1) ? ldl_factor::removed_index() : u;
            const int lv = (v == g.num_nodes() - 1) ? ldl_factor::removed_index() : v;
            auto down = f;
            down.remove_edge(lu, lv, 1.0);
            CHECK(down.log_det() ==
                  doctest::Approx(ldl_factor::factorize(gm).log_det()).epsilon(1e-8));
            down.add_edge(lu, lv, 1.0);
            CHECK(down.log_det() == doctest::Approx(f.log_det()).epsilon(1e-8));
            break;
        }
    }
}

TEST_CASE("delete_row matches contraction with the removed node") {
    // Deleting row u from the reduced Laplacian (node j removed) leaves the
    // reduced Laplacian of G/(u,j).
    std::mt19937 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = testutil::random_connected_graph(7, rng, 0.6);
        auto mg = multi_graph::from_graph(g);
        const node_id j = g.num_nodes() - 1;
        for (node_id u : g.neighbors(j)) {
            auto f = ldl_factor::factorize(g);
            f.delete_row(u);
            auto contracted = mg.contract_edge(u, j);
            CHECK(f.log_det() ==
                  doctest::Approx(log_tree_count(contracted)).epsilon(1e-8));
            break;
        }
    }
}

TEST_CASE("log_compatible_tree_count fixtures") {
    auto g = c4();
    auto p = partition::from_clusters(4, {{0, 1}, {2, 3}});
    CHECK(log_compatible_tree_count(g, p) == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    auto singles = partition::from_assignment({0, 1, 2, 3});
    CHECK(log_compatible_tree_count(g, singles) ==
          doctest::Approx(log_tree_count(g)).epsilon(1e-10));

    auto one = partition::from_clusters(4, {{0, 1, 2, 3}});
    CHECK(log_compatible_tree_count(g, one) ==
          doctest::Approx(log_tree_count(g)).epsilon(1e-10));

    auto bad = partition::from_clusters(4, {{0, 2}, {1, 3}});
    CHECK_THROWS_WITH_AS(log_compatible_tree_count(g, bad),
                         doctest::Contains("cluster 0"), validation_error);
}

TEST_CASE("compatible counts match tree filtering") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 60; ++trial) {
        auto g = testutil::random_connected_graph(7, rng, 0.55);
        auto p = testutil::random_connected_partition(g, rng, 4);
        const auto count = oracle::count_compatible_spanning_trees(g, p);
        CHECK(log_compatible_tree_count(g, p) ==
              doctest::Approx(std::log(static_cast<double>(count))).epsilon(1e-9));
    }
}

TEST_CASE("deletion-contraction recurrence holds exactly") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        auto g = testutil::random_connected_multigraph(2 + static_cast<node_id>(rng() % 5), rng);
        for (const auto& [e, m] : g.edges()) {
            const auto total = oracle::enumerate_spanning_trees(g);
            const auto contracted =
                oracle::enumerate_spanning_trees(g.contract_edge(e.first, e.second));
            multi_graph without(g.num_nodes());
            for (const auto& [e2, m2] : g.edges())
                if (e2 != e) without.add_edge(e2.first, e2.second, m2);
            const auto deleted =
                without.num_nodes() > 1 && !without.is_connected()
                    ? 0
                    : (without.edges().empty() && without.num_nodes() > 1
                           ? 0
                           : oracle::enumerate_spanning_trees(without));
            CHECK(total == m * contracted + deleted);
        }
    }
}

TEST_CASE("long random merge sequences stay consistent") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = testutil::random_connected_graph(30, rng, 0.15);
        // Merge singletons along a random spanning order; compare the
        // incrementally merged factor's log det against from-scratch values.
        std::vector<std::vector<node_id>> members(static_cast<std::size_t>(g.num_nodes()));
        std::vector<ldl_factor> factors(static_cast<std::size_t>(g.num_nodes()));
        std::vector<int> owner(static_cast<std::size_t>(g.num_nodes()));
        for (node_id i = 0; i < g.num_nodes(); ++i) {
            members[static_cast<std::size_t>(i)] = {i};
            owner[static_cast<std::size_t>(i)] = i;
        }
        std::vector<int> alive;
        for (node_id i = 0; i < g.num_nodes(); ++i) alive.push_back(i);
        auto touches = [&](int a, int b) {
            for (node_id u : members[static_cast<std::size_t>(a)])
                for (node_id v : g.neighbors(u))
                    if (owner[static_cast<std::size_t>(v)] == b) return true;
            return false;
        };
        while (alive.size() > 1) {
            // Pick an adjacent live pair.
            std::vector<std::pair<int, int>> adjacent;
            for (int a : alive)
                for (int b : alive)
                    if (a < b && touches(a, b)) adjacent.emplace_back(a, b);
            if (adjacent.empty()) break;
            auto [a, b] = adjacent[rng() % adjacent.size()];
            std::vector<std::pair<int, int>> cut;
            for (std::size_t i = 0; i < members[static_cast<std::size_t>(a)].size(); ++i)
                for (node_id v : g.neighbors(members[static_cast<std::size_t>(a)][i]))
                    if (owner[static_cast<std::size_t>(v)] == b) {
                        const auto& bm = members[static_cast<std::size_t>(b)];
                        const auto pos = std::find(bm.begin(), bm.end(), v) - bm.begin();
                        cut.emplace_back(static_cast<int>(i), static_cast<int>(pos));
                    }
            auto merged = merge_factors(factors[static_cast<std::size_t>(a)],
                                        factors[static_cast<std::size_t>(b)], cut);
            auto& ma = members[static_cast<std::size_t>(a)];
            for (node_id v : members[static_cast<std::size_t>(b)]) {
                owner[static_cast<std::size_t>(v)] = a;
                ma.push_back(v);
            }
            auto direct = ldl_factor::factorize(g.induced_subgraph(ma));
            CHECK(merged.log_det() == doctest::Approx(direct.log_det()).epsilon(1e-8));
            factors[static_cast<std::size_t>(a)] = std::move(merged);
            alive.erase(std::find(alive.begin(), alive.end(), b));
        }
    }
}
