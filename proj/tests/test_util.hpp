#pragma once

#include <algorithm>
#include <random>

#include "bcc/graph.hpp"

namespace bcc::testutil {

// Random connected simple graph; resamples the edge coin until connected.
inline contiguity_graph random_connected_graph(node_id n, std::mt19937& rng,
                                               double edge_prob = 0.5) {
    std::bernoulli_distribution coin(edge_prob);
    for (;;) {
        std::vector<edge> edges;
        for (node_id u = 0; u < n; ++u)
            for (node_id v = u + 1; v < n; ++v)
                if (coin(rng)) edges.emplace_back(u, v);
        auto g = contiguity_graph::from_edge_list(n, edges);
        if (g.is_connected()) return g;
    }
}

// Random connected multigraph with multiplicities in [1, max_mult].
inline multi_graph random_connected_multigraph(node_id n, std::mt19937& rng,
                                               double edge_prob = 0.5, int max_mult = 3) {
    std::uniform_int_distribution<int> mult(1, max_mult);
    for (;;) {
        multi_graph g(n);
        bool any = false;
        std::bernoulli_distribution coin(edge_prob);
        for (node_id u = 0; u < n; ++u)
            for (node_id v = u + 1; v < n; ++v)
                if (coin(rng)) {
                    g.add_edge(u, v, mult(rng));
                    any = true;
                }
        if (any && g.is_connected()) return g;
    }
}

// Random partition of g's nodes into connected clusters, grown from random
// seeds; cluster count is whatever the growth produces.
inline partition random_connected_partition(const contiguity_graph& g, std::mt19937& rng,
                                            cluster_id max_k) {
    const node_id n = g.num_nodes();
    std::uniform_int_distribution<cluster_id> kdist(1, std::min<cluster_id>(max_k, n));
    const cluster_id k = kdist(rng);
    std::vector<cluster_id> assign(static_cast<std::size_t>(n), -1);
    std::vector<node_id> frontier;
    std::vector<node_id> order(static_cast<std::size_t>(n));
    for (node_id i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (cluster_id c = 0; c < k; ++c) {
        assign[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])] = c;
        frontier.push_back(order[static_cast<std::size_t>(c)]);
    }
    // Greedy growth keeps every cluster connected.
    node_id assigned = k;
    while (assigned < n) {
        std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
        const node_id u = frontier[pick(rng)];
        bool grew = false;
        for (node_id v : g.neighbors(u))
            if (assign[static_cast<std::size_t>(v)] == -1) {
                assign[static_cast<std::size_t>(v)] = assign[static_cast<std::size_t>(u)];
                frontier.push_back(v);
                ++assigned;
                grew = true;
                break;
            }
        if (!grew)
            frontier.erase(std::find(frontier.begin(), frontier.end(), u));
    }
    // Cluster ids may have gaps if a seed was swallowed; compact via from_assignment
    // after remapping.
    std::vector<cluster_id> remap(static_cast<std::size_t>(k), -1);
    cluster_id next = 0;
    for (auto& a : assign) {
        if (remap[static_cast<std::size_t>(a)] == -1) remap[static_cast<std::size_t>(a)] = next++;
        a = remap[static_cast<std::size_t>(a)];
    }
    return partition::from_assignment(assign);
}

}  // namespace bcc::testutil
