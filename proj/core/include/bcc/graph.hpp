#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "bcc/common.hpp"

namespace bcc {

using edge = std::pair<node_id, node_id>;

// Simple undirected graph over nodes 0..n-1. Immutable after construction;
// edges are stored sorted with u < v, deduplicated, no self-loops.
class contiguity_graph {
public:
    contiguity_graph() = default;
    explicit contiguity_graph(node_id n) : n_(n) {
        if (n < 0) throw validation_error("graph: negative node count");
        adj_.resize(static_cast<std::size_t>(n));
    }

    static contiguity_graph from_edge_list(node_id n, const std::vector<edge>& pairs);
    static contiguity_graph grid(node_id rows, node_id cols, bool queen = false);

    node_id num_nodes() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<edge>& edges() const { return edges_; }
    const std::vector<node_id>& neighbors(node_id u) const { return adj_[static_cast<std::size_t>(u)]; }
    bool has_edge(node_id u, node_id v) const;

    contiguity_graph induced_subgraph(const std::vector<node_id>& nodes) const;
    bool is_connected() const;

private:
    node_id n_ = 0;
    std::vector<edge> edges_;                    // u < v, sorted
    std::vector<std::vector<node_id>> adj_;      // sorted neighbor lists
};

// Undirected multigraph with integer edge multiplicities, no self-loops.
// Quotients and contractions live here.
class multi_graph {
public:
    multi_graph() = default;
    explicit multi_graph(node_id n) : n_(n) {
        if (n < 0) throw validation_error("multigraph: negative node count");
    }
    static multi_graph from_graph(const contiguity_graph& g);

    node_id num_nodes() const { return n_; }
    const std::map<edge, std::int64_t>& edges() const { return edges_; }
    std::int64_t multiplicity(node_id u, node_id v) const;
    std::int64_t total_multiplicity() const;

    void add_edge(node_id u, node_id v, std::int64_t mult);

    // Contract (g,h) into a single node. The merged node takes index
    // min(g,h); nodes above max(g,h) shift down by one. Parallel edges to
    // common neighbors accumulate; (g,h) edges disappear.
    multi_graph contract_edge(node_id g, node_id h) const;

    bool is_connected() const;

private:
    node_id n_ = 0;
    std::map<edge, std::int64_t> edges_;  // key normalized u < v
};

// Ordered partition of [0, n) into K nonempty clusters.
class partition {
public:
    partition() = default;
    static partition from_assignment(std::vector<cluster_id> assignment);
    static partition from_clusters(node_id n, std::vector<std::vector<node_id>> clusters);

    node_id num_nodes() const { return static_cast<node_id>(assignment_.size()); }
    cluster_id num_clusters() const { return k_; }
    const std::vector<cluster_id>& assignment() const { return assignment_; }
    const std::vector<std::vector<node_id>>& clusters() const { return clusters_; }

private:
    std::vector<cluster_id> assignment_;
    std::vector<std::vector<node_id>> clusters_;  // each sorted ascending
    cluster_id k_ = 0;
};

// Number of edges with one endpoint in a and the other in b; a, b disjoint.
std::int64_t cutset_size(const contiguity_graph& g, const std::vector<node_id>& a,
                         const std::vector<node_id>& b);

// Aggregate multigraph G<>c: one node per cluster, multiplicities given by
// cutset sizes.
multi_graph quotient_multigraph(const contiguity_graph& g, const partition& p);

}  // namespace bcc
