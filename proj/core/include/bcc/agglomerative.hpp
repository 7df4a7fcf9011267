#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bcc/graph.hpp"
#include "bcc/models.hpp"
#include "bcc/prior.hpp"
#include "bcc/treecount.hpp"

namespace bcc {

// One cluster of the running agglomeration. members defines the cluster's
// local node numbering (position = local index), which the factor shares.
struct cluster_state {
    std::vector<node_id> members;
    suff_stats stats;
    ldl_factor factor;  // of G[members], reduced at the last member
    double log_intra_trees = 0.0;
    int version = 0;
    bool alive = true;
};

struct merge_record {
    int step = 0;             // 1-based
    cluster_id left = 0;      // left < right
    cluster_id right = 0;
    cluster_id merged = 0;    // = leaf_count + step - 1
    double bound_score = 0.0;
    double delta_obs = 0.0;
    double log_intra_trees = 0.0;  // log |T_{G[merged cluster]}|
    std::int64_t cut_multiplicity = 0;
};

// Full merge tree plus, once backward_pass has run, the exact per-K
// posterior values and the MAP index.
struct hierarchy {
    node_id leaf_count = 0;
    std::vector<merge_record> merges;      // leaf_count - 1 entries
    std::vector<posterior_value> per_k;    // index K in 1..leaf_count; [0] unused
    cluster_id map_k = 0;                  // 0 until backward_pass runs
    double alpha = 1.0;
    bool has_posteriors = false;

    // Partition after replaying the first leaf_count - k merges.
    partition cut_at(cluster_id k) const;
    // Smallest original node in a cluster id (leaf or merged); used for
    // deterministic orderings.
    node_id min_member(cluster_id c) const;
};

struct merge_eval {
    double bound_score = 0.0;
    double delta_obs = 0.0;
    ldl_factor union_factor;  // of G[a ∪ b], local order: a's members then b's
};

// Δ^bound of merging a and b: ΔL^obs plus
// log( |T_union| / (|cut| · |T_a| · |T_b|) ). cut_edges are (a-local,
// b-local) pairs and must be nonempty.
merge_eval score_merge(const cluster_state& a, const cluster_state& b,
                       const std::vector<std::pair<int, int>>& cut_edges,
                       const model_spec& spec);
double delta_bound(const cluster_state& a, const cluster_state& b,
                   const std::vector<std::pair<int, int>>& cut_edges,
                   const model_spec& spec);

struct fit_stats {
    std::int64_t candidates_scored = 0;
    std::int64_t initial_candidates = 0;
    std::int64_t rescored_after_merge = 0;  // == sum over steps of quotient degree of the merged cluster
    std::int64_t heap_pops = 0;
    std::int64_t stale_pops = 0;
    std::int64_t cache_hits = 0;
    std::int64_t cache_misses = 0;
    std::int64_t factor_refreshes = 0;
};

// Forward pass of the greedy engine: leaf_count - 1 merges ranked by
// Δ^bound with a lazily invalidated heap. per_k is left empty.
hierarchy fit(const data_matrix& x, const contiguity_graph& g, const model_spec& spec,
              fit_stats* stats = nullptr);

// Fills per_k with the exact posterior of every replayed partition by
// maintaining the quotient-Laplacian factor across contractions, and sets
// map_k. alpha is the truncated-geometric prior parameter.
void backward_pass(hierarchy& h, const contiguity_graph& g, const data_matrix& x,
                   const model_spec& spec, double alpha);

}  // namespace bcc
