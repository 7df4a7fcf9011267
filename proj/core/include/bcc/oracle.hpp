#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bcc/graph.hpp"
#include "bcc/models.hpp"
#include "bcc/prior.hpp"

// Brute-force reference implementations. Deliberately slow and independent
// of the production code paths; used by tests, the verify subcommand, and
// nothing else.
namespace bcc::oracle {

struct enumeration_budget {
    node_id max_nodes = 8;
    std::int64_t max_trees = 1'000'000;
    std::int64_t max_partitions = 1'000'000;
};

// Exact spanning-tree count by filtering (n-1)-subsets of the labeled edge
// multiset. Parallel edges count as distinct.
std::int64_t enumerate_spanning_trees(const multi_graph& g,
                                      const enumeration_budget& budget = {});
std::int64_t enumerate_spanning_trees(const contiguity_graph& g,
                                      const enumeration_budget& budget = {});

// Same count by the deletion-contraction recurrence; second independent route.
std::int64_t count_trees_deletion_contraction(const multi_graph& g,
                                              const enumeration_budget& budget = {});

// Spanning trees (as edge lists over expanded parallel edges) compatible with
// the partition: every cluster induces a connected subtree.
std::int64_t count_compatible_spanning_trees(const contiguity_graph& g, const partition& p,
                                             const enumeration_budget& budget = {});

// All unordered partitions of g's nodes into k nonempty connected clusters.
// Ordered-partition counts are k! times larger.
std::vector<partition> enumerate_connected_partitions(const contiguity_graph& g, cluster_id k,
                                                      const enumeration_budget& budget = {});

struct map_result {
    partition best;
    posterior_value value;
};

// Global MAP over all compatible partitions of every size.
map_result exhaustive_map(const data_matrix& x, const contiguity_graph& g,
                          const model_spec& spec, double alpha,
                          const enumeration_budget& budget = {});

// log ∫∫ Π N(x_i | mu, 1/v) NG(mu, v | mu0, tau, kappa, beta) dmu dv by 2-d
// adaptive quadrature (relative tolerance ~1e-6). Throws numeric_error on
// non-convergence.
double quadrature_marginal_1d(const std::vector<double>& points, double mu0, double tau,
                              double kappa, double beta);

// Closed-form check for the same quantity: chained Student-t predictives.
double student_chain_marginal_1d(const std::vector<double>& points, double mu0, double tau,
                                 double kappa, double beta);

}  // namespace bcc::oracle
