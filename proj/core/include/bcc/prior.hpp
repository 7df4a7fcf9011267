#pragma once

#include <optional>

#include "bcc/graph.hpp"
#include "bcc/models.hpp"

namespace bcc {

// Un-normalized log posterior split into its three parts.
struct posterior_value {
    double log_obs = 0.0;
    double log_partition_prior = 0.0;
    double log_k_prior = 0.0;
    double total = 0.0;
};

// Truncated geometric prior on the number of clusters K in 1..n.
struct k_prior {
    double alpha = 1.0;
    node_id n = 0;

    double log_mass(cluster_id k) const;
};

double log_k_prior(cluster_id k, node_id n, double alpha);

// Spanning-tree partition prior:
//   log |{T : c ≺ T}| − log |T_G| − log C(N−1, K−1) − log K!
// Returns nullopt for infeasible partitions (some cluster disconnected);
// throws validation_error if G itself is disconnected.
std::optional<double> log_partition_prior(const contiguity_graph& g, const partition& p);

// Full posterior; nullopt iff the partition is infeasible.
std::optional<posterior_value> log_posterior(const data_matrix& x, const contiguity_graph& g,
                                             const partition& p, const model_spec& spec,
                                             double alpha);

}  // namespace bcc
