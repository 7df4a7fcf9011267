#include "bcc/prior.hpp"

#include <cmath>

#include "bcc/treecount.hpp"

namespace bcc {

double log_k_prior(cluster_id k, node_id n, double alpha) {
    if (n < 1) throw validation_error("log_k_prior: n must be positive");
    if (k < 1 || k > n) throw validation_error("log_k_prior: k out of range");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw validation_error("log_k_prior: alpha must lie in (0, 1]");
    if (std::abs(1.0 - alpha) < 1e-12) return -std::log(static_cast<double>(n));
    // log[ alpha^(k-1) (1-alpha) / (1-alpha^n) ], with 1-alpha^n via expm1.
    const double log_alpha = std::log(alpha);
    const double log_one_minus_alpha_n = std::log(-std::expm1(static_cast<double>(n) * log_alpha));
    return static_cast<double>(k - 1) * log_alpha + std::log1p(-alpha) - log_one_minus_alpha_n;
}

double k_prior::log_mass(cluster_id k) const { return log_k_prior(k, n, alpha); }

std::optional<double> log_partition_prior(const contiguity_graph& g, const partition& p) {
    if (!g.is_connected())
        throw validation_error("log_partition_prior: graph must be connected");
    if (p.num_nodes() != g.num_nodes())
        throw validation_error("log_partition_prior: partition size mismatch");
    const node_id n = g.num_nodes();
    const cluster_id k = p.num_clusters();
    for (cluster_id c = 0; c < k; ++c)
        if (!g.induced_subgraph(p.clusters()[static_cast<std::size_t>(c)]).is_connected())
            return std::nullopt;  // infeasible, not a numeric failure
    const double log_compat = log_compatible_tree_count(g, p);
    const double log_total = log_tree_count(g);
    return log_compat - log_total - log_binomial(n - 1, k - 1) - log_factorial(k);
}

std::optional<posterior_value> log_posterior(const data_matrix& x, const contiguity_graph& g,
                                             const partition& p, const model_spec& spec,
                                             double alpha) {
    if (x.rows != g.num_nodes())
        throw validation_error("log_posterior: feature rows must match graph nodes");
    auto prior = log_partition_prior(g, p);
    if (!prior) return std::nullopt;
    posterior_value v;
    for (const auto& cluster : p.clusters()) {
        suff_stats t = suff_stats::empty(spec);
        for (node_id i : cluster) t = combine(t, suff_stats_of(x.row(i), spec));
        v.log_obs += log_marginal(t, spec);
    }
    v.log_partition_prior = *prior;
    v.log_k_prior = log_k_prior(p.num_clusters(), g.num_nodes(), alpha);
    v.total = v.log_obs + v.log_partition_prior + v.log_k_prior;
    return v;
}

}  // namespace bcc
