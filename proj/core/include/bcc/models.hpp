#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bcc/common.hpp"

namespace bcc {

// Row-major observation matrix, one row per node.
struct data_matrix {
    node_id rows = 0;
    int cols = 0;
    std::vector<double> values;

    std::span<const double> row(node_id i) const {
        return {values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols),
                static_cast<std::size_t>(cols)};
    }
};

enum class model_variant { gaussian_diag, poisson_gamma, multinomial_dirichlet };

// Normal-Gamma prior per dimension: precision V_d ~ Gamma(kappa, beta_d),
// mean mu_d | V_d ~ N(mu0_d, (tau V_d)^-1).
struct normal_gamma_params {
    std::vector<double> mu0;
    double tau = 0.0;
    double kappa = 0.0;
    std::vector<double> beta;
};

struct gamma_params {
    std::vector<double> shape;
    std::vector<double> rate;
};

struct dirichlet_params {
    std::vector<double> concentration;
};

struct model_spec {
    model_variant variant = model_variant::gaussian_diag;
    int dims = 0;
    std::variant<normal_gamma_params, gamma_params, dirichlet_params> params;

    void validate() const;
};

// Additive sufficient statistics of a cluster. log_base carries the summed
// log base measures so log_marginal reports the exact integrated likelihood.
struct suff_stats {
    model_variant variant = model_variant::gaussian_diag;
    int dims = 0;
    std::int64_t n = 0;
    std::vector<double> sum;     // per-dim Σx (or category totals)
    std::vector<double> sum_sq;  // per-dim Σx², gaussian only
    double log_base = 0.0;

    static suff_stats empty(const model_spec& spec);
};

suff_stats suff_stats_of(std::span<const double> x, const model_spec& spec);
suff_stats combine(const suff_stats& a, const suff_stats& b);

// Integrated log-likelihood of the cluster: log ∫ Π p(x_i|θ) p(θ) dθ,
// computed from the conjugate normalizer ratio plus the accumulated base
// measure. Empty stats give 0.
double log_marginal(const suff_stats& t, const model_spec& spec);

// Merge score contribution of the observation model:
// log_marginal(tg ⊕ th) − log_marginal(tg) − log_marginal(th).
double delta_lobs(const suff_stats& tg, const suff_stats& th, const model_spec& spec);

// Data-driven hyperparameters. For gaussian_diag: tau=0.01, kappa=1,
// beta_d = 0.1 * sample variance (floored at 1e-8), mu0 = column means.
model_spec default_hyperparams(const data_matrix& x, model_variant variant,
                               std::vector<std::string>* warnings = nullptr);

}  // namespace bcc
