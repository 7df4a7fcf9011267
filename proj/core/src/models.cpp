#include "bcc/models.hpp"

#include <cmath>
#include <numeric>

namespace bcc {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2*pi)/2

bool is_count(double x) { return x >= 0.0 && std::abs(x - std::round(x)) < 1e-9; }

void check_same_shape(const suff_stats& a, const suff_stats& b) {
    if (a.variant != b.variant || a.dims != b.dims)
        throw validation_error("suff_stats: variant or dimensionality mismatch");
}

double log_marginal_gaussian(const suff_stats& t, const normal_gamma_params& p) {
    const double n = static_cast<double>(t.n);
    const double tau_n = p.tau + n;
    const double kappa_n = p.kappa + 0.5 * n;
    double out = t.log_base;
    for (int d = 0; d < t.dims; ++d) {
        const double s1 = t.sum[static_cast<std::size_t>(d)];
        const double s2 = t.sum_sq[static_cast<std::size_t>(d)];
        const double mean = s1 / n;
        const double ss = std::max(0.0, s2 - s1 * s1 / n);  // Σ(x-x̄)², clipped at roundoff
        const double dev = mean - p.mu0[static_cast<std::size_t>(d)];
        const double beta_n =
            p.beta[static_cast<std::size_t>(d)] + 0.5 * ss + 0.5 * p.tau * n * dev * dev / tau_n;
        out += 0.5 * (std::log(p.tau) - std::log(tau_n));
        out += std::lgamma(kappa_n) - std::lgamma(p.kappa);
        out += p.kappa * std::log(p.beta[static_cast<std::size_t>(d)]) - kappa_n * std::log(beta_n);
    }
    return out;
}

double log_marginal_poisson(const suff_stats& t, const gamma_params& p) {
    const double n = static_cast<double>(t.n);
    double out = t.log_base;
    for (int d = 0; d < t.dims; ++d) {
        const double a = p.shape[static_cast<std::size_t>(d)];
        const double b = p.rate[static_cast<std::size_t>(d)];
        const double s = t.sum[static_cast<std::size_t>(d)];
        out += std::lgamma(a + s) - std::lgamma(a) + a * std::log(b) - (a + s) * std::log(b + n);
    }
    return out;
}

double log_marginal_multinomial(const suff_stats& t, const dirichlet_params& p) {
    double out = t.log_base;
    double alpha_total = 0.0, count_total = 0.0;
    for (int d = 0; d < t.dims; ++d) {
        const double a = p.concentration[static_cast<std::size_t>(d)];
        const double c = t.sum[static_cast<std::size_t>(d)];
        out += std::lgamma(a + c) - std::lgamma(a);
        alpha_total += a;
        count_total += c;
    }
    out += std::lgamma(alpha_total) - std::lgamma(alpha_total + count_total);
    return out;
}

}  // namespace

void model_spec::validate() const {
    if (dims <= 0) throw validation_error("model_spec: dims must be positive");
    switch (variant) {
        case model_variant::gaussian_diag: {
            const auto& p = std::get<normal_gamma_params>(params);
            if (static_cast<int>(p.mu0.size()) != dims || static_cast<int>(p.beta.size()) != dims)
                throw validation_error("model_spec: hyperparameter dimensionality mismatch");
            if (p.tau <= 0.0 || p.kappa <= 0.0)
                throw validation_error("model_spec: tau and kappa must be positive");
            for (double b : p.beta)
                if (b <= 0.0) throw validation_error("model_spec: beta must be positive");
            break;
        }
        case model_variant::poisson_gamma: {
            const auto& p = std::get<gamma_params>(params);
            if (static_cast<int>(p.shape.size()) != dims || static_cast<int>(p.rate.size()) != dims)
                throw validation_error("model_spec: hyperparameter dimensionality mismatch");
            for (double v : p.shape)
                if (v <= 0.0) throw validation_error("model_spec: gamma shape must be positive");
            for (double v : p.rate)
                if (v <= 0.0) throw validation_error("model_spec: gamma rate must be positive");
            break;
        }
        case model_variant::multinomial_dirichlet: {
            const auto& p = std::get<dirichlet_params>(params);
            if (static_cast<int>(p.concentration.size()) != dims)
                throw validation_error("model_spec: hyperparameter dimensionality mismatch");
            for (double v : p.concentration)
                if (v <= 0.0) throw validation_error("model_spec: concentration must be positive");
            break;
        }
    }
}

suff_stats suff_stats::empty(const model_spec& spec) {
    suff_stats t;
    t.variant = spec.variant;
    t.dims = spec.dims;
    t.sum.assign(static_cast<std::size_t>(spec.dims), 0.0);
    if (spec.variant == model_variant::gaussian_diag)
        t.sum_sq.assign(static_cast<std::size_t>(spec.dims), 0.0);
    return t;
}

suff_stats suff_stats_of(std::span<const double> x, const model_spec& spec) {
    if (static_cast<int>(x.size()) != spec.dims)
        throw validation_error("suff_stats: observation dimensionality mismatch");
    suff_stats t = suff_stats::empty(spec);
    t.n = 1;
    switch (spec.variant) {
        case model_variant::gaussian_diag:
            for (int d = 0; d < spec.dims; ++d) {
                t.sum[static_cast<std::size_t>(d)] = x[static_cast<std::size_t>(d)];
                t.sum_sq[static_cast<std::size_t>(d)] =
                    x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
            }
            t.log_base = -static_cast<double>(spec.dims) * kHalfLog2Pi;
            break;
        case model_variant::poisson_gamma:
            for (int d = 0; d < spec.dims; ++d) {
                const double v = x[static_cast<std::size_t>(d)];
                if (!is_count(v))
                    throw validation_error("suff_stats: poisson observations must be non-negative integers");
                t.sum[static_cast<std::size_t>(d)] = v;
                t.log_base -= std::lgamma(v + 1.0);
            }
            break;
        case model_variant::multinomial_dirichlet: {
            double total = 0.0;
            for (int d = 0; d < spec.dims; ++d) {
                const double v = x[static_cast<std::size_t>(d)];
                if (!is_count(v))
                    throw validation_error("suff_stats: multinomial counts must be non-negative integers");
                t.sum[static_cast<std::size_t>(d)] = v;
                t.log_base -= std::lgamma(v + 1.0);
                total += v;
            }
            t.log_base += std::lgamma(total + 1.0);
            break;
        }
    }
    return t;
}

suff_stats combine(const suff_stats& a, const suff_stats& b) {
    check_same_shape(a, b);
    suff_stats out = a;
    out.n += b.n;
    for (std::size_t d = 0; d < out.sum.size(); ++d) out.sum[d] += b.sum[d];
    for (std::size_t d = 0; d < out.sum_sq.size(); ++d) out.sum_sq[d] += b.sum_sq[d];
    out.log_base += b.log_base;
    return out;
}

double log_marginal(const suff_stats& t, const model_spec& spec) {
    spec.validate();
    if (t.variant != spec.variant || t.dims != spec.dims)
        throw validation_error("log_marginal: stats do not match the model spec");
    if (t.n == 0) return 0.0;
    switch (spec.variant) {
        case model_variant::gaussian_diag:
            return log_marginal_gaussian(t, std::get<normal_gamma_params>(spec.params));
        case model_variant::poisson_gamma:
            return log_marginal_poisson(t, std::get<gamma_params>(spec.params));
        case model_variant::multinomial_dirichlet:
            return log_marginal_multinomial(t, std::get<dirichlet_params>(spec.params));
    }
    throw validation_error("log_marginal: unknown variant");
}

double delta_lobs(const suff_stats& tg, const suff_stats& th, const model_spec& spec) {
    return log_marginal(combine(tg, th), spec) - log_marginal(tg, spec) - log_marginal(th, spec);
}

model_spec default_hyperparams(const data_matrix& x, model_variant variant,
                               std::vector<std::string>* warnings) {
    model_spec spec;
    spec.variant = variant;
    spec.dims = x.cols;
    const double n = static_cast<double>(x.rows);
    std::vector<double> mean(static_cast<std::size_t>(x.cols), 0.0);
    std::vector<double> var(static_cast<std::size_t>(x.cols), 0.0);
    for (node_id i = 0; i < x.rows; ++i) {
        auto r = x.row(i);
        for (int d = 0; d < x.cols; ++d) mean[static_cast<std::size_t>(d)] += r[static_cast<std::size_t>(d)];
    }
    for (auto& m : mean) m /= n;
    if (variant == model_variant::gaussian_diag && x.rows < 2)
        throw validation_error("default_hyperparams: need at least 2 observations for variance defaults");
    for (node_id i = 0; i < x.rows; ++i) {
        auto r = x.row(i);
        for (int d = 0; d < x.cols; ++d) {
            const double dev = r[static_cast<std::size_t>(d)] - mean[static_cast<std::size_t>(d)];
            var[static_cast<std::size_t>(d)] += dev * dev;
        }
    }
    if (x.rows >= 2)
        for (auto& v : var) v /= (n - 1.0);

    switch (variant) {
        case model_variant::gaussian_diag: {
            normal_gamma_params p;
            p.tau = 0.01;
            p.kappa = 1.0;
            p.mu0 = mean;
            p.beta.resize(static_cast<std::size_t>(x.cols));
            for (int d = 0; d < x.cols; ++d) {
                double b = 0.1 * var[static_cast<std::size_t>(d)];
                if (b < 1e-8) {
                    b = 1e-8;
                    if (warnings)
                        warnings->push_back("column " + std::to_string(d) +
                                            " has (near-)zero variance; beta floored at 1e-8");
                }
                p.beta[static_cast<std::size_t>(d)] = b;
            }
            spec.params = std::move(p);
            break;
        }
        case model_variant::poisson_gamma: {
            // Unit shape with rate matched to the column mean.
            gamma_params p;
            p.shape.assign(static_cast<std::size_t>(x.cols), 1.0);
            p.rate.resize(static_cast<std::size_t>(x.cols));
            for (int d = 0; d < x.cols; ++d)
                p.rate[static_cast<std::size_t>(d)] = 1.0 / std::max(mean[static_cast<std::size_t>(d)], 1e-8);
            spec.params = std::move(p);
            break;
        }
        case model_variant::multinomial_dirichlet: {
            dirichlet_params p;
            p.concentration.assign(static_cast<std::size_t>(x.cols), 1.0);
            spec.params = std::move(p);
            break;
        }
    }
    spec.validate();
    return spec;
}

}  // namespace bcc
