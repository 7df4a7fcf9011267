#include "bcc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bcc::oracle {

namespace {

struct labeled_edge {
    node_id u, v;
};

std::vector<labeled_edge> expand_edges(const multi_graph& g) {
    std::vector<labeled_edge> out;
    for (const auto& [e, m] : g.edges())
        for (std::int64_t i = 0; i < m; ++i) out.push_back({e.first, e.second});
    return out;
}

// Union-find over a fixed node count; small and copied freely.
struct union_find {
    std::vector<node_id> parent;
    explicit union_find(node_id n) : parent(static_cast<std::size_t>(n)) {
        for (node_id i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    }
    node_id find(node_id x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(node_id a, node_id b) {
        node_id ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[static_cast<std::size_t>(ra)] = rb;
        return true;
    }
};

// Enumerate all spanning trees (as subsets of the labeled edge list),
// invoking visit(chosen) for each. Counts against the budget.
void for_each_spanning_tree(node_id n, const std::vector<labeled_edge>& edges,
                            const enumeration_budget& budget,
                            const std::function<void(const std::vector<int>&)>& visit) {
    if (n > budget.max_nodes)
        throw validation_error("oracle: node count exceeds enumeration budget");
    std::int64_t found = 0;
    std::vector<int> chosen;
    std::function<void(std::size_t, node_id, const union_find&)> rec =
        [&](std::size_t next, node_id picked, const union_find& uf) {
            if (picked == n - 1) {
                if (++found > budget.max_trees)
                    throw validation_error("oracle: spanning-tree budget exceeded");
                visit(chosen);
                return;
            }
            if (edges.size() - next < static_cast<std::size_t>(n - 1 - picked)) return;
            for (std::size_t i = next; i < edges.size(); ++i) {
                union_find uf2 = uf;
                if (!uf2.unite(edges[i].u, edges[i].v)) continue;
                chosen.push_back(static_cast<int>(i));
                rec(i + 1, picked + 1, uf2);
                chosen.pop_back();
            }
        };
    if (n == 1) {
        visit(chosen);  // the empty spanning tree
        return;
    }
    rec(0, 0, union_find(n));
}

std::int64_t deletion_contraction(const multi_graph& g, std::int64_t& steps,
                                  const enumeration_budget& budget) {
    if (++steps > budget.max_trees)
        throw validation_error("oracle: deletion-contraction budget exceeded");
    const node_id n = g.num_nodes();
    if (n <= 1) return 1;
    if (g.edges().empty()) return 0;
    if (!g.is_connected()) return 0;
    const auto& [e, m] = *g.edges().begin();
    std::int64_t contracted = deletion_contraction(g.contract_edge(e.first, e.second), steps, budget);
    multi_graph deleted = g;
    {
        // Rebuild without the chosen edge; multi_graph is value-like.
        multi_graph d(g.num_nodes());
        for (const auto& [e2, m2] : g.edges())
            if (e2 != e) d.add_edge(e2.first, e2.second, m2);
        deleted = d;
    }
    std::int64_t kept = deletion_contraction(deleted, steps, budget);
    return m * contracted + kept;
}

}  // namespace

std::int64_t enumerate_spanning_trees(const multi_graph& g, const enumeration_budget& budget) {
    std::int64_t count = 0;
    for_each_spanning_tree(g.num_nodes(), expand_edges(g), budget,
                           [&count](const std::vector<int>&) { ++count; });
    return count;
}

std::int64_t enumerate_spanning_trees(const contiguity_graph& g, const enumeration_budget& budget) {
    return enumerate_spanning_trees(multi_graph::from_graph(g), budget);
}

std::int64_t count_trees_deletion_contraction(const multi_graph& g,
                                              const enumeration_budget& budget) {
    if (g.num_nodes() > budget.max_nodes)
        throw validation_error("oracle: node count exceeds enumeration budget");
    std::int64_t steps = 0;
    return deletion_contraction(g, steps, budget);
}

std::int64_t count_compatible_spanning_trees(const contiguity_graph& g, const partition& p,
                                             const enumeration_budget& budget) {
    const auto edges = expand_edges(multi_graph::from_graph(g));
    const auto& assign = p.assignment();
    std::vector<std::int64_t> cluster_sizes(static_cast<std::size_t>(p.num_clusters()), 0);
    for (cluster_id c : assign) ++cluster_sizes[static_cast<std::size_t>(c)];
    std::int64_t count = 0;
    for_each_spanning_tree(g.num_nodes(), edges, budget, [&](const std::vector<int>& chosen) {
        // A forest restricted to a cluster is connected iff it has |c|-1 edges.
        std::vector<std::int64_t> intra(static_cast<std::size_t>(p.num_clusters()), 0);
        for (int idx : chosen) {
            cluster_id cu = assign[static_cast<std::size_t>(edges[static_cast<std::size_t>(idx)].u)];
            cluster_id cv = assign[static_cast<std::size_t>(edges[static_cast<std::size_t>(idx)].v)];
            if (cu == cv) ++intra[static_cast<std::size_t>(cu)];
        }
        for (cluster_id c = 0; c < p.num_clusters(); ++c)
            if (intra[static_cast<std::size_t>(c)] != cluster_sizes[static_cast<std::size_t>(c)] - 1)
                return;
        ++count;
    });
    return count;
}

std::vector<partition> enumerate_connected_partitions(const contiguity_graph& g, cluster_id k,
                                                      const enumeration_budget& budget) {
    const node_id n = g.num_nodes();
    if (n > budget.max_nodes)
        throw validation_error("oracle: node count exceeds enumeration budget");
    if (k < 1 || k > n) throw validation_error("oracle: k out of range");
    std::vector<partition> out;
    std::vector<cluster_id> assign(static_cast<std::size_t>(n), 0);
    std::int64_t visited = 0;
    // Canonical assignment (cluster c first appears before cluster c+1)
    // enumerates each unordered partition exactly once.
    std::function<void(node_id, cluster_id)> rec = [&](node_id i, cluster_id used) {
        if (i == n) {
            if (used != k) return;
            if (++visited > budget.max_partitions)
                throw validation_error("oracle: partition budget exceeded");
            auto p = partition::from_assignment(assign);
            bool ok = true;
            for (const auto& cluster : p.clusters())
                if (!g.induced_subgraph(cluster).is_connected()) {
                    ok = false;
                    break;
                }
            if (ok) out.push_back(std::move(p));
            return;
        }
        if (used + (n - i) < k) return;  // cannot open enough clusters anymore
        cluster_id limit = std::min<cluster_id>(used + 1, k);
        for (cluster_id c = 0; c < limit; ++c) {
            assign[static_cast<std::size_t>(i)] = c;
            rec(i + 1, std::max(used, c + 1));
        }
    };
    rec(0, 0);
    return out;
}

map_result exhaustive_map(const data_matrix& x, const contiguity_graph& g,
                          const model_spec& spec, double alpha,
                          const enumeration_budget& budget) {
    std::optional<map_result> best;
    for (cluster_id k = 1; k <= g.num_nodes(); ++k) {
        for (auto& p : enumerate_connected_partitions(g, k, budget)) {
            auto v = log_posterior(x, g, p, spec, alpha);
            if (!v) continue;
            if (!best || v->total > best->value.total)
                best = map_result{std::move(p), *v};
        }
    }
    if (!best) throw validation_error("oracle: no feasible partition (disconnected graph?)");
    return std::move(*best);
}

namespace {

// Adaptive Simpson on f over [a,b], pre-split into panels so narrow peaks
// are not missed. f must be nonnegative and O(1) at its peak.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int panels) {
    struct simpson {
        static double recurse(const std::function<double(double)>& f, double a, double m,
                              double b, double fa, double fm, double fb, double whole,
                              double tol, int depth) {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth > 40) throw numeric_error("quadrature: refinement did not converge");
            if (std::abs(left + right - whole) <= 15.0 * tol || (b - a) < 1e-13)
                return left + right + (left + right - whole) / 15.0;
            return recurse(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
                   recurse(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        }
    };
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + i * h, pb = pa + h, pm = 0.5 * (pa + pb);
        const double fa = f(pa), fm = f(pm), fb = f(pb);
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson::recurse(f, pa, pm, pb, fa, fm, fb, whole, tol / panels, 0);
    }
    return total;
}

}  // namespace

double quadrature_marginal_1d(const std::vector<double>& points, double mu0, double tau,
                              double kappa, double beta) {
    if (points.size() > 10)
        throw validation_error("quadrature_marginal_1d: at most 10 points");
    if (tau <= 0 || kappa <= 0 || beta <= 0)
        throw validation_error("quadrature_marginal_1d: hyperparameters must be positive");
    const std::size_t n = points.size();
    if (n == 0) return 0.0;

    const double log_2pi = std::log(2.0 * M_PI);
    // Log integrand over (mu, u) with v = exp(u); includes the Jacobian.
    auto log_f = [&](double mu, double u) {
        const double v = std::exp(u);
        double s = 0.0;
        for (double x : points) s += 0.5 * (u - log_2pi) - 0.5 * v * (x - mu) * (x - mu);
        s += 0.5 * (std::log(tau) + u - log_2pi) - 0.5 * tau * v * (mu - mu0) * (mu - mu0);
        s += kappa * std::log(beta) - std::lgamma(kappa) + (kappa - 1.0) * u - beta * v;
        return s + u;
    };

    // Locate the mode by iterated grid refinement.
    double mu_lo = mu0, mu_hi = mu0;
    for (double x : points) {
        mu_lo = std::min(mu_lo, x);
        mu_hi = std::max(mu_hi, x);
    }
    const double spread = std::max(1.0, mu_hi - mu_lo);
    mu_lo -= 2.0 * spread;
    mu_hi += 2.0 * spread;
    double u_lo = -30.0, u_hi = 30.0;
    double best_mu = 0.5 * (mu_lo + mu_hi), best_u = 0.0, best = -1e300;
    for (int round = 0; round < 6; ++round) {
        const int grid = 41;
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                const double mu = mu_lo + (mu_hi - mu_lo) * i / (grid - 1.0);
                const double u = u_lo + (u_hi - u_lo) * j / (grid - 1.0);
                const double val = log_f(mu, u);
                if (val > best) {
                    best = val;
                    best_mu = mu;
                    best_u = u;
                }
            }
        }
        const double mu_step = (mu_hi - mu_lo) / (grid - 1.0);
        const double u_step = (u_hi - u_lo) / (grid - 1.0);
        mu_lo = best_mu - 2.0 * mu_step;
        mu_hi = best_mu + 2.0 * mu_step;
        u_lo = best_u - 2.0 * u_step;
        u_hi = best_u + 2.0 * u_step;
    }
    const double log_fmax = best;

    const double nd = static_cast<double>(n);
    auto inner = [&](double u) {
        const double v = std::exp(u);
        const double prec = (nd + tau) * v;
        const double width = 50.0 / std::sqrt(prec);
        double center = tau * mu0;
        for (double x : points) center += x;
        center /= (tau + nd);
        auto f_mu = [&](double mu) { return std::exp(log_f(mu, u) - log_fmax); };
        return adaptive_simpson(f_mu, center - width, center + width, 1e-8, 32);
    };
    const double total =
        adaptive_simpson(inner, best_u - 55.0, best_u + 45.0, 1e-8, 64);
    if (!(total > 0.0) || !std::isfinite(total))
        throw numeric_error("quadrature_marginal_1d: integral did not converge");
    return std::log(total) + log_fmax;
}

double student_chain_marginal_1d(const std::vector<double>& points, double mu0, double tau,
                                 double kappa, double beta) {
    double m = mu0, t = tau, k = kappa, b = beta;
    double out = 0.0;
    for (double x : points) {
        const double df = 2.0 * k;
        const double scale_sq = b * (t + 1.0) / (t * k);
        const double z = (x - m) * (x - m) / (df * scale_sq);
        out += std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
               0.5 * std::log(df * M_PI * scale_sq) - 0.5 * (df + 1.0) * std::log1p(z);
        b += 0.5 * t * (x - m) * (x - m) / (t + 1.0);
        m = (t * m + x) / (t + 1.0);
        t += 1.0;
        k += 0.5;
    }
    return out;
}

}  // namespace bcc::oracle
