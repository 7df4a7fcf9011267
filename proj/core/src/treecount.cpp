#include "bcc/treecount.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace bcc {

namespace {

constexpr double kPivotFloor = 1e-10;

// Reverse Cuthill-McKee over an adjacency-list pattern; deterministic
// (min-degree, min-index seeds; neighbors visited by degree then index).
std::vector<int> rcm_order(const std::vector<std::vector<int>>& adj) {
    const int m = static_cast<int>(adj.size());
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(m));
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    auto degree = [&adj](int u) { return static_cast<int>(adj[static_cast<std::size_t>(u)].size()); };
    for (;;) {
        int seed = -1;
        for (int u = 0; u < m; ++u)
            if (!seen[static_cast<std::size_t>(u)] &&
                (seed == -1 || degree(u) < degree(seed) ||
                 (degree(u) == degree(seed) && u < seed)))
                seed = u;
        if (seed == -1) break;
        std::size_t head = order.size();
        order.push_back(seed);
        seen[static_cast<std::size_t>(seed)] = 1;
        while (head < order.size()) {
            int u = order[head++];
            std::vector<int> next;
            for (int v : adj[static_cast<std::size_t>(u)])
                if (!seen[static_cast<std::size_t>(v)]) next.push_back(v);
            std::sort(next.begin(), next.end(), [&](int x, int y) {
                return std::pair(degree(x), x) < std::pair(degree(y), y);
            });
            for (int v : next) {
                seen[static_cast<std::size_t>(v)] = 1;
                order.push_back(v);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

std::vector<std::tuple<node_id, node_id, double>> weighted_edges(const contiguity_graph& g) {
    std::vector<std::tuple<node_id, node_id, double>> out;
    out.reserve(g.num_edges());
    for (const auto& [u, v] : g.edges()) out.emplace_back(u, v, 1.0);
    return out;
}

std::vector<std::tuple<node_id, node_id, double>> weighted_edges(const multi_graph& g) {
    std::vector<std::tuple<node_id, node_id, double>> out;
    out.reserve(g.edges().size());
    for (const auto& [e, m] : g.edges())
        out.emplace_back(e.first, e.second, static_cast<double>(m));
    return out;
}

}  // namespace

ldl_factor ldl_factor::factorize_impl(
    node_id n, const std::vector<std::tuple<node_id, node_id, double>>& edges, ordering ord) {
    ldl_factor f;
    if (n <= 1) return f;
    const int m = n - 1;  // removed node: highest index
    f.m_ = m;
    f.removed_col_.assign(static_cast<std::size_t>(m), 0.0);

    std::vector<std::vector<int>> pattern(static_cast<std::size_t>(m));
    for (const auto& [u, v, w] : edges) {
        if (u < m && v < m) {
            pattern[static_cast<std::size_t>(u)].push_back(v);
            pattern[static_cast<std::size_t>(v)].push_back(u);
        } else {
            node_id other = (u < m) ? u : v;
            f.removed_col_[static_cast<std::size_t>(other)] -= w;
            f.removed_deg_ += w;
        }
    }

    f.perm_ = (ord == ordering::rcm) ? rcm_order(pattern)
                                     : [m] {
                                           std::vector<int> id(static_cast<std::size_t>(m));
                                           for (int i = 0; i < m; ++i) id[static_cast<std::size_t>(i)] = i;
                                           return id;
                                       }();
    f.iperm_.resize(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) f.iperm_[static_cast<std::size_t>(f.perm_[static_cast<std::size_t>(p)])] = p;

    // Dense lower-triangular working copy of the permuted reduced Laplacian.
    const std::size_t mm = static_cast<std::size_t>(m);
    std::vector<double> w_mat(mm * mm, 0.0);
    auto at = [&w_mat, mm](int i, int j) -> double& {
        return w_mat[static_cast<std::size_t>(i) * mm + static_cast<std::size_t>(j)];
    };
    double scale = 1.0;
    for (const auto& [u, v, w] : edges) {
        if (u < m && v < m) {
            int pu = f.iperm_[static_cast<std::size_t>(u)];
            int pv = f.iperm_[static_cast<std::size_t>(v)];
            at(std::max(pu, pv), std::min(pu, pv)) -= w;
            at(pu, pu) += w;
            at(pv, pv) += w;
        } else {
            node_id other = (u < m) ? u : v;
            int po = f.iperm_[static_cast<std::size_t>(other)];
            at(po, po) += w;
        }
    }
    for (int i = 0; i < m; ++i) scale = std::max(scale, at(i, i));

    f.diag_.assign(mm, 0.0);
    for (int j = 0; j < m; ++j) {
        double d = at(j, j);
        if (d <= kPivotFloor * scale)
            throw numeric_error("ldl_factorize: zero pivot (graph disconnected)");
        f.diag_[static_cast<std::size_t>(j)] = d;
        for (int i = j + 1; i < m; ++i) at(i, j) /= d;
        for (int k = j + 1; k < m; ++k) {
            double ukj = at(k, j);
            if (ukj == 0.0) continue;
            double fac = ukj * d;
            for (int i = k; i < m; ++i) at(i, k) -= at(i, j) * fac;
        }
    }

    f.col_off_.resize(mm + 1);
    std::size_t off = 0;
    for (int j = 0; j <= m; ++j) {
        f.col_off_[static_cast<std::size_t>(j)] = off;
        if (j < m) off += static_cast<std::size_t>(m - 1 - j);
    }
    f.cols_.resize(off);
    for (int j = 0; j < m; ++j)
        for (int i = j + 1; i < m; ++i)
            f.cols_[f.col_begin(j) + static_cast<std::size_t>(i - j - 1)] = at(i, j);
    return f;
}

ldl_factor ldl_factor::factorize(const contiguity_graph& g, ordering ord) {
    return factorize_impl(g.num_nodes(), weighted_edges(g), ord);
}

ldl_factor ldl_factor::factorize(const multi_graph& g, ordering ord) {
    return factorize_impl(g.num_nodes(), weighted_edges(g), ord);
}

double ldl_factor::log_det() const {
    double s = 0.0;
    for (double d : diag_) s += std::log(d);
    return s;
}

// Bennett's algorithm: updates the factor of A to the factor of
// A + alpha * w w^T, consuming w (permuted coordinates). Skips pivots where
// w is exactly zero, so sparse vectors only touch their fill path.
void ldl_factor::bennett(double* w, double alpha, int start_pivot) {
    for (int j = start_pivot; j < m_; ++j) {
        const double p = w[j];
        if (p == 0.0) continue;
        const double dj = diag_[static_cast<std::size_t>(j)];
        const double dnew = dj + alpha * p * p;
        if (dnew <= kPivotFloor * dj)
            throw numeric_error("rank-one downdate lost positive definiteness");
        const double beta = alpha * p / dnew;
        alpha *= dj / dnew;
        diag_[static_cast<std::size_t>(j)] = dnew;
        double* col = cols_.data() + col_begin(j);
        const int len = m_ - 1 - j;
        for (int r = 0; r < len; ++r) {
            w[j + 1 + r] -= p * col[r];
            col[r] += beta * w[j + 1 + r];
        }
    }
    ++updates_;
}

void ldl_factor::rank_one_update(std::span<const sparse_entry> w, double weight) {
    if (weight <= 0.0) throw validation_error("rank_one_update: weight must be positive");
    work_.assign(static_cast<std::size_t>(m_), 0.0);
    int first = m_;
    for (const auto& [idx, val] : w) {
        int p = iperm_[static_cast<std::size_t>(idx)];
        work_[static_cast<std::size_t>(p)] = val;
        first = std::min(first, p);
    }
    bennett(work_.data(), weight, first);
}

void ldl_factor::rank_one_downdate(std::span<const sparse_entry> w, double weight) {
    if (weight <= 0.0) throw validation_error("rank_one_downdate: weight must be positive");
    work_.assign(static_cast<std::size_t>(m_), 0.0);
    int first = m_;
    for (const auto& [idx, val] : w) {
        int p = iperm_[static_cast<std::size_t>(idx)];
        work_[static_cast<std::size_t>(p)] = val;
        first = std::min(first, p);
    }
    bennett(work_.data(), -weight, first);
}

namespace {

// Update vector for edge (u,v) in reduced coordinates: +1/-1, or a single
// +1 when one endpoint is the removed node.
int edge_vector(int u, int v, sparse_entry out[2]) {
    int k = 0;
    if (u != ldl_factor::removed_index()) {
        out[k] = {u, 1.0};
        ++k;
    }
    if (v != ldl_factor::removed_index()) {
        out[k] = {v, k == 1 ? -1.0 : 1.0};
        ++k;
    }
    if (k == 0) throw validation_error("edge update: both endpoints removed");
    return k;
}

}  // namespace

void ldl_factor::add_edge(int u, int v, double weight) {
    sparse_entry w[2];
    int k = edge_vector(u, v, w);
    rank_one_update(std::span<const sparse_entry>(w, static_cast<std::size_t>(k)), weight);
}

void ldl_factor::remove_edge(int u, int v, double weight) {
    sparse_entry w[2];
    int k = edge_vector(u, v, w);
    rank_one_downdate(std::span<const sparse_entry>(w, static_cast<std::size_t>(k)), weight);
}

void ldl_factor::delete_row(int u) {
    const int t = iperm_[static_cast<std::size_t>(u)];
    work_.assign(static_cast<std::size_t>(m_), 0.0);
    const double d = diag_[static_cast<std::size_t>(t)];
    double* col = cols_.data() + col_begin(t);
    for (int i = t + 1; i < m_; ++i) {
        work_[static_cast<std::size_t>(i)] = col[i - t - 1];
        col[i - t - 1] = 0.0;
    }
    for (int j = 0; j < t; ++j)
        cols_[col_begin(j) + static_cast<std::size_t>(t - j - 1)] = 0.0;
    diag_[static_cast<std::size_t>(t)] = 1.0;
    bennett(work_.data(), d, t + 1);
}

double ldl_factor::reconstruct(int i, int j) const {
    int a = iperm_[static_cast<std::size_t>(i)];
    int b = iperm_[static_cast<std::size_t>(j)];
    if (a < b) std::swap(a, b);
    auto u_entry = [this](int row, int colj) {
        if (row == colj) return 1.0;
        return cols_[col_begin(colj) + static_cast<std::size_t>(row - colj - 1)];
    };
    double s = 0.0;
    for (int k = 0; k <= b; ++k)
        s += u_entry(a, k) * diag_[static_cast<std::size_t>(k)] * u_entry(b, k);
    return s;
}

ldl_factor merge_factors(const ldl_factor& a, const ldl_factor& b,
                         const std::vector<std::pair<int, int>>& cut_edges) {
    if (cut_edges.empty())
        throw validation_error("merge_factors: empty cutset (union disconnected)");
    const int na = a.m_ + 1;
    const int nb = b.m_ + 1;
    const int m = na + nb - 1;

    ldl_factor f;
    f.m_ = m;
    f.perm_.resize(static_cast<std::size_t>(m));
    for (int p = 0; p < a.m_; ++p) f.perm_[static_cast<std::size_t>(p)] = a.perm_[static_cast<std::size_t>(p)];
    f.perm_[static_cast<std::size_t>(na - 1)] = na - 1;  // a's removed node, now interior
    for (int p = 0; p < b.m_; ++p)
        f.perm_[static_cast<std::size_t>(na + p)] = na + b.perm_[static_cast<std::size_t>(p)];
    f.iperm_.resize(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) f.iperm_[static_cast<std::size_t>(f.perm_[static_cast<std::size_t>(p)])] = p;

    f.col_off_.resize(static_cast<std::size_t>(m) + 1);
    std::size_t off = 0;
    for (int j = 0; j <= m; ++j) {
        f.col_off_[static_cast<std::size_t>(j)] = off;
        if (j < m) off += static_cast<std::size_t>(m - 1 - j);
    }
    f.cols_.assign(off, 0.0);
    f.diag_.assign(static_cast<std::size_t>(m), 0.0);

    // Block 1: a's factor, grounded at a's removed node via one border row.
    for (int j = 0; j < a.m_; ++j) {
        f.diag_[static_cast<std::size_t>(j)] = a.diag_[static_cast<std::size_t>(j)];
        const double* src = a.cols_.data() + a.col_begin(j);
        double* dst = f.cols_.data() + f.col_begin(j);
        std::copy(src, src + (a.m_ - 1 - j), dst);
    }
    const int ta = na - 1;  // pivot position of a's removed node
    {
        std::vector<double> z(static_cast<std::size_t>(a.m_));
        for (int p = 0; p < a.m_; ++p)
            z[static_cast<std::size_t>(p)] =
                a.removed_col_[static_cast<std::size_t>(a.perm_[static_cast<std::size_t>(p)])];
        for (int j = 0; j < a.m_; ++j) {  // forward solve U z = border column
            const double zj = z[static_cast<std::size_t>(j)];
            if (zj == 0.0) continue;
            const double* col = a.cols_.data() + a.col_begin(j);
            for (int i = j + 1; i < a.m_; ++i)
                z[static_cast<std::size_t>(i)] -= zj * col[i - j - 1];
        }
        double dnew = a.removed_deg_ + 1.0;  // +1: temporary grounding term
        for (int j = 0; j < a.m_; ++j) {
            const double zj = z[static_cast<std::size_t>(j)];
            const double dj = a.diag_[static_cast<std::size_t>(j)];
            f.cols_[f.col_begin(j) + static_cast<std::size_t>(ta - j - 1)] = zj / dj;
            dnew -= zj * zj / dj;
        }
        if (dnew <= kPivotFloor) throw numeric_error("merge_factors: grounded border not PD");
        f.diag_[static_cast<std::size_t>(ta)] = dnew;
    }

    // Block 2: b's factor, shifted.
    for (int j = 0; j < b.m_; ++j) {
        f.diag_[static_cast<std::size_t>(na + j)] = b.diag_[static_cast<std::size_t>(j)];
        const double* src = b.cols_.data() + b.col_begin(j);
        double* dst = f.cols_.data() + f.col_begin(na + j);
        std::copy(src, src + (b.m_ - 1 - j), dst);
    }

    // Removed-node column of the union (= b's removed node).
    f.removed_col_.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < b.m_; ++i)
        f.removed_col_[static_cast<std::size_t>(na + i)] = b.removed_col_[static_cast<std::size_t>(i)];
    f.removed_deg_ = b.removed_deg_;

    f.updates_ = a.updates_ + b.updates_;

    // Cut edges, grouped so parallel edges apply as one weighted update.
    std::map<std::pair<int, int>, double> grouped;
    for (const auto& [ua, vb] : cut_edges) {
        if (ua < 0 || ua >= na || vb < 0 || vb >= nb)
            throw validation_error("merge_factors: cut edge endpoint out of range");
        grouped[{ua, vb}] += 1.0;
    }
    for (const auto& [e, w] : grouped) {
        const auto& [ua, vb] = e;
        if (vb == nb - 1) {
            f.removed_col_[static_cast<std::size_t>(ua)] -= w;
            f.removed_deg_ += w;
            f.add_edge(ua, ldl_factor::removed_index(), w);
        } else {
            f.add_edge(ua, na + vb, w);
        }
    }

    // Drop the temporary grounding.
    sparse_entry g{na - 1, 1.0};
    f.rank_one_downdate(std::span<const sparse_entry>(&g, 1), 1.0);
    return f;
}

ldl_factor downdate_factor(ldl_factor f,
                           const std::vector<std::pair<int, int>>& removed_edges) {
    std::map<std::pair<int, int>, double> grouped;
    for (const auto& [u, v] : removed_edges) grouped[{u, v}] += 1.0;
    for (const auto& [e, w] : grouped) f.remove_edge(e.first, e.second, w);
    return f;
}

double log_tree_count(const contiguity_graph& g) {
    if (g.num_nodes() <= 1) return 0.0;
    if (!g.is_connected())
        throw validation_error("log_tree_count: graph is disconnected");
    return ldl_factor::factorize(g).log_det();
}

double log_tree_count(const multi_graph& g) {
    if (g.num_nodes() <= 1) return 0.0;
    if (!g.is_connected())
        throw validation_error("log_tree_count: multigraph is disconnected");
    return ldl_factor::factorize(g).log_det();
}

double log_compatible_tree_count(const contiguity_graph& g, const partition& p) {
    if (p.num_nodes() != g.num_nodes())
        throw validation_error("log_compatible_tree_count: partition size mismatch");
    double total = 0.0;
    for (cluster_id k = 0; k < p.num_clusters(); ++k) {
        auto sub = g.induced_subgraph(p.clusters()[static_cast<std::size_t>(k)]);
        if (!sub.is_connected()) {
            std::ostringstream msg;
            msg << "log_compatible_tree_count: cluster " << k << " induces a disconnected subgraph";
            throw validation_error(msg.str());
        }
        total += log_tree_count(sub);
    }
    total += log_tree_count(quotient_multigraph(g, p));
    return total;
}

}  // namespace bcc
