#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bcc/graph.hpp"

namespace bcc {

// Entry of a sparse symmetric rank-one update vector, in the factor's
// local (pre-permutation) coordinates.
struct sparse_entry {
    int index;
    double value;
};

enum class ordering {
    rcm,      // reverse Cuthill-McKee on the reduced pattern
    natural,  // identity permutation
};

// LDL^T factorization of a reduced graph Laplacian: for an n-node connected
// graph the factored matrix is the Laplacian with the highest-numbered
// node's row and column removed (dim = n-1), symmetrically permuted by a
// fill-reducing ordering. U is unit lower triangular, D strictly positive.
//
// The factor supports Bennett-style rank-one updates and downdates, row
// deletion (the deleted row becomes an identity row and stops contributing
// to the determinant), and block merging, which is what the clustering
// engine uses to maintain spanning-tree counts across merges without
// refactorizing.
class ldl_factor {
public:
    ldl_factor() = default;  // empty factor: single-node graph, log_det = 0

    static ldl_factor factorize(const contiguity_graph& g, ordering ord = ordering::rcm);
    static ldl_factor factorize(const multi_graph& g, ordering ord = ordering::rcm);

    int dim() const { return m_; }
    double log_det() const;
    // Cumulative rank-one operations since the last from-scratch factorization.
    int rank_updates() const { return updates_; }

    // A += weight * w w^T  (weight > 0); w given in local coordinates.
    void rank_one_update(std::span<const sparse_entry> w, double weight);
    // A -= weight * w w^T; throws numeric_error if positive definiteness is lost.
    void rank_one_downdate(std::span<const sparse_entry> w, double weight);

    // Edge helpers: the update vector for edge (u,v) has +1 at u and -1 at v.
    // Pass v = removed_index() for edges incident to the removed node.
    void add_edge(int u, int v, double weight);
    void remove_edge(int u, int v, double weight);
    static constexpr int removed_index() { return -1; }

    // Replace row/col u by an identity row: equivalent to deleting the row
    // and column from the matrix while keeping indices stable. The dead row
    // contributes log(1) = 0 to log_det and must not be touched again.
    void delete_row(int u);

    // Reconstruct an entry of the factored (local-coordinate) matrix; test hook.
    double reconstruct(int i, int j) const;

    // Laplacian column of the removed node over local indices (negated
    // multiplicities), plus its diagonal degree. Needed to merge factors.
    const std::vector<double>& removed_column() const { return removed_col_; }
    double removed_degree() const { return removed_deg_; }

    friend ldl_factor merge_factors(const ldl_factor& a, const ldl_factor& b,
                                    const std::vector<std::pair<int, int>>& cut_edges);

private:
    static ldl_factor factorize_impl(node_id n,
                                     const std::vector<std::tuple<node_id, node_id, double>>& edges,
                                     ordering ord);
    void bennett(double* w, double alpha, int start_pivot);
    std::size_t col_begin(int j) const { return col_off_[static_cast<std::size_t>(j)]; }

    int m_ = 0;
    std::vector<int> perm_;   // pivot position -> local index
    std::vector<int> iperm_;  // local index -> pivot position
    std::vector<double> diag_;
    std::vector<double> cols_;  // packed strictly-lower columns, pivot order
    std::vector<std::size_t> col_off_;
    std::vector<double> removed_col_;
    double removed_deg_ = 0.0;
    int updates_ = 0;
    mutable std::vector<double> work_;
};

// Factor of the union subgraph G[a ∪ b]: block-diagonal Laplacian of the two
// pieces plus one rank-one update per cut edge. Local numbering of the union
// is a's nodes (0..na-1) followed by b's nodes (na..na+nb-1); cut edges are
// given as (a-local, b-local) pairs, repeated entries meaning parallel edges.
// Throws validation_error on an empty cutset (the union would be disconnected).
ldl_factor merge_factors(const ldl_factor& a, const ldl_factor& b,
                         const std::vector<std::pair<int, int>>& cut_edges);

// Remove edges from a factored graph via rank-one downdates. Endpoints are
// local indices (removed node spelled ldl_factor::removed_index()). Throws
// numeric_error if the graph disconnects.
ldl_factor downdate_factor(ldl_factor f,
                           const std::vector<std::pair<int, int>>& removed_edges);

// log |T_G| via the matrix-tree theorem. Requires a connected input.
double log_tree_count(const contiguity_graph& g);
double log_tree_count(const multi_graph& g);

// log of the number of spanning trees compatible with the partition:
// sum of intra-cluster log counts plus the quotient multigraph's log count.
// Throws validation_error naming the offending cluster if a piece is
// disconnected.
double log_compatible_tree_count(const contiguity_graph& g, const partition& p);

}  // namespace bcc
