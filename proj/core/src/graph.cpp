#include "bcc/graph.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace bcc {

namespace {

edge normalized(node_id u, node_id v) {
    return u < v ? edge{u, v} : edge{v, u};
}

// BFS over an adjacency callback; returns number of reached nodes.
template <typename NeighborFn>
node_id bfs_reach(node_id n, NeighborFn&& neighbors) {
    if (n <= 0) return n;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<node_id> stack{0};
    seen[0] = 1;
    node_id count = 1;
    while (!stack.empty()) {
        node_id u = stack.back();
        stack.pop_back();
        neighbors(u, [&](node_id v) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                stack.push_back(v);
            }
        });
    }
    return count;
}

}  // namespace

contiguity_graph contiguity_graph::from_edge_list(node_id n, const std::vector<edge>& pairs) {
    contiguity_graph g(n);
    std::set<edge> dedup;
    for (const auto& [u, v] : pairs) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw validation_error("from_edge_list: node index out of range");
        if (u == v) throw validation_error("from_edge_list: self-loop not allowed");
        dedup.insert(normalized(u, v));
    }
    g.edges_.assign(dedup.begin(), dedup.end());
    for (const auto& [u, v] : g.edges_) {
        g.adj_[static_cast<std::size_t>(u)].push_back(v);
        g.adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nbrs : g.adj_) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

contiguity_graph contiguity_graph::grid(node_id rows, node_id cols, bool queen) {
    if (rows < 1 || cols < 1) throw validation_error("grid: dimensions must be >= 1");
    std::vector<edge> pairs;
    auto id = [cols](node_id r, node_id c) { return r * cols + c; };
    for (node_id r = 0; r < rows; ++r) {
        for (node_id c = 0; c < cols; ++c) {
            if (c + 1 < cols) pairs.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) pairs.emplace_back(id(r, c), id(r + 1, c));
            if (queen && r + 1 < rows) {
                if (c + 1 < cols) pairs.emplace_back(id(r, c), id(r + 1, c + 1));
                if (c > 0) pairs.emplace_back(id(r, c), id(r + 1, c - 1));
            }
        }
    }
    return from_edge_list(rows * cols, pairs);
}

bool contiguity_graph::has_edge(node_id u, node_id v) const {
    if (u == v) return false;
    const auto& nbrs = adj_[static_cast<std::size_t>(u)];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

contiguity_graph contiguity_graph::induced_subgraph(const std::vector<node_id>& nodes) const {
    std::vector<node_id> local(static_cast<std::size_t>(n_), -1);
    node_id m = 0;
    for (node_id u : nodes) {
        if (u < 0 || u >= n_) throw validation_error("induced_subgraph: node out of range");
        if (local[static_cast<std::size_t>(u)] != -1)
            throw validation_error("induced_subgraph: duplicate node");
        local[static_cast<std::size_t>(u)] = m++;
    }
    std::vector<edge> pairs;
    for (node_id u : nodes)
        for (node_id v : neighbors(u))
            if (u < v && local[static_cast<std::size_t>(v)] != -1)
                pairs.emplace_back(local[static_cast<std::size_t>(u)],
                                   local[static_cast<std::size_t>(v)]);
    return from_edge_list(m, pairs);
}

bool contiguity_graph::is_connected() const {
    if (n_ <= 1) return true;
    node_id reached = bfs_reach(n_, [this](node_id u, auto&& visit) {
        for (node_id v : neighbors(u)) visit(v);
    });
    return reached == n_;
}

multi_graph multi_graph::from_graph(const contiguity_graph& g) {
    multi_graph mg(g.num_nodes());
    for (const auto& [u, v] : g.edges()) mg.edges_[{u, v}] = 1;
    return mg;
}

std::int64_t multi_graph::multiplicity(node_id u, node_id v) const {
    auto it = edges_.find(normalized(u, v));
    return it == edges_.end() ? 0 : it->second;
}

std::int64_t multi_graph::total_multiplicity() const {
    std::int64_t total = 0;
    for (const auto& [e, m] : edges_) total += m;
    return total;
}

void multi_graph::add_edge(node_id u, node_id v, std::int64_t mult) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
        throw validation_error("multigraph: node index out of range");
    if (u == v) throw validation_error("multigraph: self-loop not allowed");
    if (mult <= 0) throw validation_error("multigraph: multiplicity must be positive");
    edges_[normalized(u, v)] += mult;
}

multi_graph multi_graph::contract_edge(node_id g, node_id h) const {
    if (multiplicity(g, h) <= 0) throw validation_error("contract_edge: edge absent");
    node_id lo = std::min(g, h), hi = std::max(g, h);
    // Relabel: merged node keeps index lo, nodes above hi shift down.
    auto relabel = [lo, hi](node_id u) {
        if (u == lo || u == hi) return lo;
        return u > hi ? u - 1 : u;
    };
    multi_graph out(n_ - 1);
    for (const auto& [e, m] : edges_) {
        node_id u = relabel(e.first), v = relabel(e.second);
        if (u == v) continue;  // contracted edges become loops and are dropped
        out.edges_[normalized(u, v)] += m;
    }
    return out;
}

bool multi_graph::is_connected() const {
    if (n_ <= 1) return true;
    std::vector<std::vector<node_id>> adj(static_cast<std::size_t>(n_));
    for (const auto& [e, m] : edges_) {
        adj[static_cast<std::size_t>(e.first)].push_back(e.second);
        adj[static_cast<std::size_t>(e.second)].push_back(e.first);
    }
    node_id reached = bfs_reach(n_, [&adj](node_id u, auto&& visit) {
        for (node_id v : adj[static_cast<std::size_t>(u)]) visit(v);
    });
    return reached == n_;
}

partition partition::from_assignment(std::vector<cluster_id> assignment) {
    partition p;
    cluster_id k = 0;
    for (cluster_id c : assignment) {
        if (c < 0) throw validation_error("partition: negative cluster index");
        k = std::max(k, c + 1);
    }
    p.clusters_.resize(static_cast<std::size_t>(k));
    for (node_id i = 0; i < static_cast<node_id>(assignment.size()); ++i)
        p.clusters_[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])].push_back(i);
    for (const auto& c : p.clusters_)
        if (c.empty()) throw validation_error("partition: empty cluster index");
    p.assignment_ = std::move(assignment);
    p.k_ = k;
    return p;
}

partition partition::from_clusters(node_id n, std::vector<std::vector<node_id>> clusters) {
    partition p;
    p.assignment_.assign(static_cast<std::size_t>(n), -1);
    for (cluster_id c = 0; c < static_cast<cluster_id>(clusters.size()); ++c) {
        if (clusters[static_cast<std::size_t>(c)].empty())
            throw validation_error("partition: empty cluster");
        for (node_id u : clusters[static_cast<std::size_t>(c)]) {
            if (u < 0 || u >= n) throw validation_error("partition: node out of range");
            if (p.assignment_[static_cast<std::size_t>(u)] != -1)
                throw validation_error("partition: clusters overlap");
            p.assignment_[static_cast<std::size_t>(u)] = c;
        }
        std::sort(clusters[static_cast<std::size_t>(c)].begin(),
                  clusters[static_cast<std::size_t>(c)].end());
    }
    for (cluster_id c : p.assignment_)
        if (c == -1) throw validation_error("partition: clusters do not cover all nodes");
    p.clusters_ = std::move(clusters);
    p.k_ = static_cast<cluster_id>(p.clusters_.size());
    return p;
}

std::int64_t cutset_size(const contiguity_graph& g, const std::vector<node_id>& a,
                         const std::vector<node_id>& b) {
    std::vector<char> in_a(static_cast<std::size_t>(g.num_nodes()), 0);
    std::vector<char> in_b(static_cast<std::size_t>(g.num_nodes()), 0);
    for (node_id u : a) in_a[static_cast<std::size_t>(u)] = 1;
    for (node_id u : b) {
        if (in_a[static_cast<std::size_t>(u)])
            throw validation_error("cutset_size: sets overlap");
        in_b[static_cast<std::size_t>(u)] = 1;
    }
    std::int64_t count = 0;
    for (node_id u : a)
        for (node_id v : g.neighbors(u))
            if (in_b[static_cast<std::size_t>(v)]) ++count;
    return count;
}

multi_graph quotient_multigraph(const contiguity_graph& g, const partition& p) {
    if (p.num_nodes() != g.num_nodes())
        throw validation_error("quotient_multigraph: partition size mismatch");
    multi_graph mg(p.num_clusters());
    const auto& assign = p.assignment();
    for (const auto& [u, v] : g.edges()) {
        cluster_id cu = assign[static_cast<std::size_t>(u)];
        cluster_id cv = assign[static_cast<std::size_t>(v)];
        if (cu != cv) mg.add_edge(cu, cv, 1);
    }
    return mg;
}

}  // namespace bcc
