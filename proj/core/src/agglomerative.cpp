#include "bcc/agglomerative.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <queue>
#include <unordered_map>

namespace bcc {

namespace {

constexpr int kFactorRefreshLimit = 64;  // rank-1 ops before a from-scratch rebuild

struct candidate {
    double score;
    cluster_id a, b;  // a < b
    int va, vb;       // version stamps at scoring time
};

// Max-heap order: higher score first; ties broken lexicographically by
// (min id, max id) so runs are deterministic.
struct candidate_less {
    bool operator()(const candidate& x, const candidate& y) const {
        if (x.score != y.score) return x.score < y.score;
        if (x.a != y.a) return x.a > y.a;
        return x.b > y.b;
    }
};

struct pair_hash {
    std::size_t operator()(const std::pair<cluster_id, cluster_id>& p) const {
        return std::hash<std::int64_t>()((static_cast<std::int64_t>(p.first) << 32) ^
                                         static_cast<std::int64_t>(p.second));
    }
};

// LRU cache of scored union factors, keyed by the (smaller id, larger id)
// cluster pair. first_id records which cluster came first in the union's
// local numbering.
class union_cache {
public:
    struct entry {
        std::pair<cluster_id, cluster_id> key;
        cluster_id first_id;
        merge_eval eval;
    };

    void put(std::pair<cluster_id, cluster_id> key, cluster_id first_id, merge_eval eval) {
        auto it = index_.find(key);
        if (it != index_.end()) {
            order_.erase(it->second);
            index_.erase(it);
        }
        order_.push_front(entry{key, first_id, std::move(eval)});
        index_[key] = order_.begin();
        trim();
    }

    // Removes and returns the entry if present.
    std::optional<entry> take(std::pair<cluster_id, cluster_id> key) {
        auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        entry e = std::move(*it->second);
        order_.erase(it->second);
        index_.erase(it);
        return e;
    }

    void set_capacity(std::size_t cap) {
        capacity_ = std::max<std::size_t>(cap, 16);
        trim();
    }

private:
    void trim() {
        while (order_.size() > capacity_) {
            index_.erase(order_.back().key);
            order_.pop_back();
        }
    }

    std::size_t capacity_ = 16;
    std::list<entry> order_;
    std::unordered_map<std::pair<cluster_id, cluster_id>, std::list<entry>::iterator, pair_hash>
        index_;
};

}  // namespace

merge_eval score_merge(const cluster_state& a, const cluster_state& b,
                       const std::vector<std::pair<int, int>>& cut_edges,
                       const model_spec& spec) {
    if (cut_edges.empty()) throw validation_error("score_merge: empty cutset");
    merge_eval out;
    out.delta_obs = delta_lobs(a.stats, b.stats, spec);
    out.union_factor = merge_factors(a.factor, b.factor, cut_edges);
    out.bound_score = out.delta_obs + out.union_factor.log_det() -
                      std::log(static_cast<double>(cut_edges.size())) - a.log_intra_trees -
                      b.log_intra_trees;
    return out;
}

double delta_bound(const cluster_state& a, const cluster_state& b,
                   const std::vector<std::pair<int, int>>& cut_edges,
                   const model_spec& spec) {
    return score_merge(a, b, cut_edges, spec).bound_score;
}

partition hierarchy::cut_at(cluster_id k) const {
    if (k < 1 || k > leaf_count) throw validation_error("cut_at: k out of range");
    const cluster_id total = leaf_count + static_cast<cluster_id>(merges.size());
    std::vector<cluster_id> parent(static_cast<std::size_t>(total));
    for (cluster_id i = 0; i < total; ++i) parent[static_cast<std::size_t>(i)] = i;
    for (node_id t = 0; t < leaf_count - k; ++t) {
        const auto& m = merges[static_cast<std::size_t>(t)];
        parent[static_cast<std::size_t>(m.left)] = m.merged;
        parent[static_cast<std::size_t>(m.right)] = m.merged;
    }
    auto root = [&parent](cluster_id c) {
        while (parent[static_cast<std::size_t>(c)] != c) c = parent[static_cast<std::size_t>(c)];
        return c;
    };
    std::unordered_map<cluster_id, cluster_id> dense;
    std::vector<cluster_id> roots;
    for (node_id i = 0; i < leaf_count; ++i) roots.push_back(root(i));
    std::vector<cluster_id> sorted_roots = roots;
    std::sort(sorted_roots.begin(), sorted_roots.end());
    sorted_roots.erase(std::unique(sorted_roots.begin(), sorted_roots.end()), sorted_roots.end());
    for (cluster_id i = 0; i < static_cast<cluster_id>(sorted_roots.size()); ++i)
        dense[sorted_roots[static_cast<std::size_t>(i)]] = i;
    std::vector<cluster_id> assign(static_cast<std::size_t>(leaf_count));
    for (node_id i = 0; i < leaf_count; ++i)
        assign[static_cast<std::size_t>(i)] = dense[roots[static_cast<std::size_t>(i)]];
    return partition::from_assignment(std::move(assign));
}

node_id hierarchy::min_member(cluster_id c) const {
    if (c < leaf_count) return c;
    const auto& m = merges[static_cast<std::size_t>(c - leaf_count)];
    return std::min(min_member(m.left), min_member(m.right));
}

hierarchy fit(const data_matrix& x, const contiguity_graph& g, const model_spec& spec,
              fit_stats* stats) {
    spec.validate();
    const node_id n = g.num_nodes();
    if (n < 1) throw validation_error("fit: graph has no nodes");
    if (x.rows != n) throw validation_error("fit: feature rows must match graph nodes");
    if (x.cols != spec.dims) throw validation_error("fit: feature columns must match model dims");
    if (!g.is_connected()) throw validation_error("fit: graph must be connected");

    fit_stats local_stats;
    fit_stats& st = stats ? *stats : local_stats;

    hierarchy h;
    h.leaf_count = n;
    if (n == 1) return h;

    const cluster_id total_ids = 2 * n - 1;
    std::vector<cluster_state> clusters(static_cast<std::size_t>(total_ids));
    std::vector<cluster_id> assign(static_cast<std::size_t>(n));
    std::vector<int> local_of(static_cast<std::size_t>(n), 0);
    for (node_id i = 0; i < n; ++i) {
        auto& c = clusters[static_cast<std::size_t>(i)];
        c.members = {i};
        c.stats = suff_stats_of(x.row(i), spec);
        c.log_intra_trees = 0.0;
        assign[static_cast<std::size_t>(i)] = i;
    }

    // Quotient multigraph adjacency, keyed by live cluster ids.
    std::vector<std::unordered_map<cluster_id, std::int64_t>> qadj(
        static_cast<std::size_t>(total_ids));
    std::int64_t live_edges = 0;
    for (const auto& [u, v] : g.edges()) {
        ++qadj[static_cast<std::size_t>(u)][v];
        ++qadj[static_cast<std::size_t>(v)][u];
    }
    live_edges = static_cast<std::int64_t>(g.num_edges());

    // Cut edges between two clusters as (first-local, second-local) pairs,
    // scanning the smaller cluster's members.
    auto collect_cut = [&](const cluster_state& first, cluster_id first_id,
                           const cluster_state& second, cluster_id second_id) {
        std::vector<std::pair<int, int>> cut;
        const bool scan_first = first.members.size() <= second.members.size();
        const auto& scan = scan_first ? first : second;
        const cluster_id other_id = scan_first ? second_id : first_id;
        for (node_id u : scan.members)
            for (node_id v : g.neighbors(u))
                if (assign[static_cast<std::size_t>(v)] == other_id) {
                    int lu = local_of[static_cast<std::size_t>(u)];
                    int lv = local_of[static_cast<std::size_t>(v)];
                    cut.emplace_back(scan_first ? lu : lv, scan_first ? lv : lu);
                }
        return cut;
    };

    // The union's local numbering puts the larger cluster first (cheaper
    // border solve and update fill); ties keep the smaller id first.
    auto pick_first = [&clusters](cluster_id a, cluster_id b) {
        const auto& ca = clusters[static_cast<std::size_t>(a)];
        const auto& cb = clusters[static_cast<std::size_t>(b)];
        if (ca.members.size() != cb.members.size())
            return ca.members.size() > cb.members.size() ? a : b;
        return std::min(a, b);
    };

    std::priority_queue<candidate, std::vector<candidate>, candidate_less> heap;
    union_cache cache;

    auto score_pair = [&](cluster_id a, cluster_id b) {
        if (a > b) std::swap(a, b);
        const cluster_id first_id = pick_first(a, b);
        const cluster_id second_id = first_id == a ? b : a;
        auto cut = collect_cut(clusters[static_cast<std::size_t>(first_id)], first_id,
                               clusters[static_cast<std::size_t>(second_id)], second_id);
        merge_eval eval = score_merge(clusters[static_cast<std::size_t>(first_id)],
                                      clusters[static_cast<std::size_t>(second_id)], cut, spec);
        ++st.candidates_scored;
        heap.push(candidate{eval.bound_score, a, b, clusters[static_cast<std::size_t>(a)].version,
                            clusters[static_cast<std::size_t>(b)].version});
        cache.put({a, b}, first_id, std::move(eval));
    };

    cache.set_capacity(static_cast<std::size_t>(2 * live_edges));
    for (const auto& [u, v] : g.edges()) {
        score_pair(u, v);
        ++st.initial_candidates;
    }

    h.merges.reserve(static_cast<std::size_t>(n - 1));
    for (node_id t = 1; t <= n - 1; ++t) {
        candidate best{};
        for (;;) {
            if (heap.empty()) throw numeric_error("fit: candidate heap exhausted");
            best = heap.top();
            heap.pop();
            ++st.heap_pops;
            const auto& ca = clusters[static_cast<std::size_t>(best.a)];
            const auto& cb = clusters[static_cast<std::size_t>(best.b)];
            if (ca.alive && cb.alive && ca.version == best.va && cb.version == best.vb) break;
            ++st.stale_pops;
        }

        const cluster_id a = best.a, b = best.b;
        const cluster_id merged_id = n + t - 1;
        const cluster_id first_id = pick_first(a, b);
        const cluster_id second_id = first_id == a ? b : a;
        auto& first = clusters[static_cast<std::size_t>(first_id)];
        auto& second = clusters[static_cast<std::size_t>(second_id)];

        merge_eval eval;
        if (auto hit = cache.take({a, b}); hit && hit->first_id == first_id) {
            eval = std::move(hit->eval);
            ++st.cache_hits;
        } else {
            auto cut = collect_cut(first, first_id, second, second_id);
            eval = score_merge(first, second, cut, spec);
            ++st.candidates_scored;
            ++st.cache_misses;
        }

        auto& merged = clusters[static_cast<std::size_t>(merged_id)];
        merged.members = std::move(first.members);
        merged.members.insert(merged.members.end(), second.members.begin(), second.members.end());
        for (std::size_t i = 0; i < second.members.size(); ++i)
            local_of[static_cast<std::size_t>(second.members[i])] +=
                static_cast<int>(merged.members.size() - second.members.size());
        merged.stats = combine(first.stats, second.stats);
        if (eval.union_factor.rank_updates() >= kFactorRefreshLimit) {
            merged.factor = ldl_factor::factorize(g.induced_subgraph(merged.members));
            ++st.factor_refreshes;
        } else {
            merged.factor = std::move(eval.union_factor);
        }
        merged.log_intra_trees = merged.factor.log_det();
        for (node_id u : merged.members) assign[static_cast<std::size_t>(u)] = merged_id;

        const std::int64_t cut_mult = qadj[static_cast<std::size_t>(a)].at(b);
        h.merges.push_back(merge_record{static_cast<int>(t), std::min(a, b), std::max(a, b),
                                        merged_id, best.score, eval.delta_obs,
                                        merged.log_intra_trees, cut_mult});

        // Retire the parents; stale heap entries die on version mismatch.
        for (cluster_id dead : {a, b}) {
            auto& c = clusters[static_cast<std::size_t>(dead)];
            c.alive = false;
            ++c.version;
            c.factor = ldl_factor();
            c.members = {};
            c.stats = suff_stats();
        }

        // Contract (a,b) in the quotient adjacency.
        const std::int64_t deg_a = static_cast<std::int64_t>(qadj[static_cast<std::size_t>(a)].size());
        const std::int64_t deg_b = static_cast<std::int64_t>(qadj[static_cast<std::size_t>(b)].size());
        auto& nbrs_merged = qadj[static_cast<std::size_t>(merged_id)];
        for (cluster_id side : {a, b}) {
            for (const auto& [x2, m] : qadj[static_cast<std::size_t>(side)]) {
                if (x2 == a || x2 == b) continue;
                nbrs_merged[x2] += m;
                auto& back = qadj[static_cast<std::size_t>(x2)];
                back.erase(side);
                back[merged_id] += m;
            }
            qadj[static_cast<std::size_t>(side)].clear();
        }
        // Distinct candidate pairs: the (a,b) pair dies, pairs with a common
        // neighbor collapse into one.
        live_edges += static_cast<std::int64_t>(nbrs_merged.size()) - (deg_a + deg_b - 1);

        cache.set_capacity(static_cast<std::size_t>(2 * std::max<std::int64_t>(live_edges, 1)));
        std::vector<cluster_id> to_score;
        for (const auto& [x2, m] : nbrs_merged) to_score.push_back(x2);
        std::sort(to_score.begin(), to_score.end());
        for (cluster_id x2 : to_score) {
            score_pair(merged_id, x2);
            ++st.rescored_after_merge;
        }
    }
    return h;
}

void backward_pass(hierarchy& h, const contiguity_graph& g, const data_matrix& x,
                   const model_spec& spec, double alpha) {
    spec.validate();
    const node_id n = h.leaf_count;
    if (g.num_nodes() != n || x.rows != n)
        throw validation_error("backward_pass: inputs do not match the hierarchy");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw validation_error("backward_pass: alpha must lie in (0, 1]");

    h.alpha = alpha;
    h.per_k.assign(static_cast<std::size_t>(n) + 1, posterior_value{});
    if (n == 1) {
        suff_stats t = suff_stats_of(x.row(0), spec);
        posterior_value v;
        v.log_obs = log_marginal(t, spec);
        v.log_partition_prior = 0.0;
        v.log_k_prior = log_k_prior(1, 1, alpha);
        v.total = v.log_obs + v.log_k_prior;
        h.per_k[1] = v;
        h.map_k = 1;
        h.has_posteriors = true;
        return;
    }

    const cluster_id total_ids = 2 * n - 1;
    std::vector<double> log_intra(static_cast<std::size_t>(total_ids), 0.0);
    for (const auto& m : h.merges) log_intra[static_cast<std::size_t>(m.merged)] = m.log_intra_trees;

    double sum_obs = 0.0;
    for (node_id i = 0; i < n; ++i) sum_obs += log_marginal(suff_stats_of(x.row(i), spec), spec);

    // Quotient factor over cluster slots; slot -1 marks the cluster whose
    // row/column is the removed one.
    ldl_factor qfactor = ldl_factor::factorize(g);
    const double log_t_g = qfactor.log_det();
    std::vector<std::unordered_map<cluster_id, std::int64_t>> qadj(
        static_cast<std::size_t>(total_ids));
    for (const auto& [u, v] : g.edges()) {
        ++qadj[static_cast<std::size_t>(u)][v];
        ++qadj[static_cast<std::size_t>(v)][u];
    }
    std::unordered_map<cluster_id, int> qslot;
    std::vector<cluster_id> live;
    for (node_id i = 0; i < n; ++i) {
        qslot[i] = (i == n - 1) ? -1 : i;
        live.push_back(i);
    }
    int updates_since_refresh = 0;

    auto rebuild_qfactor = [&]() {
        std::sort(live.begin(), live.end());
        const node_id k = static_cast<node_id>(live.size());
        multi_graph mg(k);
        std::unordered_map<cluster_id, int> dense;
        for (node_id i = 0; i < k; ++i) dense[live[static_cast<std::size_t>(i)]] = i;
        for (cluster_id c : live)
            for (const auto& [x2, m] : qadj[static_cast<std::size_t>(c)])
                if (c < x2) mg.add_edge(dense[c], dense[x2], m);
        qfactor = ldl_factor::factorize(mg);
        qslot.clear();
        for (node_id i = 0; i < k; ++i)
            qslot[live[static_cast<std::size_t>(i)]] = (i == k - 1) ? -1 : i;
        updates_since_refresh = 0;
    };

    auto assemble = [&](cluster_id k, double lobs, double log_compat) {
        posterior_value v;
        v.log_obs = lobs;
        v.log_partition_prior =
            log_compat - log_t_g - log_binomial(n - 1, k - 1) - log_factorial(k);
        v.log_k_prior = log_k_prior(k, n, alpha);
        v.total = v.log_obs + v.log_partition_prior + v.log_k_prior;
        return v;
    };

    double sum_intra = 0.0;
    h.per_k[static_cast<std::size_t>(n)] = assemble(n, sum_obs, sum_intra + qfactor.log_det());

    for (const auto& rec : h.merges) {
        const cluster_id a = rec.left, b = rec.right, u = rec.merged;
        sum_obs += rec.delta_obs;
        sum_intra += rec.log_intra_trees - log_intra[static_cast<std::size_t>(a)] -
                     log_intra[static_cast<std::size_t>(b)];

        // Snapshot before rewiring the adjacency.
        const int sa = qslot.at(a), sb = qslot.at(b);
        const std::int64_t m_ab = qadj[static_cast<std::size_t>(a)].at(b);
        const bool a_removed = (sa == -1), b_removed = (sb == -1);
        cluster_id absorbed, survivor;
        if (a_removed || b_removed) {
            survivor = a_removed ? a : b;  // the removed cluster absorbs the other
            absorbed = a_removed ? b : a;
        } else if (qadj[static_cast<std::size_t>(a)].size() != qadj[static_cast<std::size_t>(b)].size()) {
            absorbed = qadj[static_cast<std::size_t>(a)].size() < qadj[static_cast<std::size_t>(b)].size() ? a : b;
            survivor = absorbed == a ? b : a;
        } else {
            absorbed = b;
            survivor = a;
        }
        std::vector<std::pair<cluster_id, std::int64_t>> moved(
            qadj[static_cast<std::size_t>(absorbed)].begin(),
            qadj[static_cast<std::size_t>(absorbed)].end());
        std::sort(moved.begin(), moved.end());

        // Rewire the quotient adjacency first: it is the source of truth the
        // factor can be rebuilt from if the incremental path goes numerically bad.
        auto& nbrs_merged = qadj[static_cast<std::size_t>(u)];
        for (cluster_id side : {a, b}) {
            for (const auto& [x2, m] : qadj[static_cast<std::size_t>(side)]) {
                if (x2 == a || x2 == b) continue;
                nbrs_merged[x2] += m;
                auto& back = qadj[static_cast<std::size_t>(x2)];
                back.erase(side);
                back[u] += m;
            }
            qadj[static_cast<std::size_t>(side)].clear();
        }
        live.erase(std::remove(live.begin(), live.end(), a), live.end());
        live.erase(std::remove(live.begin(), live.end(), b), live.end());
        live.push_back(u);

        try {
            if (a_removed || b_removed) {
                // Contracting into the removed cluster just deletes the other row.
                qfactor.delete_row(qslot.at(absorbed));
                qslot[u] = -1;
                ++updates_since_refresh;
            } else {
                const int ssur = qslot.at(survivor), sabs = qslot.at(absorbed);
                for (const auto& [x2, m] : moved) {
                    if (x2 == survivor) continue;
                    const int sx = qslot.at(x2);
                    const double w = static_cast<double>(m);
                    qfactor.add_edge(ssur, sx, w);   // sx may be the removed slot (-1)
                    qfactor.remove_edge(sabs, sx, w);
                    updates_since_refresh += 2;
                }
                qfactor.add_edge(sabs, ldl_factor::removed_index(), 1.0);  // ground
                qfactor.remove_edge(ssur, sabs, static_cast<double>(m_ab));
                updates_since_refresh += 2;
                qslot[u] = ssur;
            }
            qslot.erase(a);
            qslot.erase(b);
            if (updates_since_refresh >= kFactorRefreshLimit) rebuild_qfactor();
        } catch (const numeric_error&) {
            qslot.erase(a);
            qslot.erase(b);
            qslot[u] = -1;  // placeholder; rebuild reassigns all slots
            rebuild_qfactor();
        }

        const cluster_id k = n - rec.step;
        h.per_k[static_cast<std::size_t>(k)] = assemble(k, sum_obs, sum_intra + qfactor.log_det());
    }

    h.map_k = 1;
    for (cluster_id k = 1; k <= n; ++k)
        if (h.per_k[static_cast<std::size_t>(k)].total >
            h.per_k[static_cast<std::size_t>(h.map_k)].total)
            h.map_k = k;
    h.has_posteriors = true;
}

}  // namespace bcc
