#include "bcc/dendrogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kCoincidentTol = 1e-12;

}  // namespace

std::vector<front_line> front_lines(const hierarchy& h) {
    if (!h.has_posteriors)
        throw validation_error("front_lines: run backward_pass first");
    std::vector<front_line> lines;
    lines.reserve(static_cast<std::size_t>(h.leaf_count));
    for (cluster_id k = 1; k <= h.leaf_count; ++k) {
        const auto& v = h.per_k[static_cast<std::size_t>(k)];
        lines.push_back({k, v.log_obs + v.log_partition_prior, static_cast<double>(k - 1)});
    }
    return lines;
}

pareto_result pareto_front(const std::vector<front_line>& lines) {
    if (lines.empty()) throw validation_error("pareto_front: no lines");
    std::vector<front_line> sorted = lines;
    std::sort(sorted.begin(), sorted.end(),
              [](const front_line& a, const front_line& b) { return a.slope < b.slope; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].slope <= sorted[i - 1].slope)
            throw validation_error("pareto_front: slopes must be distinct");

    // Upper hull over increasing log(alpha); x_left = where the line starts
    // to dominate. Zero-length intervals (triple intersections) drop the
    // larger-K line, so ties go to the simpler model.
    struct hull_entry {
        front_line line;
        double x_left;
    };
    std::vector<hull_entry> hull;
    for (const auto& line : sorted) {
        double x = kNegInf;
        while (!hull.empty()) {
            const auto& top = hull.back();
            x = (top.line.intercept - line.intercept) / (line.slope - top.line.slope);
            if (x <= top.x_left + kCoincidentTol)
                hull.pop_back();
            else
                break;
        }
        hull.push_back({line, hull.empty() ? kNegInf : x});
    }
    // Clamp to log(alpha) <= 0: lines that begin dominating past alpha = 1
    // never win in the valid range.
    while (!hull.empty() && hull.back().x_left > 0.0) hull.pop_back();
    if (hull.empty()) throw validation_error("pareto_front: empty envelope");

    pareto_result out;
    for (std::size_t i = hull.size(); i-- > 0;) {
        front_segment s;
        s.k = hull[i].line.k;
        s.intercept = hull[i].line.intercept;
        s.alpha_low = std::isinf(hull[i].x_left) ? 0.0 : std::exp(hull[i].x_left);
        s.alpha_high = (i + 1 < hull.size()) ? std::exp(hull[i + 1].x_left) : 1.0;
        out.segments.push_back(s);
    }
    return out;
}

dendrogram build_dendrogram(const hierarchy& h, const pareto_result& front) {
    if (!h.has_posteriors)
        throw validation_error("build_dendrogram: run backward_pass first");
    dendrogram out;
    out.front = front.segments;

    const node_id n = h.leaf_count;
    const cluster_id k_head = front.segments.front().k;

    // Merge step t has result K = n - t, so the merge producing K clusters
    // sits at index n - K - 1. Everything above the front's first K draws at
    // height 0; between consecutive surviving Ks the merges share the
    // breakpoint height.
    if (k_head < n) {
        merge_level base;
        base.height = 0.0;
        for (cluster_id k = n - 1; k >= k_head; --k)
            base.merges.emplace_back(h.merges[static_cast<std::size_t>(n - k - 1)].left,
                                     h.merges[static_cast<std::size_t>(n - k - 1)].right);
        if (!base.merges.empty()) out.levels.push_back(std::move(base));
    }
    for (std::size_t s = 0; s + 1 < front.segments.size(); ++s) {
        const auto& big = front.segments[s];
        const auto& small = front.segments[s + 1];
        merge_level level;
        level.height = -std::log(small.alpha_high);
        for (cluster_id k = big.k - 1; k >= small.k; --k)
            level.merges.emplace_back(h.merges[static_cast<std::size_t>(n - k - 1)].left,
                                      h.merges[static_cast<std::size_t>(n - k - 1)].right);
        out.levels.push_back(std::move(level));
    }

    // Leaf order: recursive traversal, smaller-min-member subtree first.
    if (n >= 1) {
        std::vector<cluster_id> stack;
        stack.push_back(h.merges.empty() ? 0 : h.merges.back().merged);
        while (!stack.empty()) {
            cluster_id c = stack.back();
            stack.pop_back();
            if (c < n) {
                out.leaf_order.push_back(c);
                continue;
            }
            const auto& m = h.merges[static_cast<std::size_t>(c - n)];
            cluster_id first = m.left, second = m.right;
            if (h.min_member(second) < h.min_member(first)) std::swap(first, second);
            stack.push_back(second);  // LIFO: first is visited first
            stack.push_back(first);
        }
    }
    return out;
}

partition map_partition_at_alpha(const hierarchy& h, const pareto_result& front, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw validation_error("map_partition_at_alpha: alpha must lie in (0, 1]");
    for (const auto& s : front.segments)
        if (alpha > s.alpha_low && alpha <= s.alpha_high) return h.cut_at(s.k);
    return h.cut_at(front.segments.back().k);  // alpha below every breakpoint
}

}  // namespace bcc
