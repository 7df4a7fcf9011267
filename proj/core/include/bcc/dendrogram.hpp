#pragma once

#include <utility>
#include <vector>

#include "bcc/agglomerative.hpp"

namespace bcc {

// One per-K posterior as a line over log(alpha): value = intercept + slope * log(alpha),
// slope = k - 1 (the alpha-only normalization term is shared and excluded).
struct front_line {
    cluster_id k = 0;
    double intercept = 0.0;
    double slope = 0.0;
};

// Surviving K with its alpha interval (alpha_low, alpha_high].
struct front_segment {
    cluster_id k = 0;
    double alpha_low = 0.0;
    double alpha_high = 1.0;
    double intercept = 0.0;
};

struct pareto_result {
    std::vector<front_segment> segments;  // decreasing k; first has alpha_high = 1
};

std::vector<front_line> front_lines(const hierarchy& h);

// Upper envelope of the lines over log(alpha) in (-inf, 0]; dominated Ks are
// pruned, breakpoints become the alpha interval bounds.
pareto_result pareto_front(const std::vector<front_line>& lines);

struct merge_level {
    double height = 0.0;  // -log(alpha) at the tipping point
    std::vector<std::pair<cluster_id, cluster_id>> merges;
};

struct dendrogram {
    std::vector<node_id> leaf_order;   // permutation of original nodes
    std::vector<merge_level> levels;   // ascending height; multi-merge levels allowed
    std::vector<front_segment> front;
};

dendrogram build_dendrogram(const hierarchy& h, const pareto_result& front);

partition map_partition_at_alpha(const hierarchy& h, const pareto_result& front, double alpha);

}  // namespace bcc
