#pragma once

#include <cstdint>
#include <vector>

#include "bcc/models.hpp"

namespace bcc {

struct grid_simulation {
    data_matrix features;            // one column, row-major grid order
    std::vector<cluster_id> labels;  // ground-truth block of each pixel
};

// Gaussian draws on a rows x cols grid split into a 3x3 layout of equal
// blocks with means [[1,5,3],[2,7,4],[6,9,8]] and standard deviation sigma.
// rows and cols must be divisible by 3. Deterministic in seed.
grid_simulation simulate_grid(node_id rows, node_id cols, double sigma, std::uint64_t seed);

}  // namespace bcc
