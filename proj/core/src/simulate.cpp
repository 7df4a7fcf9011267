#include "bcc/simulate.hpp"

#include <random>

namespace bcc {

grid_simulation simulate_grid(node_id rows, node_id cols, double sigma, std::uint64_t seed) {
    if (rows < 3 || cols < 3 || rows % 3 != 0 || cols % 3 != 0)
        throw validation_error("simulate_grid: rows and cols must be positive multiples of 3");
    if (sigma < 0.0) throw validation_error("simulate_grid: sigma must be non-negative");
    static constexpr double kBlockMeans[3][3] = {{1, 5, 3}, {2, 7, 4}, {6, 9, 8}};

    grid_simulation out;
    out.features.rows = rows * cols;
    out.features.cols = 1;
    out.features.values.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    out.labels.reserve(out.features.values.capacity());

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    const node_id block_rows = rows / 3, block_cols = cols / 3;
    for (node_id r = 0; r < rows; ++r) {
        for (node_id c = 0; c < cols; ++c) {
            const node_id br = r / block_rows, bc = c / block_cols;
            out.features.values.push_back(kBlockMeans[br][bc] +
                                          (sigma > 0.0 ? sigma * unit(rng) : 0.0));
            out.labels.push_back(br * 3 + bc);
        }
    }
    return out;
}

}  // namespace bcc
