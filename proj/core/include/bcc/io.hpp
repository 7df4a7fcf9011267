#pragma once

#include <string>
#include <vector>

#include "bcc/graph.hpp"
#include "bcc/models.hpp"

namespace bcc {

// Edge-list text format: one edge per line, two whitespace-separated 0-based
// node indices; '#' comment lines and blank lines are ignored.
std::vector<edge> read_edge_list(const std::string& path);

struct feature_table {
    std::vector<std::string> names;
    data_matrix data;
};

// Delimited text with one header row; commas, tabs and spaces all split.
feature_table read_features(const std::string& path);
void write_features(const std::string& path, const feature_table& table);

// Two-column "node cluster" files, one row per node, ordered by node.
void write_labels(const std::string& path, const std::vector<cluster_id>& labels);
std::vector<cluster_id> read_labels(const std::string& path);

// Additive log-ratio transform against a reference column: every other
// column becomes log(max(x, floor) / max(ref, floor)); the reference column
// is dropped.
feature_table apply_alr(const feature_table& table, const std::string& ref_column,
                        double floor = 1e-6);

}  // namespace bcc
