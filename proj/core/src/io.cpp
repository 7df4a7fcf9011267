#include "bcc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bcc {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::string token;
    for (char ch : line) {
        if (ch == ',' || ch == '\t' || ch == ' ' || ch == '\r') {
            if (!token.empty()) out.push_back(std::move(token));
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    if (!token.empty()) out.push_back(std::move(token));
    return out;
}

double parse_number(const std::string& s, const std::string& context) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw validation_error(context + ": cannot parse number '" + s + "'");
    }
    if (pos != s.size()) throw validation_error(context + ": cannot parse number '" + s + "'");
    return v;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::vector<edge> read_edge_list(const std::string& path) {
    auto in = open_input(path);
    std::vector<edge> edges;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2)
            throw validation_error(path + ":" + std::to_string(lineno) +
                                   ": expected two node indices");
        const double u = parse_number(tokens[0], path);
        const double v = parse_number(tokens[1], path);
        if (u < 0 || v < 0 || u != std::floor(u) || v != std::floor(v))
            throw validation_error(path + ":" + std::to_string(lineno) +
                                   ": node indices must be non-negative integers");
        edges.emplace_back(static_cast<node_id>(u), static_cast<node_id>(v));
    }
    return edges;
}

feature_table read_features(const std::string& path) {
    auto in = open_input(path);
    feature_table table;
    std::string line;
    if (!std::getline(in, line)) throw validation_error(path + ": missing header row");
    table.names = tokenize(line);
    if (table.names.empty()) throw validation_error(path + ": empty header row");
    table.data.cols = static_cast<int>(table.names.size());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (static_cast<int>(tokens.size()) != table.data.cols)
            throw validation_error(path + ":" + std::to_string(lineno) +
                                   ": expected " + std::to_string(table.data.cols) + " columns");
        for (const auto& t : tokens) table.data.values.push_back(parse_number(t, path));
        ++table.data.rows;
    }
    if (table.data.rows == 0) throw validation_error(path + ": no data rows");
    return table;
}

void write_features(const std::string& path, const feature_table& table) {
    auto out = open_output(path);
    out.precision(17);
    for (std::size_t i = 0; i < table.names.size(); ++i)
        out << (i ? "," : "") << table.names[i];
    out << '\n';
    for (node_id r = 0; r < table.data.rows; ++r) {
        auto row = table.data.row(r);
        for (int c = 0; c < table.data.cols; ++c)
            out << (c ? "," : "") << row[static_cast<std::size_t>(c)];
        out << '\n';
    }
    if (!out) throw io_error("failed writing '" + path + "'");
}

void write_labels(const std::string& path, const std::vector<cluster_id>& labels) {
    auto out = open_output(path);
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << ' ' << labels[i] << '\n';
    if (!out) throw io_error("failed writing '" + path + "'");
}

std::vector<cluster_id> read_labels(const std::string& path) {
    auto in = open_input(path);
    std::vector<std::pair<node_id, cluster_id>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2)
            throw validation_error(path + ":" + std::to_string(lineno) +
                                   ": expected 'node cluster' rows");
        rows.emplace_back(static_cast<node_id>(parse_number(tokens[0], path)),
                          static_cast<cluster_id>(parse_number(tokens[1], path)));
    }
    std::sort(rows.begin(), rows.end());
    std::vector<cluster_id> labels;
    labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != static_cast<node_id>(i))
            throw validation_error(path + ": node ids must cover 0..n-1 exactly once");
        labels.push_back(rows[i].second);
    }
    return labels;
}

feature_table apply_alr(const feature_table& table, const std::string& ref_column, double floor) {
    auto it = std::find(table.names.begin(), table.names.end(), ref_column);
    if (it == table.names.end())
        throw validation_error("alr: reference column '" + ref_column + "' not found");
    if (floor <= 0.0) throw validation_error("alr: floor must be positive");
    const int ref = static_cast<int>(it - table.names.begin());
    feature_table out;
    for (int c = 0; c < table.data.cols; ++c)
        if (c != ref) out.names.push_back(table.names[static_cast<std::size_t>(c)]);
    out.data.rows = table.data.rows;
    out.data.cols = table.data.cols - 1;
    if (out.data.cols == 0) throw validation_error("alr: need at least two columns");
    out.data.values.reserve(static_cast<std::size_t>(out.data.rows) *
                            static_cast<std::size_t>(out.data.cols));
    for (node_id r = 0; r < table.data.rows; ++r) {
        auto row = table.data.row(r);
        const double denom = std::max(row[static_cast<std::size_t>(ref)], floor);
        for (int c = 0; c < table.data.cols; ++c)
            if (c != ref)
                out.data.values.push_back(
                    std::log(std::max(row[static_cast<std::size_t>(c)], floor) / denom));
    }
    return out;
}

}  // namespace bcc
