#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bcc/agglomerative.hpp"
#include "bcc/dendrogram.hpp"
#include "bcc/graph.hpp"
#include "bcc/io.hpp"
#include "bcc/metrics.hpp"
#include "bcc/oracle.hpp"
#include "bcc/prior.hpp"
#include "bcc/simulate.hpp"
#include "bcc/treecount.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace bcc;

struct cluster_options {
    std::string features_path;
    std::string graph_path;
    std::string grid_spec;
    std::string adjacency = "rook";
    std::string model = "gaussian-diag";
    std::string tau = "auto", kappa = "auto", beta = "auto", mu = "auto";
    double alpha = 1.0;
    std::string alr_ref;
    double alr_eps = 1e-6;
    std::string out_path;
    std::string out_labels;
    std::vector<int> cut_at;
};

std::pair<node_id, node_id> parse_grid_spec(const std::string& spec) {
    auto x = spec.find_first_of("xX*");
    if (x == std::string::npos)
        throw validation_error("--grid expects ROWSxCOLS, e.g. 30x30");
    try {
        return {static_cast<node_id>(std::stol(spec.substr(0, x))),
                static_cast<node_id>(std::stol(spec.substr(x + 1)))};
    } catch (const std::exception&) {
        throw validation_error("--grid expects ROWSxCOLS, e.g. 30x30");
    }
}

contiguity_graph load_graph(const std::string& graph_path, const std::string& grid_spec,
                            const std::string& adjacency, node_id expected_nodes) {
    if (!graph_path.empty()) {
        auto edges = read_edge_list(graph_path);
        node_id n = expected_nodes;
        if (n < 0) {
            n = 0;
            for (const auto& [u, v] : edges) n = std::max({n, u + 1, v + 1});
        }
        return contiguity_graph::from_edge_list(n, edges);
    }
    if (!grid_spec.empty()) {
        if (adjacency != "rook" && adjacency != "queen")
            throw validation_error("--adjacency must be rook or queen");
        auto [rows, cols] = parse_grid_spec(grid_spec);
        auto g = contiguity_graph::grid(rows, cols, adjacency == "queen");
        if (expected_nodes >= 0 && g.num_nodes() != expected_nodes)
            throw validation_error("grid size does not match the feature row count");
        return g;
    }
    throw validation_error("provide either --graph or --grid");
}

model_variant parse_model(const std::string& name) {
    if (name == "gaussian-diag") return model_variant::gaussian_diag;
    if (name == "poisson") return model_variant::poisson_gamma;
    if (name == "multinomial") return model_variant::multinomial_dirichlet;
    throw validation_error("--model must be gaussian-diag, poisson or multinomial");
}

double parse_override(const std::string& value, const char* flag) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw validation_error(std::string(flag) + " expects a number or 'auto'");
    }
}

// Resolve hyperparameters: data-driven defaults, then explicit overrides.
model_spec resolve_spec(const data_matrix& x, const cluster_options& opt,
                        std::vector<std::string>& warnings) {
    const model_variant variant = parse_model(opt.model);
    model_spec spec = default_hyperparams(x, variant, &warnings);
    const std::size_t dims = static_cast<std::size_t>(spec.dims);
    switch (variant) {
        case model_variant::gaussian_diag: {
            auto& p = std::get<normal_gamma_params>(spec.params);
            if (opt.tau != "auto") p.tau = parse_override(opt.tau, "--tau");
            if (opt.kappa != "auto") p.kappa = parse_override(opt.kappa, "--kappa");
            if (opt.beta != "auto")
                p.beta.assign(dims, parse_override(opt.beta, "--beta"));
            if (opt.mu != "auto") p.mu0.assign(dims, parse_override(opt.mu, "--mu"));
            break;
        }
        case model_variant::poisson_gamma: {
            auto& p = std::get<gamma_params>(spec.params);
            if (opt.kappa != "auto") p.shape.assign(dims, parse_override(opt.kappa, "--kappa"));
            if (opt.beta != "auto") p.rate.assign(dims, parse_override(opt.beta, "--beta"));
            break;
        }
        case model_variant::multinomial_dirichlet: {
            auto& p = std::get<dirichlet_params>(spec.params);
            if (opt.beta != "auto")
                p.concentration.assign(dims, parse_override(opt.beta, "--beta"));
            break;
        }
    }
    spec.validate();
    return spec;
}

json spec_to_json(const model_spec& spec) {
    json out;
    switch (spec.variant) {
        case model_variant::gaussian_diag: {
            const auto& p = std::get<normal_gamma_params>(spec.params);
            out["tau"] = p.tau;
            out["kappa"] = p.kappa;
            out["beta"] = p.beta;
            out["mu0"] = p.mu0;
            break;
        }
        case model_variant::poisson_gamma: {
            const auto& p = std::get<gamma_params>(spec.params);
            out["shape"] = p.shape;
            out["rate"] = p.rate;
            break;
        }
        case model_variant::multinomial_dirichlet: {
            const auto& p = std::get<dirichlet_params>(spec.params);
            out["concentration"] = p.concentration;
            break;
        }
    }
    return out;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

int run_cluster(const cluster_options& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (opt.out_path.empty()) throw validation_error("--out is required");

    feature_table table = read_features(opt.features_path);
    if (!opt.alr_ref.empty()) table = apply_alr(table, opt.alr_ref, opt.alr_eps);
    const contiguity_graph g =
        load_graph(opt.graph_path, opt.grid_spec, opt.adjacency, table.data.rows);
    if (!(opt.alpha > 0.0) || opt.alpha > 1.0)
        throw validation_error("--alpha must lie in (0, 1]");

    std::vector<std::string> warnings;
    const model_spec spec = resolve_spec(table.data, opt, warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    hierarchy h = fit(table.data, g, spec);
    backward_pass(h, g, table.data, spec, opt.alpha);
    const auto front = pareto_front(front_lines(h));
    const dendrogram dendro = build_dendrogram(h, front);

    json doc;
    doc["format_version"] = 1;
    json meta;
    meta["command"] = "cluster";
    meta["n"] = g.num_nodes();
    meta["num_edges"] = g.num_edges();
    meta["features"] = opt.features_path;
    meta["graph"] = opt.graph_path.empty()
                        ? json(opt.grid_spec + " (" + opt.adjacency + ")")
                        : json(opt.graph_path);
    meta["model"] = opt.model;
    meta["alpha"] = opt.alpha;
    meta["hyperparameters"] = spec_to_json(spec);
    if (!opt.alr_ref.empty()) {
        meta["alr_ref"] = opt.alr_ref;
        meta["alr_eps"] = opt.alr_eps;
    }
    meta["timestamp"] = iso_timestamp();

    json merges = json::array();
    for (const auto& m : h.merges)
        merges.push_back(json{{"step", m.step},
                              {"left", m.left},
                              {"right", m.right},
                              {"merged", m.merged},
                              {"bound_score", m.bound_score}});
    doc["merges"] = std::move(merges);

    json per_k = json::array();
    for (cluster_id k = 1; k <= h.leaf_count; ++k) {
        const auto& v = h.per_k[static_cast<std::size_t>(k)];
        per_k.push_back(json{{"k", k},
                             {"log_obs", v.log_obs},
                             {"log_prior", v.log_partition_prior},
                             {"log_k_prior", v.log_k_prior},
                             {"total", v.total}});
    }
    doc["per_k"] = std::move(per_k);
    doc["map_k"] = h.map_k;

    json levels = json::array();
    for (const auto& level : dendro.levels) {
        json level_merges = json::array();
        for (const auto& [a, b] : level.merges) level_merges.push_back(json::array({a, b}));
        levels.push_back(json{{"height", level.height}, {"merges", std::move(level_merges)}});
    }
    json front_json = json::array();
    for (const auto& s : dendro.front)
        front_json.push_back(json{{"k", s.k},
                                  {"alpha_low", s.alpha_low},
                                  {"alpha_high", s.alpha_high},
                                  {"log_posterior_intercept", s.intercept}});
    doc["dendrogram"] = json{{"leaves", dendro.leaf_order},
                             {"levels", std::move(levels)},
                             {"front", std::move(front_json)}};

    json assignments;
    const partition map_part = h.cut_at(h.map_k);
    assignments["map"] = map_part.assignment();
    for (int k : opt.cut_at) {
        if (k < 1 || k > h.leaf_count)
            throw validation_error("--cut-at value out of range");
        assignments["k_" + std::to_string(k)] = h.cut_at(k).assignment();
    }
    doc["assignments"] = std::move(assignments);

    const auto elapsed = std::chrono::steady_clock::now() - start;
    meta["runtime_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    doc["metadata"] = std::move(meta);

    {
        std::ofstream out(opt.out_path);
        if (!out) throw io_error("cannot open '" + opt.out_path + "' for writing");
        out << doc.dump(2) << '\n';
        if (!out) throw io_error("failed writing '" + opt.out_path + "'");
    }
    const std::string labels_path =
        opt.out_labels.empty() ? opt.out_path + ".labels" : opt.out_labels;
    write_labels(labels_path, map_part.assignment());

    std::cout << "map_k=" << h.map_k << " log_posterior="
              << h.per_k[static_cast<std::size_t>(h.map_k)].total << " out=" << opt.out_path
              << '\n';
    return 0;
}

int run_simulate(node_id rows, node_id cols, double sigma, std::uint64_t seed,
                 const std::string& out_features, const std::string& out_labels) {
    auto sim = simulate_grid(rows, cols, sigma, seed);
    feature_table table;
    table.names = {"x"};
    table.data = std::move(sim.features);
    write_features(out_features, table);
    write_labels(out_labels, sim.labels);
    std::cout << "wrote " << out_features << " and " << out_labels << '\n';
    return 0;
}

int run_eval_nmi(const std::string& path_a, const std::string& path_b) {
    const double value = nmi(read_labels(path_a), read_labels(path_b));
    std::cout.precision(10);
    std::cout << value << '\n';
    return 0;
}

// Random connected graph for verify --random-n; edge probability 0.5,
// resampled until connected.
contiguity_graph random_connected_graph(node_id n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<edge> edges;
        for (node_id u = 0; u < n; ++u)
            for (node_id v = u + 1; v < n; ++v)
                if (coin(rng)) edges.emplace_back(u, v);
        auto g = contiguity_graph::from_edge_list(n, edges);
        if (g.is_connected()) return g;
    }
    throw numeric_error("could not sample a connected graph");
}

int run_verify(const std::string& graph_path, const std::string& grid_spec, node_id random_n,
               std::uint64_t seed, node_id max_nodes, std::int64_t max_trees) {
    contiguity_graph g;
    if (random_n > 0)
        g = random_connected_graph(random_n, seed);
    else
        g = load_graph(graph_path, grid_spec, "rook", -1);
    if (!g.is_connected()) throw validation_error("verify: graph is disconnected");

    oracle::enumeration_budget budget;
    budget.max_nodes = max_nodes;
    budget.max_trees = max_trees;
    budget.max_partitions = max_trees;

    bool all_ok = true;
    auto report = [&all_ok](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << '\n';
        all_ok = all_ok && ok;
    };

    const multi_graph mg = multi_graph::from_graph(g);
    const std::int64_t trees = oracle::enumerate_spanning_trees(mg, budget);
    {
        const double lt = log_tree_count(g);
        const bool ok = std::abs(lt - std::log(static_cast<double>(trees))) <= 1e-9;
        std::ostringstream detail;
        detail << "matrix-tree log count " << lt << " vs enumerated " << trees;
        report("matrix-tree vs enumeration", ok, detail.str());
    }
    {
        const std::int64_t dc = oracle::count_trees_deletion_contraction(mg, budget);
        report("deletion-contraction vs enumeration", dc == trees,
               std::to_string(dc) + " vs " + std::to_string(trees));
    }
    {
        bool ok = true;
        for (cluster_id k = 1; k <= g.num_nodes() && ok; ++k) {
            double mass = 0.0;
            for (const auto& p : oracle::enumerate_connected_partitions(g, k, budget)) {
                auto lp = log_partition_prior(g, p);
                if (lp) mass += std::exp(*lp + log_factorial(k));  // ordered partitions
            }
            ok = std::abs(mass - 1.0) <= 1e-9;
        }
        report("partition prior normalization", ok, "all K");
    }
    {
        // m * |T_{Q/e}| <= |T_Q| for every adjacent pair of every quotient.
        bool ok = true;
        std::int64_t checked = 0;
        for (cluster_id k = 2; k <= g.num_nodes() && ok; ++k) {
            for (const auto& p : oracle::enumerate_connected_partitions(g, k, budget)) {
                const multi_graph q = quotient_multigraph(g, p);
                for (const auto& [e, m] : q.edges()) {
                    const std::int64_t tq = oracle::enumerate_spanning_trees(q, budget);
                    const std::int64_t tc = oracle::enumerate_spanning_trees(
                        q.contract_edge(e.first, e.second), budget);
                    ok = ok && (m * tc <= tq);
                    ++checked;
                }
            }
        }
        report("merge-score bound soundness", ok, std::to_string(checked) + " pairs");
    }
    return all_ok ? 0 : 4;
}

int run_render(const std::string& in_path, const std::string& out_path) {
    std::ifstream in(in_path);
    if (!in) throw io_error("cannot open '" + in_path + "' for reading");
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw validation_error("cannot parse '" + in_path + "': " + e.what());
    }
    if (!doc.contains("dendrogram") || !doc.contains("merges"))
        throw validation_error("document has no dendrogram section");
    const auto& dendro = doc["dendrogram"];
    const std::vector<node_id> leaves = dendro["leaves"].get<std::vector<node_id>>();
    const node_id n = static_cast<node_id>(leaves.size());

    // Height per merged cluster id.
    std::map<cluster_id, double> height;
    std::map<cluster_id, std::pair<cluster_id, cluster_id>> children;
    for (const auto& m : doc["merges"])
        children[m["merged"].get<cluster_id>()] = {m["left"].get<cluster_id>(),
                                                   m["right"].get<cluster_id>()};
    {
        std::map<std::pair<cluster_id, cluster_id>, cluster_id> merged_of;
        for (const auto& m : doc["merges"])
            merged_of[{m["left"].get<cluster_id>(), m["right"].get<cluster_id>()}] =
                m["merged"].get<cluster_id>();
        for (const auto& level : dendro["levels"])
            for (const auto& pair : level["merges"]) {
                auto it = merged_of.find({pair[0].get<cluster_id>(), pair[1].get<cluster_id>()});
                if (it != merged_of.end()) height[it->second] = level["height"].get<double>();
            }
    }

    double max_h = 0.0;
    for (const auto& [c, hgt] : height) max_h = std::max(max_h, hgt);
    if (max_h <= 0.0) max_h = 1.0;

    const double width = std::max(400.0, 12.0 * n + 80.0), plot_h = 420.0;
    const double left = 40.0, bottom = plot_h - 40.0, top = 20.0;
    auto xpos = [&](double slot) { return left + slot * (width - 2 * left) / std::max(1, n - 1); };
    auto ypos = [&](double hgt) { return bottom - hgt / max_h * (bottom - top); };

    std::map<cluster_id, double> slot;
    for (node_id i = 0; i < n; ++i) slot[leaves[static_cast<std::size_t>(i)]] = i;

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << plot_h
        << "'>\n<g stroke='#3366aa' stroke-width='1.5' fill='none'>\n";
    // Merges are emitted bottom-up, so children always have slots by the
    // time their parent is drawn.
    for (const auto& m : doc["merges"]) {
        const cluster_id merged = m["merged"].get<cluster_id>();
        const auto [a, b] = children[merged];
        const double xa = slot.at(a), xb = slot.at(b);
        const double hgt = height.count(merged) ? height[merged] : 0.0;
        const double y = ypos(hgt);
        double ya = 0.0, yb = 0.0;
        ya = height.count(a) ? ypos(height[a]) : ypos(0.0);
        yb = height.count(b) ? ypos(height[b]) : ypos(0.0);
        svg << "<path d='M" << xpos(xa) << ' ' << ya << " V" << y << " H" << xpos(xb) << " V" << yb
            << "'/>\n";
        slot[merged] = 0.5 * (xa + xb);
    }
    svg << "</g>\n<g font-size='10' fill='#222'>\n";
    svg << "<text x='" << left << "' y='14'>dendrogram (height = -log alpha)</text>\n";
    svg << "</g>\n</svg>\n";

    std::ofstream out(out_path);
    if (!out) throw io_error("cannot open '" + out_path + "' for writing");
    out << svg.str();
    if (!out) throw io_error("failed writing '" + out_path + "'");
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian contiguity-constrained hierarchical clustering"};
    app.require_subcommand(1);

    cluster_options copt;
    auto* cluster = app.add_subcommand("cluster", "cluster features under a contiguity graph");
    cluster->add_option("--features", copt.features_path, "feature table (header + rows)")
        ->required();
    cluster->add_option("--graph", copt.graph_path, "edge-list file");
    cluster->add_option("--grid", copt.grid_spec, "grid spec ROWSxCOLS instead of --graph");
    cluster->add_option("--adjacency", copt.adjacency, "rook|queen (grid only)");
    cluster->add_option("--model", copt.model, "gaussian-diag|poisson|multinomial");
    cluster->add_option("--tau", copt.tau, "NG tau override or 'auto'");
    cluster->add_option("--kappa", copt.kappa, "NG kappa / gamma shape override or 'auto'");
    cluster->add_option("--beta", copt.beta, "NG beta / rate / concentration override or 'auto'");
    cluster->add_option("--mu", copt.mu, "NG mu0 override or 'auto'");
    cluster->add_option("--alpha", copt.alpha, "truncated-geometric prior parameter in (0,1]");
    cluster->add_option("--alr-ref", copt.alr_ref, "additive log-ratio reference column");
    cluster->add_option("--alr-eps", copt.alr_eps, "ALR zero floor");
    cluster->add_option("--out", copt.out_path, "result document path")->required();
    cluster->add_option("--out-labels", copt.out_labels, "MAP assignment file (default OUT.labels)");
    cluster->add_option("--cut-at", copt.cut_at, "extra K values to materialize")
        ->take_all();

    node_id sim_rows = 30, sim_cols = 30;
    double sim_sigma = 0.5;
    std::uint64_t sim_seed = 1;
    std::string sim_features = "features.csv", sim_labels = "labels.txt";
    auto* simulate = app.add_subcommand("simulate", "draw the 9-block grid benchmark");
    simulate->add_option("--rows", sim_rows, "grid rows (multiple of 3)");
    simulate->add_option("--cols", sim_cols, "grid cols (multiple of 3)");
    simulate->add_option("--sigma", sim_sigma, "noise standard deviation");
    simulate->add_option("--seed", sim_seed, "RNG seed");
    simulate->add_option("--out-features", sim_features, "output feature table");
    simulate->add_option("--out-labels", sim_labels, "output ground-truth labels");

    std::string nmi_a, nmi_b;
    auto* eval = app.add_subcommand("eval-nmi", "NMI between two label files");
    eval->add_option("labels_a", nmi_a, "first label file")->required();
    eval->add_option("labels_b", nmi_b, "second label file")->required();

    std::string verify_graph, verify_grid;
    node_id verify_random_n = 0;
    std::uint64_t verify_seed = 1;
    node_id verify_max_nodes = 8;
    std::int64_t verify_max_trees = 1'000'000;
    auto* verify = app.add_subcommand("verify", "oracle cross-checks on a small graph");
    verify->add_option("--graph", verify_graph, "edge-list file");
    verify->add_option("--grid", verify_grid, "grid spec ROWSxCOLS");
    verify->add_option("--random-n", verify_random_n, "random connected graph on N nodes");
    verify->add_option("--seed", verify_seed, "seed for --random-n");
    verify->add_option("--max-nodes", verify_max_nodes, "enumeration budget: nodes");
    verify->add_option("--max-trees", verify_max_trees, "enumeration budget: trees/partitions");

    std::string render_in, render_out = "dendrogram.svg";
    auto* render = app.add_subcommand("render-dendrogram", "render a result document as SVG");
    render->add_option("--in", render_in, "result document")->required();
    render->add_option("--out", render_out, "SVG output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cluster) return run_cluster(copt);
        if (*simulate)
            return run_simulate(sim_rows, sim_cols, sim_sigma, sim_seed, sim_features, sim_labels);
        if (*eval) return run_eval_nmi(nmi_a, nmi_b);
        if (*verify)
            return run_verify(verify_graph, verify_grid, verify_random_n, verify_seed,
                              verify_max_nodes, verify_max_trees);
        if (*render) return run_render(render_in, render_out);
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    }
    return 1;
}
