// nodal: command-line front end for the nodal-domain library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nodal/benchmark.hpp"
#include "nodal/counting.hpp"
#include "nodal/ensemble.hpp"
#include "nodal/generators.hpp"
#include "nodal/graph_io.hpp"
#include "nodal/metric.hpp"
#include "nodal/partition.hpp"
#include "nodal/sector.hpp"
#include "nodal/spectral.hpp"

namespace {

constexpr int exit_input = 2;
constexpr int exit_violation = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 1;
    double tol = nodal::default_multiplicity_tolerance;
    bool strict = false;
    std::string output;
};

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void emit(const Globals& g, const std::string& text) {
    if (g.output.empty() || g.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(g.output);
    if (!os) throw InputError("cannot write '" + g.output + "'");
    os << text;
}

// "+-+0" or "1,-2.5,0,3"
nodal::SignVector parse_signs(const std::string& s, std::size_t n) {
    std::vector<int> out;
    if (s.find_first_not_of("+-0") == std::string::npos) {
        for (char c : s) out.push_back(c == '+' ? 1 : (c == '-' ? -1 : 0));
    } else {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            double x = 0.0;
            try {
                x = std::stod(tok);
            } catch (const std::exception&) {
                throw InputError("bad vector entry '" + tok + "'");
            }
            out.push_back(x > 0 ? 1 : (x < 0 ? -1 : 0));
        }
    }
    if (out.size() != n)
        throw InputError("vector has " + std::to_string(out.size()) + " entries, graph has " + std::to_string(n));
    return nodal::SignVector(out);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw InputError("bad number '" + tok + "'");
        }
    }
    return out;
}

int run_analyze(const Globals& gl, const std::string& path, bool bipartite_check, bool morphology) {
    using namespace nodal;
    const Graph g = parse_text(read_file(path));
    const Spectrum s = eigendecompose(laplacian(g), gl.tol);
    const BoundReport rep = bound_report(g, s, gl.tol);
    emit(gl, nodal_report_csv(rep));
    bool violation = rep.any_violation();
    if (bipartite_check && g.vertex_count() > 0) {
        const auto& top = rep.rows.back();
        const bool full = top.nu_strong == g.vertex_count();
        std::cerr << "bipartite=" << rep.bipartite << " nu_V=" << top.nu_strong << " V=" << g.vertex_count()
                  << " resolution_ok=" << (full == rep.bipartite) << '\n';
        if (rep.connected && top.multiplicity == 1 && full != rep.bipartite) violation = true;
    }
    if (morphology) {
        if (!regular_degree(g)) throw InputError("--morphology needs a regular graph");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const MorphologyReport m = check_morphology(g, ValueVector::from(s.vector(i)), s.eigenvalues[i]);
            if (!m.ok()) {
                violation = true;
                std::cerr << "morphology violation at n=" << i + 1 << '\n';
            }
        }
    }
    if (violation) std::cerr << "bound violation detected\n";
    return gl.strict && violation ? exit_violation : 0;
}

int run_metric(const Globals& gl, const std::string& path, double kmax, std::size_t modes, const std::string& conj,
               const std::string& compare) {
    using namespace nodal;
    const MetricGraph mg = parse_metric_text(read_file(path));
    const SecularScan scan = modes > 0 ? first_modes(mg, modes) : eigenvalues(mg, kmax);
    const std::size_t count = modes > 0 ? modes : scan.zero_modes + scan.count();
    auto table = analyze_modes(mg, scan, count);
    std::array<double, 3> abc{};
    if (!conj.empty()) {
        const auto v = parse_list(conj);
        if (v.size() != 3) throw InputError("--conjecture expects a,b,c");
        abc = {v[0], v[1], v[2]};
        for (auto& m : table) m.conjecture = conjectured_count_II(static_cast<long long>(m.n), v[0], v[1], v[2]);
    }
    emit(gl, mode_report_csv(table));
    bool violation = !scan.complete;
    std::cerr << "roots=" << scan.count() << " zero_modes=" << scan.zero_modes << " weyl_defect=" << scan.weyl_defect
              << " bound=" << scan.weyl_bound << " complete=" << scan.complete << '\n';
    for (const auto& m : table)
        if (m.mu_formula && m.mu_direct && *m.mu_formula != *m.mu_direct) violation = true;
    if (!conj.empty()) {
        const ConjectureComparison cc = compare_conjecture(table, abc[0], abc[1], abc[2], count);
        std::cerr << "conjecture: compared=" << cc.compared << " raw_rate=" << cc.raw_rate
                  << " best_offset=" << cc.best_offset << " best_rate=" << cc.best_rate << '\n';
    }
    if (!compare.empty()) {
        const MetricGraph other = parse_metric_text(read_file(compare));
        const std::size_t n = scan.count();
        const SecularScan s2 = first_modes(other, n);
        const double mis = spectral_mismatch(scan, s2, n);
        std::cerr << "isospectral_mismatch=" << mis << " over " << n << " roots\n";
        if (!(mis <= 1e-8)) violation = true;
    }
    return gl.strict && violation ? exit_violation : 0;
}

int run_equinodal(const Globals& gl, const std::string& path, const std::string& table_path, std::size_t cap) {
    using namespace nodal;
    const Graph g = parse_text(read_file(path));
    const EquiNodalTable t = build_equinodal(g, cap);
    if (!table_path.empty()) write_equinodal(t, table_path);
    nlohmann::json j = equinodal_summary_json(t);
    bool violation = false;
    for (auto c : t.set_sizes)
        if (c % 2) violation = true;
    if (is_connected(g) && g.vertex_count() > 0 &&
        t.max_count() > g.vertex_count() - chromatic_number(g).value + 2)
        violation = true;
    if (is_tree(g)) {
        const auto p = uniform_distribution(t);
        j["tree_gaussian_total_variation"] = total_variation(p, tree_gaussian(g.vertex_count(), p.size() - 1));
    }
    emit(gl, j.dump(2) + "\n");
    return gl.strict && violation ? exit_violation : 0;
}

int run_partition(const Globals& gl, const std::string& path, const std::string& vec, std::size_t cap) {
    using namespace nodal;
    const Graph g = parse_text(read_file(path));
    const SignVector s = parse_signs(vec, g.vertex_count());
    if (!s.zero_free()) throw InputError("partition function needs a zero-free vector");
    const nlohmann::json j = partition_report_json(g, s, cap, cap);
    emit(gl, j.dump(2) + "\n");
    return gl.strict && !j["identities_ok"].get<bool>() ? exit_violation : 0;
}

int run_ensemble(const Globals& gl, nodal::EnsembleConfig cfg, const std::string& model, const std::string& policy,
                 const std::string& manifest, const std::string& metric_path, double kmax) {
    using namespace nodal;
    cfg.seed = gl.seed;
    cfg.rel_tol = gl.tol;
    cfg.zero_policy = parse_zero_policy(policy);
    DefectHistogram h;
    nlohmann::json man;
    if (!metric_path.empty()) {
        const MetricGraph mg = parse_metric_text(read_file(metric_path));
        const MetricDefectResult res = defect_distribution_metric(mg, kmax);
        h = res.histogram;
        man = {{"metric_graph", metric_path}, {"k_max", kmax}, {"k_values", res.k_values},
               {"nested", res.nested},        {"drift", res.drift}, {"converged", res.converged},
               {"p", h.p},                    {"excluded_fraction", h.excluded_fraction},
               {"support_violations", h.support_violations}};
    } else {
        cfg.model = parse_model(model);
        h = defect_distribution_discrete(cfg);
        man = ensemble_manifest(cfg, h);
    }
    emit(gl, histogram_csv(h));
    if (!manifest.empty()) {
        std::ofstream os(manifest);
        if (!os) throw InputError("cannot write '" + manifest + "'");
        os << man.dump(2) << '\n';
    }
    return gl.strict && h.support_violations > 0 ? exit_violation : 0;
}

int run_benchmark(const Globals& gl, const std::string& model, const std::string& sizes, const std::string& density,
                  std::size_t reps) {
    using namespace nodal;
    std::vector<std::size_t> vs;
    for (double x : parse_list(sizes)) {
        if (!(x >= 2)) throw InputError("sizes must be at least 2");
        vs.push_back(static_cast<std::size_t>(x));
    }
    std::vector<TimingRow> rows;
    std::ostringstream summary;
    if (model == "grid") {
        rows = sparse_grid_benchmark(vs, gl.seed, reps);
        summary << "sparse slope=" << loglog_slope(rows) << '\n';
    } else if (model == "gnp" || model == "dense") {
        for (double d : parse_list(density)) {
            const auto part = dense_breakup_benchmark(vs, d, gl.seed, reps);
            summary << "dense r/V=" << d << " slope=" << loglog_slope(part) << '\n';
            rows.insert(rows.end(), part.begin(), part.end());
        }
    } else {
        throw InputError("benchmark --model must be grid or gnp");
    }
    emit(gl, timing_csv(rows));
    std::cerr << summary.str();
    bool bad = false;
    for (const auto& r : rows) bad = bad || !r.count_ok;
    return gl.strict && bad ? exit_violation : 0;
}

int run_generate(const Globals& gl, const std::string& model, nodal::GenerateParams p) {
    using namespace nodal;
    emit(gl, to_text(generate(parse_model(model), p, gl.seed)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nodal domain counting on discrete and metric graphs"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals gl;
    app.add_option("--seed", gl.seed, "Random seed")->capture_default_str();
    app.add_option("--tol", gl.tol, "Relative eigenvalue multiplicity tolerance")->capture_default_str();
    app.add_flag("--strict", gl.strict, "Exit with status 3 on any bound or invariant violation");
    app.add_option("--output,-o", gl.output, "Output file (default: stdout)");

    std::string path, other, vec, conj, table, manifest, metric_path, model = "random_tree", policy = "exclude";
    std::string sizes = "100,200,400,800,1500", density = "0.5,5";
    bool bip = false, morph = false;
    double kmax = 20.0;
    std::size_t modes = 0, cap = nodal::default_sector_cap, reps = 5;
    nodal::EnsembleConfig ecfg;
    nodal::GenerateParams gp;

    auto* analyze = app.add_subcommand("analyze", "Nodal report for every Laplacian eigenvector");
    analyze->add_option("graph", path, "Graph file")->required();
    analyze->add_flag("--check-bipartite-resolution", bip, "Check nu_V = V iff the graph is bipartite");
    analyze->add_flag("--morphology", morph, "Check the regular-graph domain restrictions");

    auto* metric = app.add_subcommand("metric", "Spectrum and nodal counts of a metric graph");
    metric->add_option("graph", path, "Metric graph file")->required();
    metric->add_option("--kmax", kmax, "Scan (0, kmax]")->capture_default_str();
    metric->add_option("--modes", modes, "Scan until this many modes are found (overrides --kmax)");
    metric->add_option("--conjecture", conj, "a,b,c of the isospectral pair; compare the conjectured count");
    metric->add_option("--compare", other, "Second metric graph; report the spectral mismatch");

    auto* equi = app.add_subcommand("equinodal", "Equi-nodal sets over all sign patterns");
    equi->add_option("graph", path, "Graph file")->required();
    equi->add_option("--table", table, "Write the binary table to this path");
    equi->add_option("--cap", cap, "Maximum V")->capture_default_str();

    auto* part = app.add_subcommand("partition", "Partition function report for a sign vector");
    part->add_option("graph", path, "Graph file")->required();
    part->add_option("--vector", vec, "Signs as +-+- or values as 1,-2,3")->required();
    std::size_t pcap = nodal::default_spin_cap;
    part->add_option("--cap", pcap, "Maximum V and non-flip bond count")->capture_default_str();

    auto* ens = app.add_subcommand("ensemble", "Nodal defect distribution");
    ens->add_option("--model", model, "Graph model")->capture_default_str();
    ens->add_option("--vertices", ecfg.params.vertices, "Vertex count")->default_val(12);
    ens->add_option("--p", ecfg.params.edge_probability, "gnp edge probability")->capture_default_str();
    ens->add_option("--degree", ecfg.params.degree, "random_regular degree")->capture_default_str();
    ens->add_option("--side", ecfg.params.side, "periodic_grid side");
    ens->add_option("--samples", ecfg.samples, "Sample count")->capture_default_str();
    ens->add_option("--zero-policy", policy, "exclude, strong or weak")->capture_default_str();
    ens->add_flag("--clean", ecfg.require_clean_spectrum, "Redraw graphs with zeros or multiplicities");
    ens->add_option("--manifest", manifest, "Write the manifest JSON here");
    ens->add_option("--metric", metric_path, "Metric graph file: distribution over its spectrum");
    ens->add_option("--kmax", kmax, "Metric spectrum cutoff K")->capture_default_str();

    auto* bench = app.add_subcommand("benchmark", "Break-up method timing");
    bench->add_option("--model", model, "grid or gnp")->required();
    bench->add_option("--sizes", sizes, "Comma-separated V values")->capture_default_str();
    bench->add_option("--density", density, "Comma-separated r/V values (gnp)")->capture_default_str();
    bench->add_option("--reps", reps, "Repetitions per size (median)")->capture_default_str();

    auto* gen = app.add_subcommand("generate", "Emit a random or structured graph");
    gen->add_option("--model", model, "Graph model")->required();
    gen->add_option("--vertices", gp.vertices, "Vertex count")->required();
    gen->add_option("--p", gp.edge_probability, "gnp edge probability")->capture_default_str();
    gen->add_option("--degree", gp.degree, "random_regular degree")->capture_default_str();
    gen->add_option("--side", gp.side, "periodic_grid side");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_input;
    }

    try {
        if (*analyze) return run_analyze(gl, path, bip, morph);
        if (*metric) return run_metric(gl, path, kmax, modes, conj, other);
        if (*equi) return run_equinodal(gl, path, table, cap);
        if (*part) return run_partition(gl, path, vec, pcap);
        if (*ens) return run_ensemble(gl, ecfg, model, policy, manifest, metric_path, kmax);
        if (*bench) return run_benchmark(gl, model, sizes, density, reps);
        if (*gen) return run_generate(gl, model, gp);
    } catch (const nodal::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_input;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
