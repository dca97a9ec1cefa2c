#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nodal/counting.hpp"
#include "nodal/generators.hpp"
#include "nodal/graph.hpp"
#include "nodal/metric.hpp"
#include "nodal/spectral.hpp"

namespace nodal {

// exclude: modes with zero entries are left out of the histogram.
// strong / weak: such modes are counted after the matching zero transform.
enum class ZeroPolicy { exclude, strong, weak };

inline std::string_view to_string(ZeroPolicy p) {
    switch (p) {
        case ZeroPolicy::exclude: return "exclude";
        case ZeroPolicy::strong: return "strong";
        case ZeroPolicy::weak: return "weak";
    }
    return "unknown";
}

inline ZeroPolicy parse_zero_policy(std::string_view s) {
    for (ZeroPolicy p : {ZeroPolicy::exclude, ZeroPolicy::strong, ZeroPolicy::weak})
        if (to_string(p) == s) return p;
    throw std::invalid_argument("unknown zero policy '" + std::string(s) + "'");
}

struct EnsembleConfig {
    Model model = Model::random_tree;
    GenerateParams params;
    std::size_t samples = 100;
    std::uint64_t seed = 1;
    ZeroPolicy zero_policy = ZeroPolicy::exclude;
    // Redraw graphs whose spectrum has a multiple eigenvalue or an eigenvector
    // with a zero entry.
    bool require_clean_spectrum = false;
    std::size_t max_redraws = 1000;
    double rel_tol = default_multiplicity_tolerance;
};

struct DefectHistogram {
    std::vector<double> p;       // P(r~), literal 1/V (or 1/N) normalization
    std::vector<double> stderr_; // standard error across samples
    double excluded_fraction = 0.0;
    std::size_t excluded_zero = 0;
    std::size_t excluded_multiple = 0;
    std::size_t counted_modes = 0;
    std::size_t support_violations = 0;  // counted modes with r~ < 0 or r~ > r
    std::size_t samples = 0;
    std::size_t redraws = 0;
    std::size_t max_cycle_rank = 0;

    double at(std::size_t r) const { return r < p.size() ? p[r] : 0.0; }
    double total() const {
        double s = excluded_fraction;
        for (double x : p) s += x;
        return s;
    }
};

// Finite-K diagnostics for the metric estimate.
struct MetricDefectResult {
    DefectHistogram histogram;
    std::vector<double> k_values;
    std::vector<std::vector<double>> nested;  // P(r~; K) for each K in k_values
    double drift = 0.0;                       // max change between the two largest K
    bool converged = false;
};

namespace detail {

struct ModeTally {
    std::vector<double> fractions;  // per r~, mode count then fraction of V
    std::size_t excluded_zero = 0, excluded_multiple = 0, counted = 0, violations = 0;
};

inline void accumulate(std::vector<double>& v, std::size_t i, double x) {
    if (v.size() <= i) v.resize(i + 1, 0.0);
    v[i] += x;
}

inline ModeTally discrete_modes(const Graph& g, const EnsembleConfig& cfg) {
    const Spectrum s = eigendecompose(laplacian(g), cfg.rel_tol);
    const std::size_t V = g.vertex_count();
    const std::size_t r = cycle_rank(g);
    ModeTally t;
    for (std::size_t i = 0; i < V; ++i) {
        if (!s.simple(i)) {
            ++t.excluded_multiple;
            continue;
        }
        const ValueVector f = ValueVector::from(s.vector(i));
        const SignVector sv = SignVector::from(f);
        std::size_t nu = 0;
        if (!sv.zero_free()) {
            if (cfg.zero_policy == ZeroPolicy::exclude) {
                ++t.excluded_zero;
                continue;
            }
            nu = cfg.zero_policy == ZeroPolicy::strong ? count_strong(g, sv).count : count_weak(g, sv).count;
        } else {
            nu = count_strong(g, sv).count;
        }
        const long long defect = static_cast<long long>(i + 1) - static_cast<long long>(nu);
        ++t.counted;
        if (defect < 0 || defect > static_cast<long long>(r)) {
            ++t.violations;
            if (defect < 0) continue;
        }
        accumulate(t.fractions, static_cast<std::size_t>(defect), 1.0);
    }
    for (double& x : t.fractions) x /= static_cast<double>(V);
    return t;
}

}  // namespace detail

// P(r~) = <(1/V) #{n : nu_n = n - r~}> over sampled graphs.
inline DefectHistogram defect_distribution_discrete(const EnsembleConfig& cfg) {
    if (cfg.samples == 0) throw std::invalid_argument("ensemble needs at least one sample");
    DefectHistogram h;
    std::vector<std::vector<double>> per_sample;
    double excluded = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        detail::ModeTally t;
        Graph g;
        for (std::size_t attempt = 0;; ++attempt) {
            g = generate(cfg.model, cfg.params, derive_seed(cfg.seed, i * (cfg.max_redraws + 1) + attempt));
            t = detail::discrete_modes(g, cfg);
            if (!cfg.require_clean_spectrum || (t.excluded_zero == 0 && t.excluded_multiple == 0)) break;
            if (attempt + 1 >= cfg.max_redraws)
                throw std::runtime_error("ensemble: no graph with a clean spectrum after " +
                                         std::to_string(cfg.max_redraws) + " draws");
            ++h.redraws;
        }
        h.max_cycle_rank = std::max(h.max_cycle_rank, cycle_rank(g));
        h.excluded_zero += t.excluded_zero;
        h.excluded_multiple += t.excluded_multiple;
        h.counted_modes += t.counted;
        h.support_violations += t.violations;
        excluded += static_cast<double>(t.excluded_zero + t.excluded_multiple) / static_cast<double>(g.vertex_count());
        per_sample.push_back(std::move(t.fractions));
    }
    std::size_t width = 0;
    for (const auto& f : per_sample) width = std::max(width, f.size());
    const auto n = static_cast<double>(cfg.samples);
    h.p.assign(width, 0.0);
    h.stderr_.assign(width, 0.0);
    for (std::size_t r = 0; r < width; ++r) {
        double sum = 0.0, sq = 0.0;
        for (const auto& f : per_sample) {
            const double x = r < f.size() ? f[r] : 0.0;
            sum += x;
            sq += x * x;
        }
        h.p[r] = sum / n;
        const double var = cfg.samples > 1 ? std::max(0.0, (sq - sum * sum / n) / (n - 1.0)) : 0.0;
        h.stderr_[r] = std::sqrt(var / n);
    }
    h.excluded_fraction = excluded / n;
    h.samples = cfg.samples;
    return h;
}

namespace detail {

inline DefectHistogram metric_histogram(const std::vector<MetricMode>& modes, std::size_t r) {
    DefectHistogram h;
    h.samples = 1;
    h.max_cycle_rank = r;
    if (modes.empty()) return h;
    const auto total = static_cast<double>(modes.size());
    for (const auto& m : modes) {
        if (m.multiplicity > 1) {
            ++h.excluded_multiple;
            continue;
        }
        if (!m.validated()) {
            ++h.excluded_zero;
            continue;
        }
        const long long defect = static_cast<long long>(m.n) - static_cast<long long>(*m.mu_direct);
        ++h.counted_modes;
        if (defect < 0 || defect > static_cast<long long>(r)) {
            ++h.support_violations;
            if (defect < 0) continue;
        }
        accumulate(h.p, static_cast<std::size_t>(defect), 1.0);
    }
    for (double& x : h.p) x /= total;
    h.excluded_fraction = static_cast<double>(h.excluded_multiple + h.excluded_zero) / total;
    h.stderr_.assign(h.p.size(), 0.0);
    // binomial standard error over the modes
    for (std::size_t i = 0; i < h.p.size(); ++i)
        h.stderr_[i] = std::sqrt(h.p[i] * (1.0 - h.p[i]) / static_cast<double>(modes.size()));
    return h;
}

}  // namespace detail

// P(r~; K) over modes with k_n <= K, reported at K/4, K/2 and K.
inline MetricDefectResult defect_distribution_metric(const MetricGraph& mg, double K, double tolerance = 0.05) {
    const SecularScan scan = eigenvalues(mg, K);
    if (!scan.complete)
        throw std::runtime_error("defect_distribution_metric: eigenvalue scan incomplete (Weyl defect " +
                                 std::to_string(scan.weyl_defect) + ")");
    const std::size_t r = cycle_rank(mg.graph());
    const auto modes = analyze_modes(mg, scan, scan.zero_modes + scan.count());
    MetricDefectResult res;
    for (double frac : {0.25, 0.5, 1.0}) {
        const double k = K * frac;
        std::vector<MetricMode> sub;
        for (const auto& m : modes)
            if (m.k <= k) sub.push_back(m);
        const DefectHistogram h = detail::metric_histogram(sub, r);
        res.k_values.push_back(k);
        res.nested.push_back(h.p);
        if (frac == 1.0) res.histogram = h;
    }
    const auto& a = res.nested[1];
    const auto& b = res.nested[2];
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        res.drift = std::max(res.drift, std::abs(x - y));
    }
    res.converged = res.drift < tolerance;
    return res;
}

inline std::string histogram_csv(const DefectHistogram& h) {
    std::ostringstream os;
    os << std::setprecision(12) << "r_tilde,P,stderr,excluded_fraction\n";
    for (std::size_t r = 0; r < h.p.size(); ++r)
        os << r << ',' << h.p[r] << ',' << (r < h.stderr_.size() ? h.stderr_[r] : 0.0) << ',' << h.excluded_fraction
           << '\n';
    if (h.p.empty()) os << "0,0,0," << h.excluded_fraction << '\n';
    return os.str();
}

inline nlohmann::json ensemble_manifest(const EnsembleConfig& cfg, const DefectHistogram& h) {
    return {{"model", std::string(to_string(cfg.model))},
            {"vertices", cfg.params.vertices},
            {"edge_probability", cfg.params.edge_probability},
            {"degree", cfg.params.degree},
            {"side", cfg.params.side},
            {"samples", cfg.samples},
            {"seed", cfg.seed},
            {"zero_policy", std::string(to_string(cfg.zero_policy))},
            {"require_clean_spectrum", cfg.require_clean_spectrum},
            {"redraws", h.redraws},
            {"counted_modes", h.counted_modes},
            {"excluded_zero", h.excluded_zero},
            {"excluded_multiple", h.excluded_multiple},
            {"excluded_fraction", h.excluded_fraction},
            {"support_violations", h.support_violations},
            {"max_cycle_rank", h.max_cycle_rank},
            {"p", h.p}};
}

}  // namespace nodal
