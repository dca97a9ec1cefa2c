#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nodal/graph.hpp"
#include "nodal/spectral.hpp"

namespace nodal {

// Real vertex values. Entries with |value| <= zero_threshold count as zeros.
struct ValueVector {
    std::vector<double> values;
    double zero_threshold = 0.0;

    static constexpr double default_relative_threshold = 1e-10;

    ValueVector() = default;
    ValueVector(std::vector<double> v, double threshold) : values(std::move(v)), zero_threshold(threshold) {}

    // Threshold 1e-10 * max|f_i|.
    static ValueVector with_default_threshold(std::vector<double> v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return ValueVector(std::move(v), default_relative_threshold * m);
    }

    static ValueVector from(const Vector& v) {
        return with_default_threshold(std::vector<double>(v.data(), v.data() + v.size()));
    }

    std::size_t size() const { return values.size(); }
};

struct SignVector {
    std::vector<int> signs;  // +1, -1 or 0 per vertex

    SignVector() = default;
    explicit SignVector(std::vector<int> s) : signs(std::move(s)) {
        for (int x : signs)
            if (x < -1 || x > 1) throw std::invalid_argument("sign entries must be -1, 0 or +1");
    }

    static SignVector from(const ValueVector& f) {
        SignVector s;
        s.signs.reserve(f.size());
        for (double x : f.values) s.signs.push_back(std::abs(x) <= f.zero_threshold ? 0 : (x > 0 ? 1 : -1));
        return s;
    }

    // Bit i set <=> sign +1 at vertex i (zero-free vectors only).
    static SignVector from_mask(std::uint64_t mask, std::size_t n) {
        SignVector s;
        s.signs.resize(n);
        for (std::size_t i = 0; i < n; ++i) s.signs[i] = ((mask >> i) & 1U) ? 1 : -1;
        return s;
    }

    std::size_t size() const { return signs.size(); }
    bool zero_free() const { return std::find(signs.begin(), signs.end(), 0) == signs.end(); }
    bool all_zero() const {
        return std::all_of(signs.begin(), signs.end(), [](int x) { return x == 0; });
    }
    std::size_t zero_count() const { return static_cast<std::size_t>(std::count(signs.begin(), signs.end(), 0)); }

    SignVector negated() const {
        SignVector s = *this;
        for (int& x : s.signs) x = -x;
        return s;
    }

    std::uint64_t mask() const {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < signs.size(); ++i)
            if (signs[i] > 0) m |= (std::uint64_t{1} << i);
        return m;
    }
};

namespace detail {

inline void require_size(const Graph& g, const SignVector& s) {
    if (s.size() != g.vertex_count())
        throw std::invalid_argument("vector length " + std::to_string(s.size()) + " does not match V=" +
                                    std::to_string(g.vertex_count()));
}

inline void require_zero_free(const SignVector& s, const char* op) {
    if (!s.zero_free())
        throw std::invalid_argument(std::string(op) + ": vector has zero entries; apply zero_transform first");
}

}  // namespace detail

struct DomainCount {
    std::size_t count = 0;
    bool all_zero = false;  // diagnostic: the vector vanishes identically
};

// Strong nodal domains labeled per vertex (npos on zero vertices).
struct NodalDomains {
    std::vector<std::size_t> labels;
    std::vector<std::size_t> sizes;
    std::vector<int> domain_sign;
    std::size_t count() const { return sizes.size(); }
};

inline NodalDomains label_strong_domains(const Graph& g, const SignVector& s) {
    detail::require_size(g, s);
    const std::size_t n = g.vertex_count();
    NodalDomains d;
    d.labels.assign(n, npos);
    std::vector<Vertex> stack;
    for (Vertex v = 0; v < n; ++v) {
        if (s.signs[v] == 0 || d.labels[v] != npos) continue;
        const std::size_t id = d.sizes.size();
        d.sizes.push_back(0);
        d.domain_sign.push_back(s.signs[v]);
        d.labels[v] = id;
        stack.push_back(v);
        while (!stack.empty()) {
            Vertex x = stack.back();
            stack.pop_back();
            ++d.sizes[id];
            for (Vertex y : g.neighbors(x)) {
                if (d.labels[y] == npos && s.signs[y] == s.signs[v]) {
                    d.labels[y] = id;
                    stack.push_back(y);
                }
            }
        }
    }
    return d;
}

// Reference labeling count: components of each strict sign class after
// deleting zero vertices.
inline DomainCount count_strong(const Graph& g, const SignVector& s) {
    return {label_strong_domains(g, s).count(), s.all_zero()};
}

inline DomainCount count_strong(const Graph& g, const ValueVector& f) {
    return count_strong(g, SignVector::from(f));
}

// Weak domains: components of {f >= 0} holding a positive vertex plus
// components of {f <= 0} holding a negative vertex.
inline DomainCount count_weak(const Graph& g, const SignVector& s) {
    detail::require_size(g, s);
    const std::size_t n = g.vertex_count();
    std::size_t total = 0;
    for (int sign : {1, -1}) {
        std::vector<bool> seen(n, false);
        std::vector<Vertex> stack;
        for (Vertex v = 0; v < n; ++v) {
            if (seen[v] || s.signs[v] != sign) continue;
            ++total;
            seen[v] = true;
            stack.push_back(v);
            while (!stack.empty()) {
                Vertex x = stack.back();
                stack.pop_back();
                for (Vertex y : g.neighbors(x)) {
                    if (!seen[y] && s.signs[y] != -sign) {
                        seen[y] = true;
                        stack.push_back(y);
                    }
                }
            }
        }
    }
    return {total, s.all_zero()};
}

inline DomainCount count_weak(const Graph& g, const ValueVector& f) {
    return count_weak(g, SignVector::from(f));
}

enum class ZeroMode { strong, weak };

struct ZeroTransform {
    Graph graph;
    SignVector signs;               // zero-free
    std::vector<Vertex> origin;     // transformed vertex -> original vertex
    bool artificial_domain_hazard = false;  // weak mode only
};

// strong: delete zero vertices with their bonds.
// weak: split each zero vertex into a +1 and a -1 copy, each joined to every
// former neighbour (and to every copy of a zero neighbour) but not to each other.
inline ZeroTransform zero_transform(const Graph& g, const SignVector& s, ZeroMode mode) {
    detail::require_size(g, s);
    const std::size_t n = g.vertex_count();
    ZeroTransform out;
    if (s.zero_free()) {
        out.graph = g;
        out.signs = s;
        out.origin.resize(n);
        std::iota(out.origin.begin(), out.origin.end(), Vertex{0});
        return out;
    }
    if (mode == ZeroMode::strong) {
        std::vector<bool> keep(n);
        for (Vertex v = 0; v < n; ++v) keep[v] = s.signs[v] != 0;
        InducedSubgraph sub = induced_subgraph(g, keep);
        out.graph = std::move(sub.graph);
        out.origin = std::move(sub.origin);
        for (Vertex v : out.origin) out.signs.signs.push_back(s.signs[v]);
        return out;
    }
    // Each original vertex maps to one or two new vertices.
    std::vector<std::vector<Vertex>> images(n);
    for (Vertex v = 0; v < n; ++v) {
        if (s.signs[v] != 0) {
            images[v].push_back(out.origin.size());
            out.origin.push_back(v);
            out.signs.signs.push_back(s.signs[v]);
        } else {
            for (int sign : {1, -1}) {
                images[v].push_back(out.origin.size());
                out.origin.push_back(v);
                out.signs.signs.push_back(sign);
            }
        }
    }
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (const Bond& b : g.bonds())
        for (Vertex x : images[b.u])
            for (Vertex y : images[b.v]) pairs.emplace_back(x, y);
    out.graph = Graph(out.origin.size(), pairs);
    // Hazard: a domain built only from zero copies has no strictly signed vertex.
    NodalDomains d = label_strong_domains(out.graph, out.signs);
    std::vector<bool> has_real(d.count(), false);
    for (Vertex v = 0; v < out.graph.vertex_count(); ++v)
        if (s.signs[out.origin[v]] != 0) has_real[d.labels[v]] = true;
    out.artificial_domain_hazard = std::find(has_real.begin(), has_real.end(), false) != has_real.end();
    return out;
}

struct FlipSet {
    std::vector<Bond> flips;
    std::size_t count = 0;
    long long quadratic_form = 0;  // (s, L s), always 4 * count
};

// Bonds with strictly opposite endpoint signs, plus (s, L s) evaluated
// independently as sum_i d_i s_i^2 - 2 sum_b s_u s_v.
inline FlipSet flip_count(const Graph& g, const SignVector& s) {
    detail::require_size(g, s);
    detail::require_zero_free(s, "flip_count");
    FlipSet out;
    long long diag = 0, off = 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        diag += static_cast<long long>(g.degree(v)) * s.signs[v] * s.signs[v];
    for (const Bond& b : g.bonds()) {
        off += static_cast<long long>(s.signs[b.u]) * s.signs[b.v];
        if (s.signs[b.u] * s.signs[b.v] < 0) out.flips.push_back(b);
    }
    out.count = out.flips.size();
    out.quadratic_form = diag - 2 * off;
    return out;
}

inline long long laplacian_quadratic_form(const Matrix& L, const SignVector& s) {
    Vector x(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) x(static_cast<Eigen::Index>(i)) = s.signs[i];
    return std::llround(x.dot(L * x));
}

// Graph with every flip bond removed.
inline Graph remove_flips(const Graph& g, const SignVector& s) {
    std::vector<bool> keep(g.bond_count());
    for (std::size_t i = 0; i < g.bond_count(); ++i) {
        const Bond& b = g.bonds()[i];
        keep[i] = s.signs[b.u] * s.signs[b.v] > 0;
    }
    return spanning_subgraph(g, keep);
}

struct FlipCount {
    std::size_t count = 0;                    // nu
    std::size_t flips = 0;                    // F
    std::size_t constant_sign_cycle_rank = 0; // l
};

// nu = F + V - B + l with l the cycle rank of the flip-deleted graph,
// applied per connected component and summed.
inline FlipCount count_via_flips(const Graph& g, const SignVector& s) {
    detail::require_size(g, s);
    detail::require_zero_free(s, "count_via_flips");
    const ComponentLabeling comps = connected_components(g);
    FlipCount total;
    for (std::size_t c = 0; c < comps.component_count; ++c) {
        std::vector<bool> keep(g.vertex_count());
        for (Vertex v = 0; v < g.vertex_count(); ++v) keep[v] = comps.labels[v] == c;
        InducedSubgraph sub = induced_subgraph(g, keep);
        SignVector local;
        for (Vertex v : sub.origin) local.signs.push_back(s.signs[v]);
        const FlipSet fs = flip_count(sub.graph, local);
        const std::size_t l = cycle_rank(remove_flips(sub.graph, local));
        const auto V = static_cast<long long>(sub.graph.vertex_count());
        const auto B = static_cast<long long>(sub.graph.bond_count());
        const long long nu = fs.quadratic_form / 4 + V - B + static_cast<long long>(l);
        total.count += static_cast<std::size_t>(nu);
        total.flips += fs.count;
        total.constant_sign_cycle_rank += l;
    }
    return total;
}

// C~_ij = C_ij (1 + s_i s_j) / 2 and L~ = diag(row sums of C~) - C~.
inline Matrix breakup_laplacian(const Graph& g, const SignVector& s) {
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    Matrix L = Matrix::Zero(n, n);
    for (const Bond& b : g.bonds()) {
        const double c = (1.0 + s.signs[b.u] * s.signs[b.v]) / 2.0;
        const auto u = static_cast<Eigen::Index>(b.u);
        const auto v = static_cast<Eigen::Index>(b.v);
        L(u, v) -= c;
        L(v, u) -= c;
        L(u, u) += c;
        L(v, v) += c;
    }
    return L;
}

inline SparseMatrix sparse_breakup_laplacian(const Graph& g, const SignVector& s) {
    return sparse_laplacian(remove_flips(g, s));
}

// Zero multiplicity of L~.
inline std::size_t count_via_breakup(const Graph& g, const SignVector& s,
                                     double rel_tol = default_multiplicity_tolerance) {
    detail::require_size(g, s);
    detail::require_zero_free(s, "count_via_breakup");
    return zero_multiplicity(breakup_laplacian(g, s), rel_tol);
}

inline std::size_t count_via_breakup_sparse(const Graph& g, const SignVector& s, double shift = 1e-11) {
    detail::require_size(g, s);
    detail::require_zero_free(s, "count_via_breakup_sparse");
    return zero_multiplicity_sparse(sparse_breakup_laplacian(g, s), shift);
}

struct MorphologyReport {
    double eigenvalue = 0.0;
    std::size_t degree = 0;            // v
    std::size_t domain_count = 0;
    bool no_interior_vertices = true;  // clause (i), checked when lambda > v
    bool no_singleton_domains = true;  // clause (ii), checked when lambda < v
    bool high_degree_vertex = true;    // clause (iii), checked when lambda < v - k for some k >= 1
    bool domain_bound = true;          // count <= V / (k + 2), checked when lambda < v
    std::optional<std::size_t> k;      // largest k >= 0 with lambda < v - k
    bool ok() const { return no_interior_vertices && no_singleton_domains && high_degree_vertex && domain_bound; }
};

// Restrictions on the strong nodal domains of an eigenvector of a v-regular
// graph. `tol` decides when lambda is considered equal to an integer.
inline MorphologyReport check_morphology(const Graph& g, const ValueVector& f, double lambda, double tol = 1e-9) {
    const auto deg = regular_degree(g);
    if (!deg) throw std::invalid_argument("check_morphology: graph is not regular");
    const SignVector s = SignVector::from(f);
    detail::require_size(g, s);
    MorphologyReport rep;
    rep.eigenvalue = lambda;
    rep.degree = *deg;
    const double v = static_cast<double>(*deg);
    const NodalDomains d = label_strong_domains(g, s);
    rep.domain_count = d.count();

    std::vector<std::size_t> max_internal_degree(d.count(), 0);
    std::vector<bool> has_interior(d.count(), false);
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
        if (d.labels[x] == npos) continue;
        std::size_t internal = 0;
        bool interior = true;
        for (Vertex y : g.neighbors(x)) {
            if (d.labels[y] == d.labels[x]) ++internal;
            else interior = false;
        }
        max_internal_degree[d.labels[x]] = std::max(max_internal_degree[d.labels[x]], internal);
        if (interior) has_interior[d.labels[x]] = true;
    }

    if (lambda > v + tol)
        rep.no_interior_vertices = std::find(has_interior.begin(), has_interior.end(), true) == has_interior.end();
    if (lambda < v - tol) {
        rep.no_singleton_domains = std::find(d.sizes.begin(), d.sizes.end(), std::size_t{1}) == d.sizes.end();
        // Largest integer k with lambda < v - k, strict within tol.
        const double gap = v - lambda;
        const double nearest = std::round(gap);
        const auto k = static_cast<std::size_t>(std::abs(gap - nearest) <= tol ? nearest - 1.0 : std::floor(gap));
        rep.k = k;
        if (k >= 1) {
            for (std::size_t m : max_internal_degree)
                if (m <= k) rep.high_degree_vertex = false;
        }
        rep.domain_bound = static_cast<double>(d.count()) * static_cast<double>(k + 2) <=
                           static_cast<double>(g.vertex_count());
    }
    return rep;
}

struct NodalReport {
    std::size_t n = 0;               // 1-based eigen index
    double eigenvalue = 0.0;
    std::size_t multiplicity = 1;
    std::size_t nu_strong = 0;
    std::size_t nu_weak = 0;
    std::size_t nu_flips = 0;        // on the strong zero transform when zeros are present
    std::size_t nu_breakup = 0;
    std::size_t flips = 0;           // F
    std::size_t l = 0;
    std::size_t zero_entries = 0;
    bool all_zero = false;
    bool courant_ok = true;          // nu <= n + m - 1
    std::optional<bool> berkolaiko_ok;   // nu >= n - r (simple, zero-free)
    bool chromatic_ok = true;        // nu <= V - chi + 2
    std::optional<bool> flip_bounds_ok;  // F+1-r <= nu <= F+1 and n-r-1 <= F <= n+r-1
    std::optional<bool> tree_ok;     // nu = n on trees (simple, zero-free)
    bool methods_agree = true;
    bool weak_le_strong = true;

    bool violation() const {
        return !courant_ok || berkolaiko_ok == false || !chromatic_ok || flip_bounds_ok == false ||
               tree_ok == false || !methods_agree || !weak_le_strong;
    }
};

struct BoundReport {
    std::vector<NodalReport> rows;
    std::size_t cycle_rank = 0;
    ChromaticNumber chromatic;
    bool bipartite = false;
    bool connected = false;
    bool any_violation() const {
        return std::any_of(rows.begin(), rows.end(), [](const NodalReport& r) { return r.violation(); });
    }
};

// Counts every eigenvector by all discrete methods and audits the known bounds.
inline BoundReport bound_report(const Graph& g, const Spectrum& spectrum,
                                double rel_tol = default_multiplicity_tolerance) {
    BoundReport rep;
    rep.cycle_rank = cycle_rank(g);
    rep.chromatic = chromatic_number(g);
    rep.bipartite = is_bipartite(g);
    rep.connected = is_connected(g);
    const std::size_t V = g.vertex_count();
    const bool tree = rep.connected && rep.cycle_rank == 0;
    const auto r = static_cast<long long>(rep.cycle_rank);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        NodalReport row;
        row.n = i + 1;
        row.eigenvalue = spectrum.eigenvalues[i];
        row.multiplicity = spectrum.multiplicity(i);
        const ValueVector f = ValueVector::from(spectrum.vector(i));
        const SignVector s = SignVector::from(f);
        row.zero_entries = s.zero_count();
        const DomainCount strong = count_strong(g, s);
        row.all_zero = strong.all_zero;
        row.nu_strong = strong.count;
        row.nu_weak = count_weak(g, s).count;
        row.weak_le_strong = row.nu_weak <= row.nu_strong;
        const ZeroTransform t = zero_transform(g, s, ZeroMode::strong);
        if (t.graph.vertex_count() > 0) {
            const FlipCount fc = count_via_flips(t.graph, t.signs);
            row.nu_flips = fc.count;
            row.flips = fc.flips;
            row.l = fc.constant_sign_cycle_rank;
            row.nu_breakup = count_via_breakup(t.graph, t.signs, rel_tol);
        }
        row.methods_agree = row.nu_flips == row.nu_strong && row.nu_breakup == row.nu_strong;

        const auto nu = static_cast<long long>(row.nu_strong);
        const auto first = static_cast<long long>(spectrum.group_start(i)) + 1;
        const auto m = static_cast<long long>(row.multiplicity);
        row.courant_ok = nu <= first + m - 1;
        if (rep.connected && V > 0)
            row.chromatic_ok = nu <= static_cast<long long>(V) - static_cast<long long>(rep.chromatic.value) + 2;
        const bool hypotheses = rep.connected && row.multiplicity == 1 && row.zero_entries == 0;
        if (hypotheses) {
            const auto n = static_cast<long long>(row.n);
            const auto F = static_cast<long long>(row.flips);
            row.berkolaiko_ok = nu >= n - r;
            row.flip_bounds_ok = (F + 1 - r <= nu) && (nu <= F + 1) && (n - r - 1 <= F) && (F <= n + r - 1);
            if (tree) row.tree_ok = nu == n;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

inline std::string nodal_report_csv(const BoundReport& rep) {
    auto opt = [](const std::optional<bool>& b) -> std::string { return b ? (*b ? "1" : "0") : "NA"; };
    std::ostringstream os;
    os << std::setprecision(15);
    os << "n,lambda,m,nu_strong,nu_weak,nu_flips,nu_breakup,F,l,courant_ok,berkolaiko_ok,chromatic_ok\n";
    for (const auto& r : rep.rows) {
        os << r.n << ',' << r.eigenvalue << ',' << r.multiplicity << ',' << r.nu_strong << ',' << r.nu_weak << ','
           << r.nu_flips << ',' << r.nu_breakup << ',' << r.flips << ',' << r.l << ',' << (r.courant_ok ? 1 : 0)
           << ',' << opt(r.berkolaiko_ok) << ',' << (r.chromatic_ok ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace nodal
