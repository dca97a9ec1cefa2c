#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nodal/counting.hpp"
#include "nodal/graph.hpp"
#include "nodal/graph_io.hpp"

namespace nodal {

enum class Condition { neumann, dirichlet };

class MetricGraph {
public:
    MetricGraph() = default;
    MetricGraph(Graph g, std::vector<double> lengths, std::vector<Condition> conditions = {})
        : graph_(std::move(g)), lengths_(std::move(lengths)), conditions_(std::move(conditions)) {
        if (conditions_.empty()) conditions_.assign(graph_.vertex_count(), Condition::neumann);
        if (lengths_.size() != graph_.bond_count()) throw std::invalid_argument("one length per bond required");
        if (conditions_.size() != graph_.vertex_count())
            throw std::invalid_argument("one vertex condition per vertex required");
        if (graph_.bond_count() == 0) throw std::invalid_argument("metric graph needs at least one bond");
        for (double L : lengths_)
            if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("bond lengths must be positive");
    }

    const Graph& graph() const { return graph_; }
    const std::vector<double>& lengths() const { return lengths_; }
    double length(std::size_t bond) const { return lengths_[bond]; }
    const std::vector<Condition>& conditions() const { return conditions_; }
    bool dirichlet(Vertex v) const { return conditions_[v] == Condition::dirichlet; }
    std::size_t vertex_count() const { return graph_.vertex_count(); }
    std::size_t bond_count() const { return graph_.bond_count(); }

    double total_length() const {
        double s = 0.0;
        for (double L : lengths_) s += L;
        return s;
    }
    double max_length() const { return *std::max_element(lengths_.begin(), lengths_.end()); }

    // Number of k = 0 modes: components without a Dirichlet vertex carry a constant.
    std::size_t zero_modes() const {
        const ComponentLabeling c = connected_components(graph_);
        std::vector<bool> pinned(c.component_count, false);
        for (Vertex v = 0; v < vertex_count(); ++v)
            if (dirichlet(v)) pinned[c.labels[v]] = true;
        return static_cast<std::size_t>(std::count(pinned.begin(), pinned.end(), false));
    }

private:
    Graph graph_;
    std::vector<double> lengths_;
    std::vector<Condition> conditions_;
};

namespace detail {

struct Incidence {
    std::size_t bond;
    int end;  // 0: x = 0 sits at bond.u, 1: x = L sits at bond.v
};

inline std::vector<std::vector<Incidence>> incidences(const MetricGraph& mg) {
    std::vector<std::vector<Incidence>> inc(mg.vertex_count());
    for (std::size_t b = 0; b < mg.bond_count(); ++b) {
        inc[mg.graph().bonds()[b].u].push_back({b, 0});
        inc[mg.graph().bonds()[b].v].push_back({b, 1});
    }
    return inc;
}

inline double distance_to_pi_lattice(double kL) {
    const double t = kL / std::numbers::pi;
    return std::abs(t - std::round(t));
}

}  // namespace detail

// Reduced vertex matrix M(k) over Neumann vertices: diagonal sum of cot(kL_b),
// off-diagonal -1/sin(kL_b).
inline Matrix vertex_matrix(const MetricGraph& mg, double k) {
    std::vector<long> pos(mg.vertex_count(), -1);
    long n = 0;
    for (Vertex v = 0; v < mg.vertex_count(); ++v)
        if (!mg.dirichlet(v)) pos[v] = n++;
    Matrix M = Matrix::Zero(n, n);
    for (std::size_t b = 0; b < mg.bond_count(); ++b) {
        const Bond& e = mg.graph().bonds()[b];
        const double s = std::sin(k * mg.length(b));
        const double c = std::cos(k * mg.length(b));
        if (pos[e.u] >= 0) M(pos[e.u], pos[e.u]) += c / s;
        if (pos[e.v] >= 0) M(pos[e.v], pos[e.v]) += c / s;
        if (pos[e.u] >= 0 && pos[e.v] >= 0) {
            M(pos[e.u], pos[e.v]) -= 1.0 / s;
            M(pos[e.v], pos[e.u]) -= 1.0 / s;
        }
    }
    return M;
}

// 2B x 2B matrix acting on (A_b, B_b) with psi_b(x) = A_b cos kx + B_b sin kx.
// Dirichlet vertex: one value row per incident bond end. Neumann vertex:
// continuity differences plus the outgoing derivative sum divided by k.
inline Matrix bond_matrix(const MetricGraph& mg, double k) {
    const auto B = static_cast<Eigen::Index>(mg.bond_count());
    Matrix A = Matrix::Zero(2 * B, 2 * B);
    auto value_row = [&](const detail::Incidence& in) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * B);
        const auto b = static_cast<Eigen::Index>(in.bond);
        if (in.end == 0) {
            r(2 * b) = 1.0;
        } else {
            r(2 * b) = std::cos(k * mg.length(in.bond));
            r(2 * b + 1) = std::sin(k * mg.length(in.bond));
        }
        return r;
    };
    auto derivative_row = [&](const detail::Incidence& in) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * B);
        const auto b = static_cast<Eigen::Index>(in.bond);
        if (in.end == 0) {
            r(2 * b + 1) = 1.0;
        } else {
            r(2 * b) = std::sin(k * mg.length(in.bond));
            r(2 * b + 1) = -std::cos(k * mg.length(in.bond));
        }
        return r;
    };
    Eigen::Index row = 0;
    const auto inc = detail::incidences(mg);
    for (Vertex v = 0; v < mg.vertex_count(); ++v) {
        const auto& e = inc[v];
        if (e.empty()) continue;
        if (mg.dirichlet(v)) {
            for (const auto& in : e) A.row(row++) = value_row(in);
        } else {
            for (std::size_t t = 1; t < e.size(); ++t) A.row(row++) = value_row(e[0]) - value_row(e[t]);
            Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(2 * B);
            for (const auto& in : e) d += derivative_row(in);
            A.row(row++) = d;
        }
    }
    return A;
}

// det M(k) * prod_b sin(kL_b).
inline double vertex_secular(const MetricGraph& mg, double k) {
    const Matrix M = vertex_matrix(mg, k);
    double pref = 1.0;
    for (double L : mg.lengths()) pref *= std::sin(k * L);
    return (M.rows() ? M.partialPivLu().determinant() : 1.0) * pref;
}

inline double bond_secular(const MetricGraph& mg, double k) {
    return bond_matrix(mg, k).partialPivLu().determinant();
}

// Regularized secular function. Near the pole lattice kL_b in pi*Z the vertex
// determinant is replaced by the bond-basis determinant times a calibration
// constant fixed at a regular wave number.
class SecularFunction {
public:
    explicit SecularFunction(const MetricGraph& mg, double pole_guard = 1e-4) : mg_(&mg), guard_(pole_guard) {
        const double Lmin = *std::min_element(mg.lengths().begin(), mg.lengths().end());
        for (int j = 0; j < 10000; ++j) {
            const double k = (0.7313 + 0.0917 * j) / Lmin;
            bool regular = true;
            for (double L : mg.lengths())
                if (std::abs(std::sin(k * L)) < 0.2) regular = false;
            if (!regular) continue;
            const double fb = bond_secular(mg, k);
            if (std::abs(fb) < 1e-8) continue;
            calibration_ = vertex_secular(mg, k) / fb;
            return;
        }
        throw std::runtime_error("secular function: no regular calibration point found");
    }

    double operator()(double k) const {
        for (double L : mg_->lengths())
            if (std::abs(std::sin(k * L)) < guard_) return calibration_ * bond_secular(*mg_, k);
        return vertex_secular(*mg_, k);
    }

    double calibration() const { return calibration_; }

private:
    const MetricGraph* mg_;
    double guard_;
    double calibration_ = 1.0;
};

inline double secular_function(const MetricGraph& mg, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("secular function needs k > 0");
    return SecularFunction(mg)(k);
}

inline Eigen::VectorXd bond_singular_values(const MetricGraph& mg, double k) {
    return Eigen::JacobiSVD<Matrix>(bond_matrix(mg, k)).singularValues();
}

struct SecularRoot {
    double k = 0.0;
    std::size_t multiplicity = 1;
    bool sign_change = true;
};

struct SecularScan {
    double k_max = 0.0;
    double step = 0.0;
    std::size_t zero_modes = 0;
    std::vector<SecularRoot> roots;
    std::vector<double> unresolved;  // suspected clusters left after refinement
    std::size_t refinements = 0;
    double weyl_defect = 0.0;
    double weyl_bound = 0.0;
    bool complete = false;

    // Positive wave numbers repeated by multiplicity.
    std::vector<double> expanded() const {
        std::vector<double> out;
        for (const auto& r : roots) out.insert(out.end(), r.multiplicity, r.k);
        return out;
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (const auto& r : roots) c += r.multiplicity;
        return c;
    }
};

struct ScanOptions {
    double multiplicity_tolerance = 1e-6;  // singular values below this times the largest
    double bisection_tolerance = 1e-12;
    int max_refinement = 6;
};

namespace detail {

inline std::size_t small_singular_count(const Eigen::VectorXd& s, double rel) {
    if (s.size() == 0) return 0;
    const double cut = rel * std::max(1.0, s(0));
    std::size_t c = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) < cut) ++c;
    return c;
}

}  // namespace detail

// Number of eigenvalues k_n < k, k = 0 modes included:
// sum_b floor(k L_b / pi) + number of negative eigenvalues of M(k).
// Valid off the pole lattice k L_b in pi*Z.
inline std::size_t counting_function(const MetricGraph& mg, double k) {
    std::size_t n = 0;
    for (double L : mg.lengths()) n += static_cast<std::size_t>(std::floor(k * L / std::numbers::pi));
    const Matrix M = vertex_matrix(mg, k);
    if (M.rows() == 0) return n;
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < 0.0) ++n;
    return n;
}

inline double default_scan_step(const MetricGraph& mg) { return std::numbers::pi / (8.0 * mg.max_length()); }

namespace detail {

// Nudges k off the pole lattice so the counting function is defined.
inline double off_lattice(const MetricGraph& mg, double k) {
    for (int guard = 0; guard < 64; ++guard) {
        bool ok = true;
        for (double L : mg.lengths())
            if (std::abs(std::sin(k * L)) < 1e-13) ok = false;
        if (ok) return k;
        k = std::nextafter(k, std::numeric_limits<double>::infinity());
    }
    return k;
}

inline double golden_minimize(auto&& f, double a, double b, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Sum of the m smallest singular values of the bond matrix; V-shaped around a
// root of multiplicity m and free of poles.
inline double null_defect(const MetricGraph& mg, double k, std::size_t m) {
    const Eigen::VectorXd s = bond_singular_values(mg, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < m && i < static_cast<std::size_t>(s.size()); ++i) acc += s(s.size() - 1 - i);
    return acc;
}

// Golden-section search on the null defect around a bisected root.
inline double polish_root(const MetricGraph& mg, double k, std::size_t m, double tol) {
    const double scale = std::max(1.0, k);
    if (null_defect(mg, k, m) < 1e-12 * m) return k;
    for (double w = 1e-9 * scale; w <= 1e-3 * scale; w *= 10.0) {
        const double kk = golden_minimize([&](double x) { return null_defect(mg, x, m); }, k - w, k + w, tol);
        if (std::abs(kk - k) < 0.9 * w && null_defect(mg, kk, m) < 1e-9 * m) return kk;
    }
    return k;
}

}  // namespace detail

// All eigenvalues in (0, k_max]. Brackets come from jumps of the counting
// function on a grid of step pi/(8 max L_b); each bracket is bisected on the
// count until the jump sits in an interval of width bisection_tolerance. The
// jump size is the multiplicity, which is then certified against the null
// space of the bond matrix.
inline SecularScan eigenvalues(const MetricGraph& mg, double k_max, const ScanOptions& opt = {}) {
    if (!(k_max > 0.0)) throw std::invalid_argument("eigenvalue scan needs k_max > 0");
    SecularScan scan;
    scan.k_max = k_max;
    scan.zero_modes = mg.zero_modes();
    const double slope = mg.total_length() / std::numbers::pi;
    scan.weyl_bound = static_cast<double>(mg.vertex_count() + cycle_rank(mg.graph()) + 1);

    for (int level = 0; level <= opt.max_refinement; ++level) {
        const double h = default_scan_step(mg) / std::ldexp(1.0, level);
        scan.step = h;
        scan.roots.clear();
        scan.unresolved.clear();
        scan.refinements = static_cast<std::size_t>(level);

        auto N = [&](double k) { return counting_function(mg, detail::off_lattice(mg, k)); };
        std::vector<std::pair<double, double>> brackets;
        std::vector<std::pair<std::size_t, std::size_t>> counts;
        const double k0 = h / 64.0;
        const std::size_t n0 = N(k0);
        if (n0 != scan.zero_modes) scan.unresolved.push_back(k0);
        double lo = k0;
        std::size_t nlo = n0;
        // the last grid point sits just above k_max to keep a root at k_max
        const double top = k_max * (1.0 + 1e-14) + 1e-14;
        while (lo < top) {
            const double hi = std::min(lo + h, top);
            const std::size_t nhi = N(hi);
            if (nhi < nlo) scan.unresolved.push_back(hi);
            if (nhi > nlo) {
                brackets.emplace_back(lo, hi);
                counts.emplace_back(nlo, nhi);
            }
            lo = hi;
            nlo = nhi;
        }

        struct Piece {
            double lo, hi;
            std::size_t nlo, nhi;
        };
        for (std::size_t i = 0; i < brackets.size(); ++i) {
            std::vector<Piece> stack{{brackets[i].first, brackets[i].second, counts[i].first, counts[i].second}};
            std::vector<SecularRoot> local;
            while (!stack.empty()) {
                Piece p = stack.back();
                stack.pop_back();
                if (p.nhi <= p.nlo) continue;
                const double mid = 0.5 * (p.lo + p.hi);
                if (p.hi - p.lo <= opt.bisection_tolerance || mid <= p.lo || mid >= p.hi) {
                    local.push_back({mid, p.nhi - p.nlo, (p.nhi - p.nlo) % 2 == 1});
                    continue;
                }
                const std::size_t nm = N(mid);
                if (nm < p.nlo || nm > p.nhi) {
                    scan.unresolved.push_back(mid);
                    continue;
                }
                stack.push_back({mid, p.hi, nm, p.nhi});
                stack.push_back({p.lo, mid, p.nlo, nm});
            }
            std::sort(local.begin(), local.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
            for (auto r : local) {
                r.k = detail::polish_root(mg, r.k, r.multiplicity, opt.bisection_tolerance);
                if (r.k > k_max) continue;
                const std::size_t nullity =
                    detail::small_singular_count(bond_singular_values(mg, r.k), opt.multiplicity_tolerance);
                if (nullity != r.multiplicity) scan.unresolved.push_back(r.k);
                scan.roots.push_back(r);
            }
        }

        // Weyl audit on both sides of every root and at k_max.
        double count = static_cast<double>(scan.zero_modes);
        double defect = count;
        for (const auto& r : scan.roots) {
            defect = std::max(defect, std::abs(count - r.k * slope));
            count += static_cast<double>(r.multiplicity);
            defect = std::max(defect, std::abs(count - r.k * slope));
        }
        defect = std::max(defect, std::abs(count - k_max * slope));
        scan.weyl_defect = defect;
        scan.complete = scan.unresolved.empty() && scan.weyl_defect <= scan.weyl_bound;
        if (scan.complete) break;
    }
    return scan;
}

// Scans until at least `count` nonzero modes (with multiplicity) are found.
inline SecularScan first_modes(const MetricGraph& mg, std::size_t count, const ScanOptions& opt = {}) {
    double k = (static_cast<double>(count) + mg.vertex_count() + 2.0) * std::numbers::pi / mg.total_length();
    for (int attempt = 0; attempt < 20; ++attempt, k *= 1.25) {
        SecularScan s = eigenvalues(mg, k, opt);
        if (s.count() >= count) return s;
    }
    throw std::runtime_error("first_modes: could not reach the requested mode count");
}

struct MetricEigenfunction {
    double k = 0.0;
    std::vector<double> phi;    // unit norm, first nonzero entry positive; exactly 0 at Dirichlet vertices
    std::vector<double> alpha;  // psi_b(x) = alpha_b cos kx + beta_b sin kx, x from bond.u
    std::vector<double> beta;
    bool resonant = false;      // some k L_b within 1e-9 of pi * Z
    double residual = 0.0;      // |M(k) phi| on Neumann vertices, or the bond residual when resonant
    double bond_residual = 0.0;
    double zero_threshold = 1e-8;

    // Vertices whose value is indistinguishable from zero (excluding Dirichlet vertices).
    bool has_zero_vertex(const MetricGraph& mg) const {
        for (Vertex v = 0; v < phi.size(); ++v)
            if (!mg.dirichlet(v) && std::abs(phi[v]) <= zero_threshold) return true;
        return false;
    }
};

class MultiplicityError : public std::runtime_error {
public:
    MultiplicityError(double k, std::size_t m)
        : std::runtime_error("eigenvalue k=" + std::to_string(k) + " has multiplicity " + std::to_string(m)),
          multiplicity_(m) {}
    std::size_t multiplicity() const { return multiplicity_; }

private:
    std::size_t multiplicity_;
};

inline MetricEigenfunction vertex_values(const MetricGraph& mg, double k, double multiplicity_tolerance = 1e-6) {
    if (!(k > 0.0)) throw std::invalid_argument("vertex_values needs k > 0");
    const Matrix A = bond_matrix(mg, k);
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    const std::size_t m = detail::small_singular_count(s, multiplicity_tolerance);
    if (m == 0) throw std::invalid_argument("k=" + std::to_string(k) + " is not an eigenvalue (bond matrix regular)");
    if (m > 1) throw MultiplicityError(k, m);
    Eigen::VectorXd x = svd.matrixV().col(svd.matrixV().cols() - 1);

    MetricEigenfunction ef;
    ef.k = k;
    const std::size_t V = mg.vertex_count(), B = mg.bond_count();
    const auto inc = detail::incidences(mg);
    ef.phi.assign(V, 0.0);
    for (Vertex v = 0; v < V; ++v) {
        if (mg.dirichlet(v) || inc[v].empty()) continue;
        const auto& in = inc[v][0];
        const auto b = static_cast<Eigen::Index>(in.bond);
        const double L = mg.length(in.bond);
        ef.phi[v] = in.end == 0 ? x(2 * b) : x(2 * b) * std::cos(k * L) + x(2 * b + 1) * std::sin(k * L);
    }
    double norm = 0.0;
    for (double p : ef.phi) norm += p * p;
    norm = std::sqrt(norm);
    double scale = 1.0;
    if (norm > 1e-10) {
        scale = 1.0 / norm;
        for (double p : ef.phi)
            if (std::abs(p) * scale > 1e-10) {
                if (p < 0) scale = -scale;
                break;
            }
    }
    for (double& p : ef.phi) p *= scale;
    x *= scale;
    ef.alpha.resize(B);
    ef.beta.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
        ef.alpha[b] = x(static_cast<Eigen::Index>(2 * b));
        ef.beta[b] = x(static_cast<Eigen::Index>(2 * b + 1));
    }
    for (double L : mg.lengths())
        if (detail::distance_to_pi_lattice(k * L) < 1e-9) ef.resonant = true;
    ef.bond_residual = (A * x).norm();
    bool near_pole = false;
    for (double L : mg.lengths())
        if (std::abs(std::sin(k * L)) < 1e-6) near_pole = true;
    if (near_pole || norm <= 1e-10) {
        ef.residual = ef.bond_residual;
    } else {
        const Matrix M = vertex_matrix(mg, k);
        Eigen::VectorXd p(M.rows());
        Eigen::Index i = 0;
        for (Vertex v = 0; v < V; ++v)
            if (!mg.dirichlet(v)) p(i++) = ef.phi[v];
        ef.residual = M.rows() ? (M * p).norm() / std::max(1.0, M.cwiseAbs().maxCoeff()) : 0.0;
    }
    if (ef.residual > 1e-8) throw std::runtime_error("vertex_values: residual " + std::to_string(ef.residual) +
                                                     " above 1e-8 at k=" + std::to_string(k));
    return ef;
}

namespace detail {

// Interior zeros of alpha cos kx + beta sin kx on (0, L): with
// psi = R sin(kx + theta), count integers m with theta < m pi < kL + theta,
// with both ends shrunk by eps.
inline std::size_t interior_zeros(double alpha, double beta, double k, double L, double eps = 1e-9) {
    const double theta = std::atan2(alpha, beta);
    const double lo = theta + eps, hi = k * L + theta - eps;
    const double n = std::ceil(hi / std::numbers::pi) - 1.0 - std::floor(lo / std::numbers::pi);
    return n > 0 ? static_cast<std::size_t>(n) : 0;
}

inline void require_nonzero_vertices(const MetricGraph& mg, const MetricEigenfunction& ef, const char* op) {
    if (ef.phi.size() != mg.vertex_count()) throw std::invalid_argument(std::string(op) + ": size mismatch");
    if (ef.has_zero_vertex(mg))
        throw std::domain_error(std::string(op) + ": eigenfunction vanishes at a non-Dirichlet vertex");
}

inline int sgn(double x) { return x > 0 ? 1 : -1; }

}  // namespace detail

// Direct count: cut each bond at its zeros and join segments through
// non-Dirichlet vertices.
inline std::size_t metric_count_direct(const MetricGraph& mg, const MetricEigenfunction& ef) {
    detail::require_nonzero_vertices(mg, ef, "metric_count_direct");
    const std::size_t B = mg.bond_count();
    std::vector<std::size_t> first(B), last(B);
    std::size_t segments = 0;
    for (std::size_t b = 0; b < B; ++b) {
        if (std::hypot(ef.alpha[b], ef.beta[b]) < 1e-10)
            throw std::domain_error("metric_count_direct: eigenfunction vanishes on a whole bond");
        const std::size_t z = detail::interior_zeros(ef.alpha[b], ef.beta[b], ef.k, mg.length(b));
        first[b] = segments;
        last[b] = segments + z;
        segments += z + 1;
    }
    DisjointSet ds(segments);
    const auto inc = detail::incidences(mg);
    for (Vertex v = 0; v < mg.vertex_count(); ++v) {
        if (mg.dirichlet(v) || inc[v].size() < 2) continue;
        const auto seg = [&](const detail::Incidence& in) { return in.end == 0 ? first[in.bond] : last[in.bond]; };
        for (std::size_t t = 1; t < inc[v].size(); ++t) ds.unite(seg(inc[v][0]), seg(inc[v][t]));
    }
    std::size_t roots = 0;
    for (std::size_t i = 0; i < segments; ++i)
        if (ds.find(i) == i) ++roots;
    return roots;
}

// Zero count of bond b predicted from k L_b and the endpoint signs.
inline std::size_t bond_brace(const MetricGraph& mg, const MetricEigenfunction& ef, std::size_t b) {
    const Bond& e = mg.graph().bonds()[b];
    const double t = ef.k * mg.length(b) / std::numbers::pi;
    const bool du = mg.dirichlet(e.u), dv = mg.dirichlet(e.v);
    if (du || dv) {
        // psi vanishes at a Dirichlet end: zeros at m pi / k strictly inside.
        const double c = std::ceil(t - 1e-9);
        return c > 0 ? static_cast<std::size_t>(c) - 1 : 0;
    }
    const auto fl = static_cast<long long>(std::floor(t));
    const int parity = (fl % 2 == 0) ? 1 : -1;
    const int s = detail::sgn(ef.phi[e.u]) * detail::sgn(ef.phi[e.v]);
    return static_cast<std::size_t>(fl) + static_cast<std::size_t>((1 - parity * s) / 2);
}

// Cycle rank of the bonds without zeros between non-Dirichlet vertices.
inline std::size_t constant_sign_cycle_rank(const MetricGraph& mg, const MetricEigenfunction& ef) {
    std::vector<bool> keep(mg.bond_count());
    for (std::size_t b = 0; b < mg.bond_count(); ++b) {
        const Bond& e = mg.graph().bonds()[b];
        keep[b] = !mg.dirichlet(e.u) && !mg.dirichlet(e.v) && bond_brace(mg, ef, b) == 0;
    }
    return cycle_rank(spanning_subgraph(mg.graph(), keep));
}

// sum_b brace_b - B + V, plus (d_i - 1) for every Dirichlet vertex i, whose
// incident segments stay separate.
inline std::size_t metric_count_formula(const MetricGraph& mg, const MetricEigenfunction& ef) {
    detail::require_nonzero_vertices(mg, ef, "metric_count_formula");
    if (constant_sign_cycle_rank(mg, ef) > 0)
        throw std::domain_error("metric_count_formula: a cycle carries no zero; use metric_count_direct");
    long long mu = 0;
    for (std::size_t b = 0; b < mg.bond_count(); ++b) mu += static_cast<long long>(bond_brace(mg, ef, b));
    mu += static_cast<long long>(mg.vertex_count()) - static_cast<long long>(mg.bond_count());
    for (Vertex v = 0; v < mg.vertex_count(); ++v)
        if (mg.dirichlet(v)) mu += static_cast<long long>(mg.graph().degree(v)) - 1;
    if (mu < 1) throw std::logic_error("metric_count_formula: non-positive count");
    return static_cast<std::size_t>(mu);
}

// Strong discrete count of the vertex values on the underlying graph.
inline std::size_t discrete_count_of_mode(const MetricGraph& mg, const MetricEigenfunction& ef) {
    ValueVector f;
    f.values = ef.phi;
    f.zero_threshold = ef.zero_threshold;
    return count_strong(mg.graph(), f).count;
}

struct MetricMode {
    std::size_t n = 0;  // 1-based, k = 0 modes first
    double k = 0.0;
    std::size_t multiplicity = 1;
    bool resonant = false;
    bool zero_vertex = false;
    bool constant_sign_cycle = false;
    std::optional<std::size_t> mu_formula;
    std::optional<std::size_t> mu_direct;
    std::optional<std::size_t> nu_discrete;
    std::optional<long long> conjecture;
    std::string error;

    // Simple, zero-free and counted by both methods.
    bool validated() const { return multiplicity == 1 && !zero_vertex && mu_direct.has_value(); }
    std::optional<std::size_t> mu() const { return mu_direct; }
    std::string flags() const {
        std::string f;
        auto add = [&](const char* s) {
            if (!f.empty()) f += ';';
            f += s;
        };
        if (multiplicity > 1) add("multiple");
        if (resonant) add("resonant");
        if (zero_vertex) add("zero_vertex");
        if (constant_sign_cycle) add("constant_sign_cycle");
        if (!error.empty()) add("error");
        return f;
    }
};

// Mode table for the first `count` modes of a scan (k = 0 modes included).
inline std::vector<MetricMode> analyze_modes(const MetricGraph& mg, const SecularScan& scan, std::size_t count) {
    std::vector<MetricMode> out;
    const std::size_t z = scan.zero_modes;
    for (std::size_t i = 0; i < z && out.size() < count; ++i) {
        MetricMode m;
        m.n = i + 1;
        m.multiplicity = z;
        if (z == 1) {
            // constant function on a connected Neumann graph
            m.mu_formula = m.mu_direct = m.nu_discrete = 1;
        }
        out.push_back(m);
    }
    std::size_t n = z + 1;
    for (const auto& r : scan.roots) {
        for (std::size_t j = 0; j < r.multiplicity && out.size() < count; ++j) {
            MetricMode m;
            m.n = n + j;
            m.k = r.k;
            m.multiplicity = r.multiplicity;
            if (r.multiplicity == 1) {
                try {
                    const MetricEigenfunction ef = vertex_values(mg, r.k);
                    m.resonant = ef.resonant;
                    m.zero_vertex = ef.has_zero_vertex(mg);
                    m.nu_discrete = discrete_count_of_mode(mg, ef);
                    if (!m.zero_vertex) {
                        m.mu_direct = metric_count_direct(mg, ef);
                        if (constant_sign_cycle_rank(mg, ef) > 0) m.constant_sign_cycle = true;
                        else m.mu_formula = metric_count_formula(mg, ef);
                    }
                } catch (const std::exception& e) {
                    m.error = e.what();
                }
            }
            out.push_back(m);
        }
        n += r.multiplicity;
        if (out.size() >= count) break;
    }
    return out;
}

// Pair with bond lengths fixed by (a, b, c). Vertex layout:
//
//   I (tree):   N--b--u1--c--N        II:  N--a--u1--b--x--b--u2--a--D
//                     |                         |              |
//                    2a                         +--c--y--c-----+
//                     |
//               D--b--u2--c--D
//
// x and y are Neumann vertices of degree two placed at the loop midpoints.
inline std::pair<MetricGraph, MetricGraph> isospectral_pair(double a, double b, double c) {
    if (!(a > 0 && b > 0 && c > 0)) throw std::invalid_argument("isospectral_pair needs a, b, c > 0");
    using C = Condition;
    // I: u1=0, u2=1, leaves 2 (b, N), 3 (c, N), 4 (b, D), 5 (c, D)
    Graph gI(6, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}});
    std::vector<double> lI(5);
    lI[gI.bond_index(0, 1)] = 2 * a;
    lI[gI.bond_index(0, 2)] = b;
    lI[gI.bond_index(0, 3)] = c;
    lI[gI.bond_index(1, 4)] = b;
    lI[gI.bond_index(1, 5)] = c;
    MetricGraph I(gI, lI, {C::neumann, C::neumann, C::neumann, C::neumann, C::dirichlet, C::dirichlet});
    // II: u1=0, u2=1, x=2, y=3, t1=4 (N), t2=5 (D)
    Graph gII(6, {{0, 2}, {1, 2}, {1, 3}, {0, 3}, {0, 4}, {1, 5}});
    std::vector<double> lII(6);
    lII[gII.bond_index(0, 2)] = b;
    lII[gII.bond_index(1, 2)] = b;
    lII[gII.bond_index(1, 3)] = c;
    lII[gII.bond_index(0, 3)] = c;
    lII[gII.bond_index(0, 4)] = a;
    lII[gII.bond_index(1, 5)] = a;
    MetricGraph II(gII, lII, {C::neumann, C::neumann, C::neumann, C::neumann, C::neumann, C::dirichlet});
    return {I, II};
}

// Tree pair built from three involutions of the Fano plane acting on its
// points and on its lines. Each of the 7 elements is a star centre with one
// arm per involution; swapped elements share a bond of twice the arm length,
// fixed elements keep a pendant arm ending at a vertex with condition `leaf`.
inline std::pair<MetricGraph, MetricGraph> seven_three_pair(std::array<double, 3> arms,
                                                            Condition leaf = Condition::dirichlet) {
    static constexpr std::array<std::array<int, 7>, 3> points{
        {{3, 1, 5, 0, 4, 2, 6}, {0, 3, 4, 1, 2, 5, 6}, {0, 2, 1, 3, 4, 6, 5}}};
    static constexpr std::array<std::array<int, 7>, 3> lines{
        {{3, 1, 5, 0, 4, 2, 6}, {0, 3, 4, 1, 2, 5, 6}, {2, 1, 0, 3, 6, 5, 4}}};
    auto build = [&](const std::array<std::array<int, 7>, 3>& perms) {
        std::vector<std::pair<Vertex, Vertex>> pairs;
        std::vector<double> len;
        std::size_t n = 7;
        for (std::size_t g = 0; g < 3; ++g)
            for (std::size_t i = 0; i < 7; ++i) {
                const auto j = static_cast<std::size_t>(perms[g][i]);
                if (j > i) {
                    pairs.emplace_back(i, j);
                    len.push_back(2 * arms[g]);
                } else if (j == i) {
                    pairs.emplace_back(i, n++);
                    len.push_back(arms[g]);
                }
            }
        Graph gr(n, pairs);
        std::vector<double> lengths(gr.bond_count());
        for (std::size_t t = 0; t < pairs.size(); ++t) lengths[gr.bond_index(pairs[t].first, pairs[t].second)] = len[t];
        std::vector<Condition> bc(n, Condition::neumann);
        for (std::size_t v = 7; v < n; ++v) bc[v] = leaf;
        return MetricGraph(gr, lengths, bc);
    };
    return {build(points), build(lines)};
}

// n - 1/2 - (1/2)(-1)^floor(x n) with x = (b + c)/(a + b + c).
inline long long conjectured_count_II(long long n, double a, double b, double c) {
    const double x = (b + c) / (a + b + c);
    const auto fl = static_cast<long long>(std::floor(x * static_cast<double>(n)));
    return (fl % 2 == 0) ? n - 1 : n;
}

struct ConjectureComparison {
    std::array<int, 3> offsets{-1, 0, 1};
    std::array<std::size_t, 3> agreements{};
    std::size_t compared = 0;
    int best_offset = 0;
    double raw_rate = 0.0;   // offset 0
    double best_rate = 0.0;
};

// Offset d compares mu_n against n - 1/2 - (1/2)(-1)^floor(x (n + d)).
inline ConjectureComparison compare_conjecture(const std::vector<MetricMode>& modes, double a, double b, double c,
                                               std::size_t limit) {
    ConjectureComparison cc;
    for (const auto& m : modes) {
        if (m.n > limit || !m.validated()) continue;
        ++cc.compared;
        for (std::size_t i = 0; i < 3; ++i) {
            const long long shifted = static_cast<long long>(m.n) + cc.offsets[i];
            const long long pred = conjectured_count_II(shifted, a, b, c) - cc.offsets[i];
            if (pred == static_cast<long long>(*m.mu_direct)) ++cc.agreements[i];
        }
    }
    if (cc.compared == 0) return cc;
    std::size_t best = 1;
    for (std::size_t i = 0; i < 3; ++i)
        if (cc.agreements[i] > cc.agreements[best]) best = i;
    cc.best_offset = cc.offsets[best];
    cc.raw_rate = static_cast<double>(cc.agreements[1]) / static_cast<double>(cc.compared);
    cc.best_rate = static_cast<double>(cc.agreements[best]) / static_cast<double>(cc.compared);
    return cc;
}

// Largest relative gap between the first `count` roots (with multiplicity).
inline double spectral_mismatch(const SecularScan& s1, const SecularScan& s2, std::size_t count) {
    const auto a = s1.expanded(), b = s2.expanded();
    if (a.size() < count || b.size() < count || s1.zero_modes != s2.zero_modes)
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, a[i]));
    return worst;
}

// Metric graph text format: graph-core records plus "L i j length" and "BC i N|D".
inline MetricGraph parse_metric_text(const std::string& text) {
    std::istringstream is(text);
    std::string raw, graph_text;
    std::vector<std::tuple<std::size_t, std::string, std::string, double>> length_lines;
    std::vector<std::tuple<std::size_t, std::string, char>> bc_lines;
    std::size_t line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::istringstream ls(raw);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') {
            graph_text += '\n';
            continue;
        }
        if (tag == "L") {
            std::string a, b, lenstr;
            if (!(ls >> a >> b >> lenstr)) throw ParseError(line, "L expects two vertex labels and a length");
            double len = 0.0;
            std::size_t pos = 0;
            try {
                len = std::stod(lenstr, &pos);
            } catch (const std::exception&) {
                throw ParseError(line, "bad length '" + lenstr + "'");
            }
            if (pos != lenstr.size() || !(len > 0.0) || !std::isfinite(len))
                throw ParseError(line, "length must be a positive number, got '" + lenstr + "'");
            length_lines.emplace_back(line, a, b, len);
            graph_text += '\n';
        } else if (tag == "BC") {
            std::string a, kind;
            if (!(ls >> a >> kind) || (kind != "N" && kind != "D"))
                throw ParseError(line, "BC expects a vertex label and N or D");
            bc_lines.emplace_back(line, a, kind[0]);
            graph_text += '\n';
        } else {
            graph_text += raw + '\n';
            continue;
        }
        std::string extra;
        if (ls >> extra && extra[0] != '#') throw ParseError(line, "unexpected token '" + extra + "'");
    }
    const Graph g = parse_text(graph_text);
    std::vector<double> lengths(g.bond_count(), 0.0);
    for (const auto& [ln, a, b, len] : length_lines) {
        const Vertex u = detail::parse_vertex_label(a, g.vertex_count(), ln);
        const Vertex v = detail::parse_vertex_label(b, g.vertex_count(), ln);
        const std::size_t idx = g.bond_index(u, v);
        if (idx == npos) throw ParseError(ln, "L names a pair that is not a bond");
        if (lengths[idx] != 0.0) throw ParseError(ln, "duplicate length for bond");
        lengths[idx] = len;
    }
    for (std::size_t b = 0; b < g.bond_count(); ++b)
        if (lengths[b] == 0.0)
            throw ParseError(line, "bond " + std::to_string(g.bonds()[b].u + 1) + "-" +
                                       std::to_string(g.bonds()[b].v + 1) + " has no length");
    std::vector<Condition> bc(g.vertex_count(), Condition::neumann);
    for (const auto& [ln, a, kind] : bc_lines)
        bc[detail::parse_vertex_label(a, g.vertex_count(), ln)] = kind == 'D' ? Condition::dirichlet : Condition::neumann;
    return MetricGraph(g, lengths, bc);
}

inline std::string to_metric_text(const MetricGraph& mg) {
    std::ostringstream os;
    os << std::setprecision(17) << to_text(mg.graph());
    for (std::size_t b = 0; b < mg.bond_count(); ++b)
        os << "L " << mg.graph().bonds()[b].u + 1 << ' ' << mg.graph().bonds()[b].v + 1 << ' ' << mg.length(b) << '\n';
    for (Vertex v = 0; v < mg.vertex_count(); ++v)
        if (mg.dirichlet(v)) os << "BC " << v + 1 << " D\n";
    return os.str();
}

inline std::string mode_report_csv(const std::vector<MetricMode>& modes) {
    std::ostringstream os;
    os << std::setprecision(15);
    os << "n,k_n,mu_formula,mu_direct,nu_discrete,conjecture_value,flags\n";
    auto opt = [&](const auto& o) {
        if (o) os << *o;
    };
    for (const auto& m : modes) {
        os << m.n << ',' << m.k << ',';
        opt(m.mu_formula);
        os << ',';
        opt(m.mu_direct);
        os << ',';
        opt(m.nu_discrete);
        os << ',';
        opt(m.conjecture);
        os << ',' << m.flags() << '\n';
    }
    return os.str();
}

}  // namespace nodal
