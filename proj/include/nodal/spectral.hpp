#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "nodal/graph.hpp"

namespace nodal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

inline constexpr double default_multiplicity_tolerance = 1e-9;

// L = D - C
inline Matrix laplacian(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    Matrix L = Matrix::Zero(n, n);
    for (const Bond& b : g.bonds()) {
        const auto u = static_cast<Eigen::Index>(b.u);
        const auto v = static_cast<Eigen::Index>(b.v);
        L(u, u) += 1.0;
        L(v, v) += 1.0;
        L(u, v) -= 1.0;
        L(v, u) -= 1.0;
    }
    return L;
}

inline SparseMatrix sparse_laplacian(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(4 * g.bond_count() + g.vertex_count());
    // Isolated vertices still need an explicit diagonal entry for the factorization.
    for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 0.0);
    for (const Bond& b : g.bonds()) {
        const auto u = static_cast<Eigen::Index>(b.u);
        const auto v = static_cast<Eigen::Index>(b.v);
        triplets.emplace_back(u, u, 1.0);
        triplets.emplace_back(v, v, 1.0);
        triplets.emplace_back(u, v, -1.0);
        triplets.emplace_back(v, u, -1.0);
    }
    SparseMatrix L(n, n);
    L.setFromTriplets(triplets.begin(), triplets.end());
    return L;
}

// Symmetric matrix with L'_ij = -w_b < 0 on bonds and a free diagonal.
inline Matrix generalized_laplacian(const Graph& g, const std::vector<double>& bond_weights,
                                    const std::vector<double>& diagonal) {
    if (bond_weights.size() != g.bond_count()) throw std::invalid_argument("one weight per bond required");
    if (diagonal.size() != g.vertex_count()) throw std::invalid_argument("one diagonal entry per vertex required");
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    Matrix L = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < g.bond_count(); ++i) {
        if (!(bond_weights[i] > 0.0)) throw std::invalid_argument("generalized Laplacian bond weights must be positive");
        const auto u = static_cast<Eigen::Index>(g.bonds()[i].u);
        const auto v = static_cast<Eigen::Index>(g.bonds()[i].v);
        L(u, v) = L(v, u) = -bond_weights[i];
    }
    for (Eigen::Index i = 0; i < n; ++i) L(i, i) = diagonal[static_cast<std::size_t>(i)];
    return L;
}

// Checks the sign pattern: negative exactly on bonds, zero elsewhere off the diagonal.
inline bool is_generalized_laplacian_of(const Matrix& L, const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    if (L.rows() != n || L.cols() != n) return false;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            if (L(i, j) != L(j, i)) return false;
            const bool bond = g.adjacent(static_cast<Vertex>(i), static_cast<Vertex>(j));
            if (bond ? !(L(i, j) < 0.0) : L(i, j) != 0.0) return false;
        }
    return true;
}

// Ascending eigenpairs of a symmetric matrix with grouped multiplicities.
struct Spectrum {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;            // column i pairs with eigenvalues[i]
    std::vector<std::size_t> group; // eigenspace id per index, ascending
    double multiplicity_tolerance = default_multiplicity_tolerance;

    std::size_t size() const { return eigenvalues.size(); }

    Vector vector(std::size_t i) const { return eigenvectors.col(static_cast<Eigen::Index>(i)); }

    std::size_t multiplicity(std::size_t i) const {
        return static_cast<std::size_t>(std::count(group.begin(), group.end(), group[i]));
    }

    // 0-based index of the first eigenvalue in the eigenspace of i.
    std::size_t group_start(std::size_t i) const {
        std::size_t s = i;
        while (s > 0 && group[s - 1] == group[i]) --s;
        return s;
    }

    bool simple(std::size_t i) const { return multiplicity(i) == 1; }
};

inline double symmetric_norm(const Matrix& M) {
    return M.cwiseAbs().rowwise().sum().maxCoeff();
}

// Absolute grouping threshold: rel_tol scaled by the spectral radius (at least 1).
inline double absolute_tolerance(const Matrix& M, double rel_tol) {
    return rel_tol * std::max(1.0, M.size() ? symmetric_norm(M) : 0.0);
}

inline Spectrum eigendecompose(const Matrix& M, double rel_tol = default_multiplicity_tolerance) {
    if (M.rows() != M.cols()) throw std::invalid_argument("eigendecompose: matrix is not square");
    const double scale = std::max(1.0, M.size() ? M.cwiseAbs().maxCoeff() : 0.0);
    if (M.size() && (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
        throw std::invalid_argument("eigendecompose: matrix is not symmetric");
    Spectrum s;
    s.multiplicity_tolerance = rel_tol;
    const auto n = M.rows();
    if (n == 0) return s;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver did not converge");
    s.eigenvectors = solver.eigenvectors();
    s.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    // Sign convention: first entry with magnitude above the noise floor is positive.
    for (Eigen::Index c = 0; c < n; ++c) {
        auto col = s.eigenvectors.col(c);
        const double floor = 1e-10 * col.cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < n; ++r) {
            if (std::abs(col(r)) > floor) {
                if (col(r) < 0) col = -col;
                break;
            }
        }
    }
    const double tol = absolute_tolerance(M, rel_tol);
    s.group.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 1; i < static_cast<std::size_t>(n); ++i)
        s.group[i] = s.group[i - 1] + ((s.eigenvalues[i] - s.eigenvalues[i - 1] > tol) ? 1 : 0);
    return s;
}

inline std::vector<double> eigenvalues_only(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(M, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver did not converge");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

// Number of eigenvalues with |lambda| <= rel_tol * max(1, ||M||).
inline std::size_t zero_multiplicity(const Matrix& M, double rel_tol = default_multiplicity_tolerance) {
    if (M.rows() == 0) return 0;
    const double tol = absolute_tolerance(M, rel_tol);
    std::size_t count = 0;
    for (double ev : eigenvalues_only(M))
        if (std::abs(ev) <= tol) ++count;
    return count;
}

// Zero multiplicity of a sparse positive semidefinite matrix by Sylvester
// inertia: the number of negative pivots of LDL^T(M - shift I) equals the
// number of eigenvalues below `shift`. `shift` must sit below the smallest
// nonzero eigenvalue.
inline std::size_t zero_multiplicity_sparse(const SparseMatrix& M, double shift = 1e-11) {
    const auto n = M.rows();
    if (n == 0) return 0;
    SparseMatrix I(n, n);
    I.setIdentity();
    SparseMatrix shifted = M - shift * I;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("sparse LDLT failed");
    const Vector d = ldlt.vectorD();
    std::size_t negative = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) < 0.0) ++negative;
    return negative;
}

// CSV: index,eigenvalue,multiplicity_group,v1..vV (index 1-based).
inline std::string spectrum_csv(const Spectrum& s) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "index,eigenvalue,multiplicity_group";
    for (std::size_t j = 0; j < s.size(); ++j) os << ",v" << j + 1;
    os << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << i + 1 << ',' << s.eigenvalues[i] << ',' << s.group[i] + 1;
        for (std::size_t j = 0; j < s.size(); ++j)
            os << ',' << s.eigenvectors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        os << '\n';
    }
    return os.str();
}

}  // namespace nodal
