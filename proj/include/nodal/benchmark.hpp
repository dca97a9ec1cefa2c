#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nodal/counting.hpp"
#include "nodal/generators.hpp"
#include "nodal/graph.hpp"

namespace nodal {

struct TimingRow {
    std::string path;      // "dense" or "sparse"
    double density = 0.0;  // r / V for dense runs
    std::size_t vertices = 0;
    std::size_t bonds = 0;
    double seconds = 0.0;  // median over repetitions
    std::size_t count = 0;
    bool count_ok = true;  // agrees with the labeling count
};

namespace detail {

inline SignVector random_signs(std::size_t n, std::mt19937_64& rng) {
    std::vector<int> s(n);
    for (int& x : s) x = (rng() & 1U) ? 1 : -1;
    return SignVector(std::move(s));
}

template <class F>
double median_seconds(F&& f, std::size_t reps) {
    std::vector<double> t;
    for (std::size_t i = 0; i < reps; ++i) {
        const auto a = std::chrono::steady_clock::now();
        f();
        const auto b = std::chrono::steady_clock::now();
        t.push_back(std::chrono::duration<double>(b - a).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

}  // namespace detail

// Dense break-up count on connected random graphs with cycle rank r = density * V.
inline std::vector<TimingRow> dense_breakup_benchmark(const std::vector<std::size_t>& sizes, double density,
                                                      std::uint64_t seed, std::size_t reps = 5) {
    std::vector<TimingRow> rows;
    for (std::size_t V : sizes) {
        std::mt19937_64 rng(derive_seed(seed, V));
        const auto extra = static_cast<std::size_t>(std::llround(density * static_cast<double>(V)));
        const Graph g = random_connected_graph(V, extra, rng);
        const SignVector s = detail::random_signs(V, rng);
        TimingRow row{"dense", density, V, g.bond_count()};
        row.seconds = detail::median_seconds([&] { row.count = count_via_breakup(g, s); }, reps);
        row.count_ok = row.count == count_strong(g, s).count;
        rows.push_back(row);
    }
    return rows;
}

// Sparse inertia count on side x side periodic grids (V rounded to a square).
inline std::vector<TimingRow> sparse_grid_benchmark(const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                                    std::size_t reps = 5) {
    std::vector<TimingRow> rows;
    for (std::size_t V : sizes) {
        const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(V))));
        const Graph g = periodic_grid(side);
        std::mt19937_64 rng(derive_seed(seed, V));
        const SignVector s = detail::random_signs(g.vertex_count(), rng);
        TimingRow row{"sparse", 0.0, g.vertex_count(), g.bond_count()};
        row.seconds = detail::median_seconds([&] { row.count = count_via_breakup_sparse(g, s); }, reps);
        row.count_ok = row.count == count_strong(g, s).count;
        rows.push_back(row);
    }
    return rows;
}

// Least-squares slope of log(seconds) against log(V).
inline double loglog_slope(const std::vector<TimingRow>& rows) {
    if (rows.size() < 2) return std::nan("");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double x = std::log(static_cast<double>(r.vertices));
        const double y = std::log(std::max(r.seconds, 1e-9));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const auto n = static_cast<double>(rows.size());
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return std::nan("");
    return (n * sxy - sx * sy) / den;
}

inline std::string timing_csv(const std::vector<TimingRow>& rows) {
    std::ostringstream os;
    os << std::setprecision(8) << "path,density,V,B,log_V,seconds,log_seconds,count,count_ok\n";
    for (const auto& r : rows)
        os << r.path << ',' << r.density << ',' << r.vertices << ',' << r.bonds << ','
           << std::log(static_cast<double>(r.vertices)) << ',' << r.seconds << ','
           << std::log(std::max(r.seconds, 1e-9)) << ',' << r.count << ',' << (r.count_ok ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace nodal
