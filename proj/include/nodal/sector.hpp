#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodal/counting.hpp"
#include "nodal/graph.hpp"
#include "nodal/graph_io.hpp"

namespace nodal {

inline constexpr std::size_t default_sector_cap = 22;

// Strong nodal count for every sign indicator. Bit i of the index set <=> +1 at vertex i.
struct EquiNodalTable {
    std::uint64_t graph_id = 0;
    std::size_t vertex_count = 0;
    std::vector<std::uint8_t> counts;      // length 2^V
    std::vector<std::uint64_t> set_sizes;  // set_sizes[n] = |gamma_n|

    std::uint64_t gamma(std::size_t n) const { return n < set_sizes.size() ? set_sizes[n] : 0; }
    std::size_t max_count() const {
        for (std::size_t n = set_sizes.size(); n-- > 0;)
            if (set_sizes[n]) return n;
        return 0;
    }
};

namespace detail {

inline void tally(EquiNodalTable& t) {
    t.set_sizes.assign(t.vertex_count + 1, 0);
    for (std::uint8_t c : t.counts) ++t.set_sizes.at(c);
}

}  // namespace detail

inline EquiNodalTable build_equinodal(const Graph& g, std::size_t cap = default_sector_cap) {
    const std::size_t n = g.vertex_count();
    if (n > cap || n > 30)
        throw std::invalid_argument("equi-nodal table: V=" + std::to_string(n) + " exceeds the cap of " +
                                    std::to_string(cap));
    EquiNodalTable t;
    t.graph_id = graph_hash(g);
    t.vertex_count = n;
    const std::uint64_t total = std::uint64_t{1} << n;
    t.counts.resize(total);
    std::vector<std::size_t> parent(n);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        std::size_t domains = n;
        for (const Bond& b : g.bonds()) {
            if (((mask >> b.u) ^ (mask >> b.v)) & 1U) continue;
            const std::size_t ru = find(b.u), rv = find(b.v);
            if (ru != rv) {
                parent[ru] = rv;
                --domains;
            }
        }
        t.counts[mask] = static_cast<std::uint8_t>(domains);
    }
    detail::tally(t);
    return t;
}

inline std::size_t count_via_sector(const EquiNodalTable& t, const SignVector& f) {
    if (f.size() != t.vertex_count)
        throw std::invalid_argument("count_via_sector: vector length does not match the table");
    detail::require_zero_free(f, "count_via_sector");
    return t.counts[f.mask()];
}

inline std::size_t count_via_sector(const EquiNodalTable& t, const Graph& g, const SignVector& f) {
    if (g.vertex_count() != t.vertex_count || graph_hash(g) != t.graph_id)
        throw std::invalid_argument("count_via_sector: table was built for a different graph");
    return count_via_sector(t, f);
}

// P(n) = |gamma_n| / 2^V, indexed by n.
inline std::vector<double> uniform_distribution(const EquiNodalTable& t) {
    const double total = std::ldexp(1.0, static_cast<int>(t.vertex_count));
    std::vector<double> p(t.set_sizes.size());
    for (std::size_t n = 0; n < p.size(); ++n) p[n] = static_cast<double>(t.set_sizes[n]) / total;
    return p;
}

// Normal mass on [n - 1/2, n + 1/2] for n = 0..max_n, mu = (V+1)/2, sigma^2 = (V-1)/4.
inline std::vector<double> tree_gaussian(std::size_t V, std::size_t max_n) {
    const double mu = (static_cast<double>(V) + 1.0) / 2.0;
    const double sigma = std::sqrt((static_cast<double>(V) - 1.0) / 4.0);
    std::vector<double> g(max_n + 1, 0.0);
    if (sigma == 0.0) {
        if (V <= max_n) g[V] = 1.0;
        return g;
    }
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0))); };
    for (std::size_t n = 0; n <= max_n; ++n) g[n] = cdf(n + 0.5) - cdf(n - 0.5);
    return g;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    const std::size_t m = std::max(p.size(), q.size());
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = i < p.size() ? p[i] : 0.0;
        const double b = i < q.size() ? q[i] : 0.0;
        s += std::abs(a - b);
    }
    return 0.5 * s;
}

inline constexpr char equinodal_magic[8] = {'N', 'O', 'D', 'A', 'L', 'E', 'Q', '1'};

// Little-endian layout: magic[8], graph hash u64, V u32, then 2^V count bytes.
inline void write_equinodal(const EquiNodalTable& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os.write(equinodal_magic, sizeof equinodal_magic);
    std::uint8_t buf[12];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(t.graph_id >> (8 * i));
    const auto v = static_cast<std::uint32_t>(t.vertex_count);
    for (int i = 0; i < 4; ++i) buf[8 + i] = static_cast<std::uint8_t>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), sizeof buf);
    os.write(reinterpret_cast<const char*>(t.counts.data()), static_cast<std::streamsize>(t.counts.size()));
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

inline EquiNodalTable read_equinodal(const std::string& path, std::size_t cap = default_sector_cap) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    char magic[8];
    std::uint8_t buf[12];
    if (!is.read(magic, 8) || std::memcmp(magic, equinodal_magic, 8) != 0)
        throw std::runtime_error("'" + path + "' is not an equi-nodal table");
    if (!is.read(reinterpret_cast<char*>(buf), sizeof buf)) throw std::runtime_error("truncated table header");
    EquiNodalTable t;
    for (int i = 0; i < 8; ++i) t.graph_id |= std::uint64_t{buf[i]} << (8 * i);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{buf[8 + i]} << (8 * i);
    if (v > cap) throw std::runtime_error("table V=" + std::to_string(v) + " exceeds the cap");
    t.vertex_count = v;
    t.counts.resize(std::size_t{1} << v);
    if (!is.read(reinterpret_cast<char*>(t.counts.data()), static_cast<std::streamsize>(t.counts.size())))
        throw std::runtime_error("truncated count array");
    for (std::uint8_t c : t.counts)
        if (c > v || (v > 0 && c == 0)) throw std::runtime_error("corrupt count in table");
    detail::tally(t);
    return t;
}

inline nlohmann::json equinodal_summary_json(const EquiNodalTable& t) {
    nlohmann::json sets = nlohmann::json::array();
    const auto p = uniform_distribution(t);
    for (std::size_t n = 1; n < t.set_sizes.size(); ++n)
        if (t.set_sizes[n]) sets.push_back({{"n", n}, {"gamma", t.set_sizes[n]}, {"p", p[n]}});
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(t.graph_id));
    return {{"graph_hash", hex}, {"vertex_count", t.vertex_count}, {"max_count", t.max_count()}, {"sets", sets}};
}

}  // namespace nodal
