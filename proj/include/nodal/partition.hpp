#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "nodal/counting.hpp"
#include "nodal/graph.hpp"

namespace nodal {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t default_spin_cap = 20;
inline constexpr std::size_t default_subset_cap = 20;

// Z(f;x) = sum_k coefficients[k] x^k
struct PartitionPolynomial {
    std::vector<BigInt> coefficients;

    BigInt evaluate(long long x) const {
        BigInt acc = 0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    // k-th derivative at x = 0, i.e. k! c_k
    BigInt derivative_at_zero(std::size_t k) const {
        if (k >= coefficients.size()) return 0;
        BigInt f = 1;
        for (std::size_t i = 2; i <= k; ++i) f *= i;
        return f * coefficients[k];
    }
    std::size_t degree() const {
        for (std::size_t k = coefficients.size(); k-- > 0;)
            if (coefficients[k] != 0) return k;
        return 0;
    }
};

inline BigInt pow2(std::size_t e) { return BigInt(1) << e; }

inline BigInt binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    BigInt r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Exact log2 of a power of two, or -1.
inline long long exact_log2(const BigInt& z) {
    if (z <= 0) return -1;
    const std::size_t msb = boost::multiprecision::msb(z);
    return (z == pow2(msb)) ? static_cast<long long>(msb) : -1;
}

namespace detail {

inline void require_spin_cap(const Graph& g, std::size_t cap) {
    if (g.vertex_count() > cap || g.vertex_count() >= 63)
        throw std::invalid_argument("partition function: V=" + std::to_string(g.vertex_count()) +
                                    " exceeds the spin-sum cap of " + std::to_string(cap) +
                                    "; use the labeling, flip or break-up count instead");
}

// Bit masks of both endpoints, for fast flip tests on spin bit patterns.
struct BondMasks {
    std::vector<std::uint64_t> u, v;
};

inline BondMasks bond_masks(const Graph& g) {
    BondMasks m;
    for (const Bond& b : g.bonds()) {
        m.u.push_back(std::uint64_t{1} << b.u);
        m.v.push_back(std::uint64_t{1} << b.v);
    }
    return m;
}

// Histogram over all 2^V spin configurations of the number of bonds in
// `selected` on which the spins flip.
inline std::vector<std::uint64_t> spin_flip_histogram(const Graph& g, const std::vector<bool>& selected) {
    const std::size_t n = g.vertex_count();
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < g.bond_count(); ++i)
        if (selected[i]) {
            a.push_back(g.bonds()[i].u);
            b.push_back(g.bonds()[i].v);
        }
    std::vector<std::uint64_t> hist(a.size() + 1, 0);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t s = 0; s < total; ++s) {
        std::size_t m = 0;
        for (std::size_t i = 0; i < a.size(); ++i) m += ((s >> a[i]) ^ (s >> b[i])) & 1U;
        ++hist[m];
    }
    return hist;
}

inline std::vector<bool> non_flip_bonds(const Graph& g, const SignVector& f) {
    std::vector<bool> keep(g.bond_count());
    for (std::size_t i = 0; i < g.bond_count(); ++i) {
        const Bond& b = g.bonds()[i];
        keep[i] = f.signs[b.u] == f.signs[b.v];
    }
    return keep;
}

}  // namespace detail

// prod_b [1 - phi_b sigma_b] with phi_b = (1 + f_i f_j)/2 and sigma_b = (1 - s_i s_j)/2.
inline int weight(const Graph& g, const SignVector& f, const SignVector& spins) {
    detail::require_size(g, f);
    detail::require_size(g, spins);
    detail::require_zero_free(f, "weight");
    if (!spins.zero_free()) throw std::invalid_argument("weight: spins must be +-1");
    int w = 1;
    for (const Bond& b : g.bonds()) {
        const int phi = (1 + f.signs[b.u] * f.signs[b.v]) / 2;
        const int sigma = (1 - spins.signs[b.u] * spins.signs[b.v]) / 2;
        w *= 1 - phi * sigma;
    }
    return w;
}

struct PartitionCount {
    BigInt z;
    std::size_t nu = 0;
};

// Z(f) = sum over all spin configurations of the weight; nu = log2 Z.
inline PartitionCount partition_count(const Graph& g, const SignVector& f, std::size_t cap = default_spin_cap) {
    detail::require_size(g, f);
    detail::require_zero_free(f, "partition_count");
    detail::require_spin_cap(g, cap);
    // A configuration has weight one iff no non-flip bond carries a spin flip.
    const auto hist = detail::spin_flip_histogram(g, detail::non_flip_bonds(g, f));
    PartitionCount out{BigInt(hist[0]), 0};
    const long long lg = exact_log2(out.z);
    if (lg < 0) throw std::logic_error("partition sum is not a power of two");
    out.nu = static_cast<std::size_t>(lg);
    return out;
}

// Coefficients of Z(f;x) = sum_s prod_b (1 - phi_b sigma_b x) by exhaustive
// spin summation: each configuration contributes (1 - x)^m with m the number
// of non-flip bonds on which the spins flip.
inline PartitionPolynomial partition_polynomial(const Graph& g, const SignVector& f,
                                                std::size_t cap = default_spin_cap) {
    detail::require_size(g, f);
    detail::require_zero_free(f, "partition_polynomial");
    detail::require_spin_cap(g, cap);
    const auto hist = detail::spin_flip_histogram(g, detail::non_flip_bonds(g, f));
    PartitionPolynomial p;
    p.coefficients.assign(g.bond_count() + 1, 0);
    for (std::size_t m = 0; m < hist.size(); ++m) {
        if (hist[m] == 0) continue;
        for (std::size_t k = 0; k <= m; ++k) {
            BigInt term = binomial(m, k) * hist[m];
            if (k % 2) p.coefficients[k] -= term;
            else p.coefficients[k] += term;
        }
    }
    return p;
}

// Walks every subset of the bonds flagged in `allowed` that contains no odd
// cycle and calls visit(size, components).
template <class Visit>
void for_each_odd_cycle_free_subset(const Graph& g, const std::vector<bool>& allowed, std::size_t cap, Visit&& visit) {
    std::vector<Bond> pool;
    for (std::size_t i = 0; i < g.bond_count(); ++i)
        if (allowed[i]) pool.push_back(g.bonds()[i]);
    if (pool.size() > cap)
        throw std::invalid_argument("combinatorial expansion: " + std::to_string(pool.size()) +
                                    " candidate bonds exceed the subset cap of " + std::to_string(cap));
    const std::size_t n = g.vertex_count();
    const std::uint64_t total = std::uint64_t{1} << pool.size();
    std::vector<std::size_t> parent(n), parity(n);
    auto find = [&](std::size_t x, std::size_t& par) {
        par = 0;
        while (parent[x] != x) {
            par ^= parity[x];
            x = parent[x];
        }
        return x;
    };
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < n; ++i) {
            parent[i] = i;
            parity[i] = 0;
        }
        std::size_t components = n, size = 0;
        bool odd = false;
        for (std::size_t i = 0; i < pool.size() && !odd; ++i) {
            if (!((mask >> i) & 1U)) continue;
            ++size;
            std::size_t pu = 0, pv = 0;
            const std::size_t ru = find(pool[i].u, pu);
            const std::size_t rv = find(pool[i].v, pv);
            if (ru == rv) {
                if (pu == pv) odd = true;  // closes an odd cycle
            } else {
                parent[ru] = rv;
                parity[ru] = pu ^ pv ^ 1U;
                --components;
            }
        }
        if (!odd) visit(size, components);
    }
}

// Z(f;x) from sum over k of (-1)^k sum' 2^(V - k + r(b_1..b_k)) restricted to
// odd-cycle-free choices of non-flip bonds. V - k + r is the component count.
inline PartitionPolynomial combinatorial_polynomial(const Graph& g, const SignVector& f,
                                                    std::size_t cap = default_subset_cap) {
    detail::require_size(g, f);
    detail::require_zero_free(f, "combinatorial_polynomial");
    PartitionPolynomial p;
    p.coefficients.assign(g.bond_count() + 1, 0);
    for_each_odd_cycle_free_subset(g, detail::non_flip_bonds(g, f), cap,
                                   [&](std::size_t k, std::size_t components) {
                                       if (k % 2) p.coefficients[k] -= pow2(components);
                                       else p.coefficients[k] += pow2(components);
                                   });
    return p;
}

// Cycles of length 3 and 4 whose bonds are all non-flips.
struct ShortCycleCounts {
    std::size_t triangles = 0;
    std::size_t squares = 0;
};

inline ShortCycleCounts constant_sign_short_cycles(const Graph& g, const SignVector& f) {
    const std::size_t n = g.vertex_count();
    auto same = [&](Vertex a, Vertex b) { return g.adjacent(a, b) && f.signs[a] == f.signs[b]; };
    ShortCycleCounts c;
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            for (Vertex d = b + 1; d < n; ++d)
                if (same(a, b) && same(b, d) && same(a, d)) ++c.triangles;
    // Each 4-cycle a-b-c-d with a the smallest label, b < d to fix orientation.
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            for (Vertex x = a + 1; x < n; ++x)
                for (Vertex d = b + 1; d < n; ++d) {
                    if (x == b || x == d) continue;
                    if (same(a, b) && same(b, x) && same(x, d) && same(d, a)) ++c.squares;
                }
    return c;
}

struct DerivativeCheck {
    std::size_t order = 0;
    BigInt computed;   // k! c_k from the polynomial
    BigInt expected;   // closed form in B - F, C_3, C_4
    bool ok() const { return computed == expected; }
};

struct DerivativeReport {
    std::size_t non_flips = 0;  // B - F
    ShortCycleCounts cycles;
    std::vector<DerivativeCheck> checks;
    bool expansion_matches = false;  // spin sum == combinatorial expansion
    bool ok() const {
        if (!expansion_matches) return false;
        for (const auto& c : checks)
            if (!c.ok()) return false;
        return true;
    }
};

// Z(0) = 2^V, Z'(0) = -2^(V-1)(B-F), Z''(0) = 2^(V-1) C(B-F,2),
// Z'''(0) = -3! 2^(V-3) [C(B-F,3) - C_3],
// Z''''(0) = 4! 2^(V-4) [C(B-F,4) + C_4 - C_3 (B-F-3)].
inline DerivativeReport derivative_identities(const Graph& g, const SignVector& f,
                                              std::size_t spin_cap = default_spin_cap,
                                              std::size_t subset_cap = default_subset_cap) {
    const PartitionPolynomial spin = partition_polynomial(g, f, spin_cap);
    const PartitionPolynomial comb = combinatorial_polynomial(g, f, subset_cap);
    DerivativeReport rep;
    rep.expansion_matches = spin.coefficients == comb.coefficients;
    rep.non_flips = g.bond_count() - flip_count(g, f).count;
    rep.cycles = constant_sign_short_cycles(g, f);
    const std::size_t V = g.vertex_count();
    const std::size_t m = rep.non_flips;
    const BigInt c3 = rep.cycles.triangles;
    const BigInt c4 = rep.cycles.squares;
    // 2^(V-j) for j <= 4 scaled to keep integers when V < 4.
    auto scaled = [&](std::size_t j, const BigInt& x) -> BigInt {
        return V >= j ? x * pow2(V - j) : x / pow2(j - V);
    };
    const BigInt tilde_c3 = m >= 3 ? c3 * BigInt(m - 3) : BigInt(0);
    rep.checks.push_back({0, spin.derivative_at_zero(0), pow2(V)});
    rep.checks.push_back({1, spin.derivative_at_zero(1), -scaled(1, BigInt(m))});
    rep.checks.push_back({2, spin.derivative_at_zero(2), scaled(1, binomial(m, 2))});
    rep.checks.push_back({3, spin.derivative_at_zero(3), -6 * scaled(3, binomial(m, 3) - c3)});
    rep.checks.push_back({4, spin.derivative_at_zero(4), 24 * scaled(4, binomial(m, 4) + c4 - tilde_c3)});
    return rep;
}

struct EnsembleIdentityReport {
    std::uint64_t even_flip_configs = 0;
    std::uint64_t odd_flip_configs = 0;
    bool is_tree = false;
    bool tree_parity_ok = true;           // even == odd on trees
    BigInt parity_sum_spins;              // sum_s (-1)^F(s)
    BigInt parity_sum_expansion;          // sum' (-1)^k 2^(V + r)
    BigInt moment2_sum_spins;             // sum_s 2^F(s)
    BigInt moment2_sum_expansion;         // sum' 2^(V - k + r)
    bool is_complete = false;
    BigInt complete_constant;             // Z(const;1) from the expansion, expect 2
    BigInt complete_nonconstant_mean;     // mean over non-constant f, expect 4
    BigInt complete_all_sum;              // sum over all f, expect 4(2^V - 1)
    bool complete_ok = true;
    bool ok() const {
        return tree_parity_ok && parity_sum_spins == parity_sum_expansion &&
               moment2_sum_spins == moment2_sum_expansion && complete_ok;
    }
};

// Identities that hold over uniformly random sign vectors s:
//   sum_s (-1)^F(s) = 2^V sum_k (-1)^k sum' 2^r      (n = -1)
//   sum_s 2^F(s)    = 2^V sum_k 2^-k sum' 2^r        (n = 2)
// with trees giving equal even and odd flip counts, and, for K_V, the three
// sums of Z(f;1) computed from the expansion.
inline EnsembleIdentityReport ensemble_identities(const Graph& g, std::size_t spin_cap = default_spin_cap,
                                                  std::size_t subset_cap = default_subset_cap) {
    detail::require_spin_cap(g, spin_cap);
    const std::size_t V = g.vertex_count();
    const std::size_t B = g.bond_count();
    EnsembleIdentityReport rep;
    const std::vector<bool> all(B, true);
    const auto hist = detail::spin_flip_histogram(g, all);
    for (std::size_t F = 0; F < hist.size(); ++F) {
        (F % 2 ? rep.odd_flip_configs : rep.even_flip_configs) += hist[F];
        rep.parity_sum_spins += (F % 2 ? -1 : 1) * BigInt(hist[F]);
        rep.moment2_sum_spins += pow2(F) * hist[F];
    }
    rep.is_tree = is_tree(g);
    if (rep.is_tree) rep.tree_parity_ok = rep.even_flip_configs == rep.odd_flip_configs;
    for_each_odd_cycle_free_subset(g, all, subset_cap, [&](std::size_t k, std::size_t components) {
        // 2^(V + r) = 2^(components + k)
        const BigInt t = pow2(components + k);
        rep.parity_sum_expansion += (k % 2) ? -t : t;
        rep.moment2_sum_expansion += pow2(components);
    });

    rep.is_complete = B == V * (V - 1) / 2 && V >= 2;
    if (rep.is_complete) {
        if (V >= 63) throw std::invalid_argument("complete-graph identities need V < 63");
        const std::uint64_t total = std::uint64_t{1} << V;
        BigInt nonconstant_sum = 0;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            const SignVector f = SignVector::from_mask(mask, V);
            const BigInt z = combinatorial_polynomial(g, f, subset_cap).evaluate(1);
            rep.complete_all_sum += z;
            if (mask == 0) rep.complete_constant = z;
            if (mask != 0 && mask != total - 1) nonconstant_sum += z;
        }
        const BigInt denom = BigInt(total) - 2;
        rep.complete_nonconstant_mean = denom > 0 ? nonconstant_sum / denom : BigInt(0);
        const bool divisible = denom > 0 && rep.complete_nonconstant_mean * denom == nonconstant_sum;
        rep.complete_ok = rep.complete_constant == 2 && divisible && rep.complete_nonconstant_mean == 4 &&
                          rep.complete_all_sum == 4 * (BigInt(total) - 1);
    }
    return rep;
}

// partition-report JSON: exact integers are written as strings.
inline nlohmann::json partition_report_json(const Graph& g, const SignVector& f, std::size_t spin_cap = default_spin_cap,
                                            std::size_t subset_cap = default_subset_cap) {
    nlohmann::json j;
    const PartitionCount pc = partition_count(g, f, spin_cap);
    const PartitionPolynomial p = partition_polynomial(g, f, spin_cap);
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : p.coefficients) coeffs.push_back(c.str());
    j["vertex_count"] = g.vertex_count();
    j["bond_count"] = g.bond_count();
    j["coefficients"] = coeffs;
    j["z"] = pc.z.str();
    j["nu"] = pc.nu;
    j["nu_labeling"] = count_strong(g, f).count;
    const DerivativeReport d = derivative_identities(g, f, spin_cap, subset_cap);
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : d.checks)
        checks.push_back({{"order", c.order}, {"computed", c.computed.str()}, {"expected", c.expected.str()},
                          {"ok", c.ok()}});
    j["derivatives"] = checks;
    j["expansion_matches_spin_sum"] = d.expansion_matches;
    j["constant_sign_triangles"] = d.cycles.triangles;
    j["constant_sign_squares"] = d.cycles.squares;
    j["top_coefficient"] = p.coefficients.back().str();
    const EnsembleIdentityReport e = ensemble_identities(g, spin_cap, subset_cap);
    j["ensemble"] = {{"even_flip_configs", e.even_flip_configs},
                     {"odd_flip_configs", e.odd_flip_configs},
                     {"tree", e.is_tree},
                     {"tree_parity_ok", e.tree_parity_ok},
                     {"parity_sum_spins", e.parity_sum_spins.str()},
                     {"parity_sum_expansion", e.parity_sum_expansion.str()},
                     {"moment2_sum_spins", e.moment2_sum_spins.str()},
                     {"moment2_sum_expansion", e.moment2_sum_expansion.str()},
                     {"ok", e.ok()}};
    if (e.is_complete)
        j["complete_graph"] = {{"constant", e.complete_constant.str()},
                               {"nonconstant_mean", e.complete_nonconstant_mean.str()},
                               {"all_sum", e.complete_all_sum.str()},
                               {"ok", e.complete_ok}};
    j["identities_ok"] = d.ok() && e.ok() && pc.nu == count_strong(g, f).count;
    return j;
}

}  // namespace nodal
