// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nodal/benchmark.hpp"
#include "nodal/counting.hpp"
#include "nodal/ensemble.hpp"
#include "nodal/generators.hpp"
#include "nodal/metric.hpp"
#include "nodal/partition.hpp"
#include "nodal/sector.hpp"
#include "nodal/spectral.hpp"

using namespace nodal;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail, Clock::time_point start) {
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s %2d %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---- connected graphs up to isomorphism -------------------------------------

using Code = std::uint32_t;  // upper-triangle adjacency bits, V <= 7

Code encode(const std::vector<std::vector<bool>>& adj, const std::vector<int>& perm) {
    const std::size_t n = adj.size();
    Code c = 0;
    int bit = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++bit)
            if (adj[perm[i]][perm[j]]) c |= Code{1} << bit;
    return c;
}

Code canonical(const std::vector<std::vector<bool>>& adj) {
    std::vector<int> perm(adj.size());
    std::iota(perm.begin(), perm.end(), 0);
    Code best = ~Code{0};
    do best = std::min(best, encode(adj, perm));
    while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Graph decode(Code c, std::size_t n) {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    int bit = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++bit)
            if ((c >> bit) & 1U) pairs.emplace_back(i, j);
    return Graph(n, pairs);
}

// Every connected graph has a vertex whose removal keeps it connected, so
// joining a new vertex to nonempty subsets of the V-1 graphs reaches all of them.
std::vector<std::vector<Graph>> connected_graphs(std::size_t max_v) {
    std::vector<std::vector<Graph>> out(max_v + 1);
    out[1].push_back(Graph(1));
    for (std::size_t n = 2; n <= max_v; ++n) {
        std::set<Code> seen;
        for (const Graph& g : out[n - 1]) {
            for (std::uint32_t sub = 1; sub < (1U << (n - 1)); ++sub) {
                std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
                for (const Bond& b : g.bonds()) adj[b.u][b.v] = adj[b.v][b.u] = true;
                for (std::size_t i = 0; i + 1 < n; ++i)
                    if ((sub >> i) & 1U) adj[i][n - 1] = adj[n - 1][i] = true;
                seen.insert(canonical(adj));
            }
        }
        for (Code c : seen) out[n].push_back(decode(c, n));
    }
    return out;
}

SignVector random_signs(std::size_t n, std::mt19937_64& rng) {
    std::vector<int> s(n);
    for (int& x : s) x = (rng() & 1U) ? 1 : -1;
    return SignVector(s);
}

// ---- criterion 1 / 4 / 5 bookkeeping ----------------------------------------

struct Sweep {
    std::size_t vectors = 0, eigenvectors = 0, with_zeros = 0, disagreements = 0;
    std::size_t courant_checked = 0, courant_bad = 0, berk_checked = 0, berk_bad = 0;
    std::size_t bip_checked = 0, bip_bad = 0;
};

// Five counts of one zero-free vector; `table` may be null.
bool five_agree(const Graph& g, const SignVector& s, const EquiNodalTable* table) {
    const std::size_t nu = count_strong(g, s).count;
    const std::size_t sector = table ? count_via_sector(*table, g, s) : count_via_sector(build_equinodal(g), g, s);
    return count_via_flips(g, s).count == nu && count_via_breakup(g, s) == nu && sector == nu &&
           partition_count(g, s).nu == nu;
}

void audit_bounds(const Graph& g, const Spectrum& spectrum, Sweep& sw);

void sweep_graph(const Graph& g, std::mt19937_64& rng, std::size_t random_vectors, bool all_masks, Sweep& sw) {
    const std::size_t V = g.vertex_count();
    const EquiNodalTable table = build_equinodal(g);
    if (all_masks) {
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << V); ++m) {
            ++sw.vectors;
            if (!five_agree(g, SignVector::from_mask(m, V), &table)) ++sw.disagreements;
        }
    }
    for (std::size_t i = 0; i < random_vectors; ++i) {
        ++sw.vectors;
        if (!five_agree(g, random_signs(V, rng), &table)) ++sw.disagreements;
    }
    const Spectrum spectrum = eigendecompose(laplacian(g));
    for (std::size_t i = 0; i < V; ++i) {
        ++sw.eigenvectors;
        const SignVector s = SignVector::from(ValueVector::from(spectrum.vector(i)));
        const ZeroTransform t = zero_transform(g, s, ZeroMode::strong);
        if (!s.zero_free()) {
            ++sw.with_zeros;
            const std::size_t nu = count_strong(g, s).count;
            if (count_strong(t.graph, t.signs).count != nu || !five_agree(t.graph, t.signs, nullptr))
                ++sw.disagreements;
        } else if (!five_agree(g, s, &table)) {
            ++sw.disagreements;
        }
    }
    if (is_connected(g)) audit_bounds(g, spectrum, sw);
}

void audit_bounds(const Graph& g, const Spectrum& spectrum, Sweep& sw) {
    const std::size_t V = g.vertex_count();
    const BoundReport rep = bound_report(g, spectrum);
    for (const auto& row : rep.rows) {
        ++sw.courant_checked;
        if (!row.courant_ok) ++sw.courant_bad;
        if (row.berkolaiko_ok) {
            ++sw.berk_checked;
            if (!*row.berkolaiko_ok) ++sw.berk_bad;
        }
    }
    if (V >= 2) {
        ++sw.bip_checked;
        if ((rep.rows.back().nu_strong == V) != rep.bipartite) ++sw.bip_bad;
    }
}

}  // namespace

int main() {
    std::mt19937_64 rng(20240611);

    // 1, 4, 5: sweeps ---------------------------------------------------------
    Sweep exhaustive, randomized, trees;
    {
        auto t0 = Clock::now();
        const auto graphs = connected_graphs(7);
        const std::vector<std::size_t> known{0, 1, 1, 2, 6, 21, 112, 853};
        bool census_ok = true;
        std::size_t total = 0;
        for (std::size_t n = 1; n <= 7; ++n) {
            census_ok = census_ok && graphs[n].size() == known[n];
            total += graphs[n].size();
        }
        for (std::size_t n = 1; n <= 7; ++n)
            for (const Graph& g : graphs[n]) sweep_graph(g, rng, 0, true, exhaustive);
        for (int i = 0; i < 500; ++i) {
            const std::size_t V = 2 + rng() % 11;
            Graph g;
            if (i % 2 == 0) {
                const std::size_t max_extra = V * (V - 1) / 2 - (V - 1);
                g = random_connected_graph(V, max_extra ? rng() % (max_extra + 1) : 0, rng);
            } else {
                g = gnp_graph(V, 0.15 + 0.6 * std::uniform_real_distribution<>(0, 1)(rng), rng);
            }
            sweep_graph(g, rng, 20, false, randomized);
        }
        const std::size_t vecs = exhaustive.vectors + randomized.vectors;
        const std::size_t eig = exhaustive.eigenvectors + randomized.eigenvectors;
        const std::size_t bad = exhaustive.disagreements + randomized.disagreements;
        report(1, "method agreement", census_ok && bad == 0,
               fmt("%zu connected graphs V<=7 (census %s) + 500 random V<=12; %zu sign vectors, %zu eigenvectors "
                   "(%zu with zeros); disagreements %zu",
                   total, census_ok ? "1,1,2,6,21,112,853" : "WRONG", vecs, eig,
                   exhaustive.with_zeros + randomized.with_zeros, bad),
               t0);
    }

    // 2: flip lemma ------------------------------------------------------------
    {
        auto t0 = Clock::now();
        std::size_t bad = 0;
        for (int i = 0; i < 10000; ++i) {
            const std::size_t V = 2 + rng() % 30;
            const Graph g = gnp_graph(V, std::uniform_real_distribution<>(0.05, 0.9)(rng), rng);
            const SignVector s = random_signs(V, rng);
            std::size_t enumerated = 0;
            for (const Bond& b : g.bonds()) enumerated += s.signs[b.u] != s.signs[b.v];
            const long long q = laplacian_quadratic_form(laplacian(g), s);
            if (q % 4 != 0 || q / 4 != static_cast<long long>(enumerated) ||
                flip_count(g, s).quadratic_form != q)
                ++bad;
        }
        report(2, "flip lemma", bad == 0, fmt("10000 random pairs, mismatches %zu", bad), t0);
    }

    // 3: tree Sturm ------------------------------------------------------------
    {
        auto t0 = Clock::now();
        std::size_t redraws = 0, bad = 0, modes = 0;
        for (int i = 0; i < 100; ++i) {
            for (;;) {
                const std::size_t V = 2 + rng() % 29;
                const Graph t = random_tree(V, rng);
                const Spectrum s = eigendecompose(laplacian(t));
                bool clean = true;
                for (std::size_t j = 0; j < V && clean; ++j)
                    clean = s.simple(j) && SignVector::from(ValueVector::from(s.vector(j))).zero_free();
                if (!clean) {
                    ++redraws;
                    continue;
                }
                for (std::size_t j = 0; j < V; ++j) {
                    ++modes;
                    if (count_strong(t, ValueVector::from(s.vector(j))).count != j + 1) ++bad;
                }
                audit_bounds(t, s, trees);
                break;
            }
        }
        report(3, "tree Sturm", bad == 0,
               fmt("100 trees V<=30 with simple zero-free spectra (%zu redraws), %zu modes, nu_n != n on %zu",
                   redraws, modes, bad),
               t0);
    }

    // 4: Courant and lower bound ---------------------------------------------
    {
        auto t0 = Clock::now();
        const std::size_t cc = exhaustive.courant_checked + randomized.courant_checked + trees.courant_checked;
        const std::size_t cb = exhaustive.courant_bad + randomized.courant_bad + trees.courant_bad;
        const std::size_t bc = exhaustive.berk_checked + randomized.berk_checked + trees.berk_checked;
        const std::size_t bb = exhaustive.berk_bad + randomized.berk_bad + trees.berk_bad;
        report(4, "Courant and nu >= n - r", cb == 0 && bb == 0 && bc > 0,
               fmt("upper bound on %zu eigenvectors: %zu violations; lower bound on %zu simple zero-free: %zu "
                   "violations",
                   cc, cb, bc, bb),
               t0);
    }

    // 5: bipartite resolution ------------------------------------------------
    {
        auto t0 = Clock::now();
        const Graph bip(6, {{0, 2}, {1, 2}, {1, 3}, {1, 4}, {2, 5}, {3, 5}, {4, 5}});
        const Graph non(6, {{0, 2}, {0, 5}, {1, 3}, {1, 4}, {2, 3}, {3, 4}, {3, 5}});
        const Spectrum a = eigendecompose(laplacian(bip)), b = eigendecompose(laplacian(non));
        double gap = 0.0;
        for (std::size_t i = 0; i < 6; ++i) gap = std::max(gap, std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
        const std::size_t nu_a = count_strong(bip, ValueVector::from(a.vector(5))).count;
        const std::size_t nu_b = count_strong(non, ValueVector::from(b.vector(5))).count;
        const bool pair_ok = gap < 1e-12 && is_bipartite(bip) && !is_bipartite(non) && nu_a == 6 && nu_b < 6;
        report(5, "bipartite resolution", exhaustive.bip_bad == 0 && pair_ok,
               fmt("iff holds on %zu connected graphs (%zu failures); isospectral pair (gap %.1e): nu_V = %zu "
                   "(bipartite) vs %zu",
                   exhaustive.bip_checked, exhaustive.bip_bad, gap, nu_a, nu_b),
               t0);
    }

    // 6: regular graph morphology -----------------------------------------------
    {
        auto t0 = Clock::now();
        std::size_t pairs = 0, bad = 0, with_k = 0;
        for (int i = 0; i < 200; ++i) {
            const std::size_t v = 3 + i % 3;
            Graph g;
            do {
                std::size_t V = v + 1 + rng() % (40 - v);
                if ((V * v) % 2) ++V;
                g = random_regular_graph(V, v, rng);
            } while (!is_connected(g));
            const Spectrum s = eigendecompose(laplacian(g));
            for (std::size_t j = 0; j < s.size(); ++j) {
                ++pairs;
                const MorphologyReport m = check_morphology(g, ValueVector::from(s.vector(j)), s.eigenvalues[j]);
                if (!m.ok()) ++bad;
                if (m.k && *m.k >= 1) ++with_k;
            }
        }
        report(6, "regular-graph domain restrictions", bad == 0,
               fmt("200 connected v-regular graphs (v=3,4,5, V<=40), %zu eigenpairs (%zu with k>=1), violations %zu",
                   pairs, with_k, bad),
               t0);
    }

    // 7: partition identities -------------------------------------------------
    {
        auto t0 = Clock::now();
        std::size_t low_bad = 0, deriv_bad = 0, top_bad = 0, tree_bad = 0, checked = 0;
        for (int i = 0; i < 300; ++i) {
            const std::size_t V = 2 + rng() % 10;
            const Graph g = gnp_graph(V, std::uniform_real_distribution<>(0.2, 0.8)(rng), rng);
            const SignVector f = random_signs(V, rng);
            const PartitionPolynomial p = partition_polynomial(g, f);
            const std::size_t F = flip_count(g, f).count;
            ++checked;
            if (p.coefficients[0] != pow2(V) ||
                (g.bond_count() > 0 && p.coefficients[1] != -pow2(V - 1) * BigInt(g.bond_count() - F)))
                ++low_bad;
            if (g.bond_count() <= 20 && !derivative_identities(g, f).ok()) ++deriv_bad;
        }
        // Degree B iff bipartite with f constant per component; then |c_B| = 2^Co, sign (-1)^B.
        for (int i = 0; i < 200; ++i) {
            const std::size_t V = 2 + rng() % 9;
            const Graph g = i % 2 ? gnp_graph(V, 0.3, rng) : random_tree(V, rng);
            if (g.bond_count() == 0) continue;
            const ComponentLabeling comp = connected_components(g);
            std::vector<int> sign_of(comp.component_count);
            for (int& x : sign_of) x = (rng() & 1U) ? 1 : -1;
            std::vector<int> s(V);
            for (Vertex v = 0; v < V; ++v) s[v] = sign_of[comp.labels[v]];
            const bool constant = i % 4 != 3;
            const SignVector f = constant ? SignVector(s) : random_signs(V, rng);
            bool per_component = true;
            for (const Bond& b : g.bonds()) per_component = per_component && f.signs[b.u] == f.signs[b.v];
            const BigInt top = partition_polynomial(g, f).coefficients.back();
            const bool full_degree = top != 0;
            if (full_degree != (is_bipartite(g) && per_component)) ++top_bad;
            if (full_degree) {
                const BigInt expect = pow2(comp.component_count) * (g.bond_count() % 2 ? -1 : 1);
                if (top != expect) ++top_bad;
            }
        }
        for (int i = 0; i < 50; ++i) {
            const EnsembleIdentityReport r = ensemble_identities(random_tree(2 + rng() % 14, rng));
            if (!r.tree_parity_ok || !r.ok()) ++tree_bad;
        }
        std::string kv;
        bool kv_ok = true;
        for (std::size_t V : {3u, 4u, 5u}) {
            const EnsembleIdentityReport r = ensemble_identities(complete_graph(V));
            kv_ok = kv_ok && r.complete_constant == 2 && r.complete_nonconstant_mean == 4 &&
                    r.complete_all_sum == 4 * (pow2(V) - 1) && r.ok();
            kv += fmt(" K_%zu:%s/%s/%s", V, r.complete_constant.str().c_str(),
                      r.complete_nonconstant_mean.str().c_str(), r.complete_all_sum.str().c_str());
        }
        report(7, "partition identities", low_bad + deriv_bad + top_bad + tree_bad == 0 && kv_ok,
               fmt("c0/c1 failures %zu of %zu, derivative failures %zu, top-coefficient failures %zu, tree parity "
                   "failures %zu;%s",
                   low_bad, checked, deriv_bad, top_bad, tree_bad, kv.c_str()),
               t0);
    }

    // 8: sector tables ---------------------------------------------------------
    {
        auto t0 = Clock::now();
        bool kv_ok = true;
        for (std::size_t V = 2; V <= 10; ++V) {
            const EquiNodalTable t = build_equinodal(complete_graph(V));
            kv_ok = kv_ok && t.gamma(1) == 2 && t.gamma(2) == (std::uint64_t{1} << V) - 2;
        }
        std::size_t tables = 0, tree_bad = 0;
        for (std::size_t V = 2; V <= 16; ++V) {
            std::vector<Graph> ts{path_graph(V), star_graph(V - 1)};
            for (int j = 0; j < 3; ++j) ts.push_back(random_tree(V, rng));
            for (const Graph& t : ts) {
                const EquiNodalTable tab = build_equinodal(t);
                ++tables;
                std::uint64_t c = 1;
                for (std::size_t n = 1; n <= V; ++n) {
                    if (tab.gamma(n) != 2 * c) ++tree_bad;
                    c = c * (V - n) / n;
                }
            }
        }
        const auto p = uniform_distribution(build_equinodal(random_tree(20, rng)));
        const double tv = total_variation(p, tree_gaussian(20, p.size() - 1));
        report(8, "equi-nodal tables", kv_ok && tree_bad == 0 && tv < 0.05,
               fmt("K_V V<=10 %s; %zu tree tables V<=16, binomial mismatches %zu; V=20 tree TV to Gaussian %.4f",
                   kv_ok ? "ok" : "WRONG", tables, tree_bad, tv),
               t0);
    }

    // 9: metric solver ---------------------------------------------------------
    {
        auto t0 = Clock::now();
        double worst_interval = 0.0;
        for (double L : {1.0, 0.73, 2.4}) {
            for (int kind = 0; kind < 2; ++kind) {
                const Condition c = kind ? Condition::dirichlet : Condition::neumann;
                const SecularScan s = eigenvalues(MetricGraph(path_graph(2), {L}, {c, c}), 100.0);
                for (std::size_t j = 0; j < s.roots.size(); ++j) {
                    const double exact = (j + 1) * std::numbers::pi / L;
                    worst_interval = std::max(worst_interval, std::abs(s.roots[j].k - exact) / exact);
                }
                if (s.count() != static_cast<std::size_t>(100.0 * L / std::numbers::pi)) worst_interval = 1.0;
            }
        }
        const auto [I, II] = isospectral_pair(1.0, std::sqrt(2.0), std::sqrt(3.0));
        const MetricGraph star(star_graph(3), {1.0, std::sqrt(2.0), std::sqrt(3.0)});
        const std::vector<std::pair<const char*, const MetricGraph*>> gs{{"star", &star}, {"I", &I}, {"II", &II}};
        bool weyl_ok = true;
        std::size_t compared = 0, mismatched = 0, errors = 0;
        std::string weyl;
        for (const auto& [name, mg] : gs) {
            const SecularScan s = eigenvalues(*mg, 100.0);
            const double bound = static_cast<double>(mg->vertex_count() + cycle_rank(mg->graph()) + 1);
            const double defect =
                std::abs(static_cast<double>(s.count() + s.zero_modes) - mg->total_length() * 100.0 / std::numbers::pi);
            weyl_ok = weyl_ok && s.complete && defect <= bound;
            weyl += fmt(" %s %.2f/%.0f", name, defect, bound);
            const auto modes = analyze_modes(*mg, first_modes(*mg, 100), 100);
            for (const auto& m : modes) {
                if (!m.error.empty()) ++errors;
                if (!m.validated()) continue;
                if (m.constant_sign_cycle || !m.mu_formula) continue;
                ++compared;
                if (*m.mu_formula != *m.mu_direct) ++mismatched;
            }
        }
        report(9, "metric solver", worst_interval < 1e-10 && weyl_ok && mismatched == 0 && errors == 0 && compared > 0,
               fmt("interval rel. error %.1e; Weyl defect/bound at k=100:%s; formula vs direct %zu/%zu agree, "
                   "%zu errors",
                   worst_interval, weyl.c_str(), compared - mismatched, compared, errors),
               t0);
    }

    // 10, 11: isospectral pair -------------------------------------------------
    {
        auto t0 = Clock::now();
        const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);
        const std::vector<std::array<double, 3>> triples{{1.0, r2, r3}, {1.0, std::sqrt(5.0), std::numbers::pi},
                                                         {2.3, 0.7, 1.1}};
        bool ok = true;
        std::string detail;
        ConjectureComparison cc;
        for (std::size_t t = 0; t < triples.size(); ++t) {
            const auto [a, b, c] = triples[t];
            const auto [I, II] = isospectral_pair(a, b, c);
            const SecularScan s1 = first_modes(I, 200), s2 = first_modes(II, 200);
            const double mis = spectral_mismatch(s1, s2, 100);
            const auto m1 = analyze_modes(I, s1, 200), m2 = analyze_modes(II, s2, 200);
            std::size_t sturm_bad = 0, both = 0, differ = 0;
            for (std::size_t i = 0; i < 200; ++i) {
                if (m1[i].validated() && *m1[i].mu_direct != m1[i].n) ++sturm_bad;
                if (m1[i].validated() && m2[i].validated()) {
                    ++both;
                    differ += *m1[i].mu_direct != *m2[i].mu_direct;
                }
            }
            const double frac = static_cast<double>(differ) / static_cast<double>(both);
            ok = ok && mis <= 1e-8 && sturm_bad == 0 && std::abs(frac - 0.5) <= 0.05;
            detail += fmt("%s(%.3g,%.3g,%.3g): mismatch %.1e, mu_I!=n %zu, differ %zu/%zu=%.3f", t ? "; " : "", a, b,
                          c, mis, sturm_bad, differ, both, frac);
            if (t == 0) cc = compare_conjecture(m2, a, b, c, 200);
        }
        const auto [A, B] = seven_three_pair({1.0, r2, r3});
        const SecularScan sa = first_modes(A, 500), sb = first_modes(B, 500);
        const auto ma = analyze_modes(A, sa, 500), mb = analyze_modes(B, sb, 500);
        std::size_t both = 0, differ = 0;
        for (std::size_t i = 0; i < 500; ++i)
            if (ma[i].validated() && mb[i].validated() && ma[i].nu_discrete && mb[i].nu_discrete) {
                ++both;
                differ += *ma[i].nu_discrete != *mb[i].nu_discrete;
            }
        const double mis73 = spectral_mismatch(sa, sb, 500);
        const double frac73 = both ? static_cast<double>(differ) / static_cast<double>(both) : 0.0;
        ok = ok && frac73 > 0.0 && mis73 <= 1e-8;
        detail += fmt("; 7_3 trees: mismatch %.1e, vertex-value counts differ %zu/%zu=%.3f", mis73, differ, both,
                      frac73);
        report(10, "metric isospectral pair", ok, detail, t0);

        t0 = Clock::now();
        report(11, "conjectured count", cc.best_rate >= 0.95,
               fmt("%zu validated modes of II(1,sqrt2,sqrt3); raw rate %.3f; agreements at offsets -1/0/+1: "
                   "%zu/%zu/%zu; best offset %+d rate %.3f",
                   cc.compared, cc.raw_rate, cc.agreements[0], cc.agreements[1], cc.agreements[2], cc.best_offset,
                   cc.best_rate),
               t0);
    }

    // 12: benchmark --------------------------------------------------------------
    {
        auto t0 = Clock::now();
        const std::vector<std::size_t> dense_sizes{100, 200, 400, 800, 1500};
        const std::vector<std::size_t> sparse_sizes{1000, 3000, 10000, 30000, 100000};
        const auto d05 = dense_breakup_benchmark(dense_sizes, 0.5, 7, 5);
        const auto d5 = dense_breakup_benchmark(dense_sizes, 5.0, 7, 5);
        const auto sp = sparse_grid_benchmark(sparse_sizes, 7, 5);
        bool counts_ok = true;
        for (const auto* rows : {&d05, &d5, &sp})
            for (const auto& r : *rows) counts_ok = counts_ok && r.count_ok;
        const double s05 = loglog_slope(d05), s5 = loglog_slope(d5), ss = loglog_slope(sp);
        report(12, "break-up scaling", s05 < 3.0 && s5 < 3.0 && ss <= 1.5 && counts_ok,
               fmt("dense slope %.2f (r/V=0.5), %.2f (r/V=5), %.2fs at V=1500; sparse grid slope %.2f, %.3fs at "
                   "V=%zu; counts %s",
                   s05, s5, d5.back().seconds, ss, sp.back().seconds, sp.back().vertices,
                   counts_ok ? "verified" : "WRONG"),
               t0);
    }

    // 13: ensembles ----------------------------------------------------------------
    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string detail;
        auto run = [&](const char* name, EnsembleConfig c) {
            c.samples = 100;
            c.seed = 99;
            const DefectHistogram h = defect_distribution_discrete(c);
            ok = ok && h.support_violations == 0;
            detail += fmt("%s%s: %zu modes, max r %zu, support violations %zu", detail.empty() ? "" : "; ", name,
                          h.counted_modes, h.max_cycle_rank, h.support_violations);
            return h;
        };
        EnsembleConfig c;
        c.params.vertices = 16;
        c.model = Model::gnp;
        c.params.edge_probability = 0.3;
        run("gnp", c);
        c.model = Model::random_regular;
        c.params.degree = 3;
        run("3-regular", c);
        c.model = Model::random_tree;
        c.require_clean_spectrum = true;
        c.params.vertices = 12;
        const DefectHistogram t = run("trees", c);
        const bool p0 = t.p.size() == 1 && t.p[0] == 1.0;
        ok = ok && p0;
        detail += fmt(", P(0) = %.17g", t.p.empty() ? 0.0 : t.p[0]);
        report(13, "defect histograms", ok, detail, t0);
    }

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
