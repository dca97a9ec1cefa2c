#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "nodal/counting.hpp"
#include "nodal/generators.hpp"
#include "nodal/spectral.hpp"

using namespace nodal;

namespace {

// Recursive flood fill over the adjacency matrix.
std::size_t oracle_strong(const Graph& g, const std::vector<int>& s) {
    const std::size_t n = g.vertex_count();
    std::vector<bool> seen(n, false);
    std::function<void(Vertex)> fill = [&](Vertex v) {
        seen[v] = true;
        for (Vertex w = 0; w < n; ++w)
            if (!seen[w] && g.adjacent(v, w) && s[w] == s[v]) fill(w);
    };
    std::size_t count = 0;
    for (Vertex v = 0; v < n; ++v)
        if (!seen[v] && s[v] != 0) {
            ++count;
            fill(v);
        }
    return count;
}

std::vector<int> random_signs(std::size_t n, std::mt19937_64& rng, bool zeros) {
    std::uniform_int_distribution<int> d(zeros ? -1 : 0, 1);
    std::vector<int> s(n);
    for (int& x : s) {
        x = d(rng);
        if (!zeros && x == 0) x = -1;
    }
    return s;
}

}  // namespace

TEST(Strong, SmallCases) {
    const Graph p3 = path_graph(3);
    EXPECT_EQ(count_strong(p3, SignVector({1, -1, 1})).count, 3u);
    EXPECT_EQ(count_strong(p3, SignVector({1, 0, 1})).count, 2u);
    EXPECT_EQ(count_strong(p3, SignVector({1, 1, 1})).count, 1u);
    const DomainCount z = count_strong(p3, SignVector({0, 0, 0}));
    EXPECT_EQ(z.count, 0u);
    EXPECT_TRUE(z.all_zero);
    EXPECT_THROW(count_strong(p3, SignVector({1, 1})), std::invalid_argument);
    EXPECT_THROW(SignVector({2, 0}), std::invalid_argument);
}

TEST(Weak, ZeroJoinsBothSides) {
    const Graph p3 = path_graph(3);
    EXPECT_EQ(count_weak(p3, SignVector({1, 0, -1})).count, 2u);
    EXPECT_EQ(count_weak(p3, SignVector({1, 0, 1})).count, 1u);
    EXPECT_EQ(count_weak(p3, SignVector({1, -1, 1})).count, 3u);
}

TEST(Weak, NeverExceedsStrong) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        const Graph g = gnp_graph(9, 0.35, rng);
        const SignVector s(random_signs(9, rng, true));
        EXPECT_LE(count_weak(g, s).count, count_strong(g, s).count);
    }
}

TEST(Strong, MatchesOracle) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 500; ++i) {
        const Graph g = gnp_graph(10, 0.3, rng);
        const auto s = random_signs(10, rng, i % 2);
        EXPECT_EQ(count_strong(g, SignVector(s)).count, oracle_strong(g, s));
    }
}

TEST(ValueVector, Threshold) {
    const ValueVector f = ValueVector::with_default_threshold({1.0, -1e-12, 2.0, -0.5});
    const SignVector s = SignVector::from(f);
    EXPECT_EQ(s.signs, (std::vector<int>{1, 0, 1, -1}));
    EXPECT_EQ(s.zero_count(), 1u);
    EXPECT_EQ(SignVector::from_mask(0b101, 3).signs, (std::vector<int>{1, -1, 1}));
    EXPECT_EQ(SignVector({1, -1, 1, 1}).mask(), 0b1101u);
}

TEST(ZeroTransform, StrongDeletesZeros) {
    const Graph p4 = path_graph(4);
    const ZeroTransform t = zero_transform(p4, SignVector({1, 0, 1, -1}), ZeroMode::strong);
    EXPECT_EQ(t.graph.vertex_count(), 3u);
    EXPECT_EQ(t.graph.bond_count(), 1u);
    EXPECT_EQ(count_strong(t.graph, t.signs).count, 3u);
}

TEST(ZeroTransform, WeakSplitsZeros) {
    const Graph p3 = path_graph(3);
    const ZeroTransform t = zero_transform(p3, SignVector({1, 0, -1}), ZeroMode::weak);
    EXPECT_EQ(t.graph.vertex_count(), 4u);
    EXPECT_EQ(t.graph.bond_count(), 4u);
    EXPECT_TRUE(t.signs.zero_free());
    EXPECT_EQ(count_strong(t.graph, t.signs).count, count_weak(p3, SignVector({1, 0, -1})).count);
    // A zero vertex whose neighbours are all zero creates a domain with no signed vertex.
    const ZeroTransform h = zero_transform(p3, SignVector({0, 0, 1}), ZeroMode::weak);
    EXPECT_TRUE(h.artificial_domain_hazard);
}

TEST(Flips, QuadraticFormIsFourTimesFlips) {
    std::mt19937_64 rng(10);
    for (int i = 0; i < 200; ++i) {
        const Graph g = gnp_graph(11, 0.4, rng);
        const SignVector s(random_signs(11, rng, false));
        const FlipSet f = flip_count(g, s);
        EXPECT_EQ(f.quadratic_form, 4 * static_cast<long long>(f.count));
        EXPECT_EQ(laplacian_quadratic_form(laplacian(g), s), f.quadratic_form);
    }
    EXPECT_THROW(flip_count(path_graph(2), SignVector({1, 0})), std::invalid_argument);
}

TEST(Methods, AgreeOnRandomGraphs) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 300; ++i) {
        const Graph g = gnp_graph(12, i % 3 == 0 ? 0.15 : 0.4, rng);
        const SignVector s(random_signs(12, rng, false));
        const std::size_t nu = count_strong(g, s).count;
        const FlipCount fc = count_via_flips(g, s);
        EXPECT_EQ(fc.count, nu);
        EXPECT_EQ(count_via_breakup(g, s), nu);
        EXPECT_EQ(count_via_breakup_sparse(g, s), nu);
        EXPECT_EQ(fc.flips, flip_count(g, s).count);
    }
}

TEST(Methods, Cycle) {
    // Constant sign on a cycle keeps l = 1.
    const FlipCount c = count_via_flips(cycle_graph(5), SignVector({1, 1, 1, 1, 1}));
    EXPECT_EQ(c.count, 1u);
    EXPECT_EQ(c.constant_sign_cycle_rank, 1u);
    EXPECT_EQ(count_via_flips(cycle_graph(4), SignVector({1, -1, 1, -1})).count, 4u);
}

TEST(Eigenvectors, CompleteGraphCounts) {
    const BoundReport rep = bound_report(complete_graph(4), eigendecompose(laplacian(complete_graph(4))));
    ASSERT_EQ(rep.rows.size(), 4u);
    EXPECT_EQ(rep.rows[0].nu_strong, 1u);
    for (int i = 1; i < 4; ++i) EXPECT_LE(rep.rows[i].nu_strong, 2u);
    EXPECT_FALSE(rep.any_violation());
    EXPECT_EQ(rep.chromatic.value, 4u);
}

TEST(Eigenvectors, TreeSturm) {
    std::mt19937_64 rng(13);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        const Graph t = random_tree(14, rng);
        const BoundReport rep = bound_report(t, eigendecompose(laplacian(t)));
        EXPECT_FALSE(rep.any_violation());
        for (const auto& r : rep.rows)
            if (r.tree_ok) {
                EXPECT_EQ(r.nu_strong, r.n);
                ++checked;
            }
    }
    EXPECT_GT(checked, 0);
}

TEST(Eigenvectors, BoundsOnRandomGraphs) {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 100; ++i) {
        const Graph g = random_connected_graph(11, i % 6, rng);
        const BoundReport rep = bound_report(g, eigendecompose(laplacian(g)));
        for (const auto& r : rep.rows) {
            EXPECT_TRUE(r.courant_ok);
            EXPECT_NE(r.berkolaiko_ok, false);
            EXPECT_NE(r.flip_bounds_ok, false);
            EXPECT_TRUE(r.methods_agree);
            EXPECT_TRUE(r.chromatic_ok);
        }
    }
}

TEST(Eigenvectors, BipartiteTopMode) {
    const Graph bip(6, {{0, 2}, {1, 2}, {1, 3}, {1, 4}, {2, 5}, {3, 5}, {4, 5}});
    const Graph non(6, {{0, 2}, {0, 5}, {1, 3}, {1, 4}, {2, 3}, {3, 4}, {3, 5}});
    const Spectrum a = eigendecompose(laplacian(bip)), b = eigendecompose(laplacian(non));
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-12);
    EXPECT_EQ(bound_report(bip, a).rows.back().nu_strong, 6u);
    EXPECT_LT(bound_report(non, b).rows.back().nu_strong, 6u);
}

TEST(Morphology, RegularGraphs) {
    std::mt19937_64 rng(15);
    for (int i = 0; i < 30; ++i) {
        const Graph g = random_regular_graph(16, 3 + i % 3, rng);
        const Spectrum s = eigendecompose(laplacian(g));
        for (std::size_t j = 0; j < s.size(); ++j)
            EXPECT_TRUE(check_morphology(g, ValueVector::from(s.vector(j)), s.eigenvalues[j]).ok());
    }
    EXPECT_THROW(check_morphology(path_graph(3), ValueVector({1, 0, -1}, 0.0), 1.0), std::invalid_argument);
}

TEST(Morphology, ClauseTriggers) {
    // 2-regular: a constant vector at lambda = 0 < v has one domain of size V.
    const Graph c6 = cycle_graph(6);
    const MorphologyReport r = check_morphology(c6, ValueVector({1, 1, 1, 1, 1, 1}, 0.0), 0.0);
    ASSERT_TRUE(r.k);
    EXPECT_EQ(*r.k, 1u);
    EXPECT_TRUE(r.ok());
    // An alternating vector claimed at lambda = 1 < 2 has singleton domains.
    EXPECT_FALSE(check_morphology(c6, ValueVector({1, -1, 1, -1, 1, -1}, 0.0), 1.0).no_singleton_domains);
    // A vertex inside one domain is forbidden above the degree.
    EXPECT_FALSE(check_morphology(c6, ValueVector({1, 1, 1, -1, 1, -1}, 0.0), 3.0).no_interior_vertices);
}

TEST(Report, CsvShape) {
    const std::string csv = nodal_report_csv(bound_report(path_graph(3), eigendecompose(laplacian(path_graph(3)))));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
