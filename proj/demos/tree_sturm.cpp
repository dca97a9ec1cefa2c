// Nodal counts of every Laplacian eigenvector of a random tree, next to a
// random graph with cycles for contrast.

#include <cstdio>
#include <random>

#include "nodal/counting.hpp"
#include "nodal/generators.hpp"
#include "nodal/spectral.hpp"

using namespace nodal;

static void show(const char* name, const Graph& g) {
    const BoundReport rep = bound_report(g, eigendecompose(laplacian(g)));
    std::printf("%s: V=%zu B=%zu r=%zu\n", name, g.vertex_count(), g.bond_count(), rep.cycle_rank);
    std::printf("   n  lambda      m  nu  F  n-nu\n");
    for (const auto& row : rep.rows)
        std::printf("%4zu  %-10.5f %zu %3zu %2zu  %lld%s\n", row.n, row.eigenvalue, row.multiplicity, row.nu_strong,
                    row.flips, static_cast<long long>(row.n) - static_cast<long long>(row.nu_strong),
                    row.zero_entries ? "  (zeros)" : "");
}

int main() {
    std::mt19937_64 rng(7);
    show("random tree", random_tree(12, rng));
    show("random graph", random_connected_graph(12, 3, rng));
}
