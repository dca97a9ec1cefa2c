#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nodal/graph.hpp"

namespace nodal {

enum class Model { path, cycle, complete, random_tree, gnp, random_regular, periodic_grid };

inline std::string_view to_string(Model m) {
    switch (m) {
        case Model::path: return "path";
        case Model::cycle: return "cycle";
        case Model::complete: return "complete";
        case Model::random_tree: return "random_tree";
        case Model::gnp: return "gnp";
        case Model::random_regular: return "random_regular";
        case Model::periodic_grid: return "periodic_grid";
    }
    return "unknown";
}

inline Model parse_model(std::string_view name) {
    for (Model m : {Model::path, Model::cycle, Model::complete, Model::random_tree, Model::gnp,
                    Model::random_regular, Model::periodic_grid})
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown graph model '" + std::string(name) + "'");
}

struct GenerateParams {
    std::size_t vertices = 0;   // V; for periodic_grid the side length is derived as sqrt(V)
    double edge_probability = 0.5;  // gnp
    std::size_t degree = 3;     // random_regular
    std::size_t side = 0;       // periodic_grid side; overrides vertices when nonzero
    std::size_t max_attempts = 100000;
};

namespace detail {

inline std::vector<std::pair<Vertex, Vertex>> prufer_decode(const std::vector<Vertex>& seq, std::size_t n) {
    std::vector<std::size_t> degree(n, 1);
    for (Vertex v : seq) ++degree[v];
    std::set<Vertex> leaves;
    for (Vertex v = 0; v < n; ++v)
        if (degree[v] == 1) leaves.insert(v);
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex v : seq) {
        Vertex leaf = *leaves.begin();
        leaves.erase(leaves.begin());
        pairs.emplace_back(leaf, v);
        if (--degree[v] == 1) leaves.insert(v);
    }
    Vertex a = *leaves.begin();
    Vertex b = *std::next(leaves.begin());
    pairs.emplace_back(a, b);
    return pairs;
}

}  // namespace detail

inline Graph path_graph(std::size_t n) {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    return Graph(n, pairs);
}

inline Graph cycle_graph(std::size_t n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex i = 0; i < n; ++i) pairs.emplace_back(i, (i + 1) % n);
    return Graph(n, pairs);
}

inline Graph complete_graph(std::size_t n) {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex i = 0; i < n; ++i)
        for (Vertex j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return Graph(n, pairs);
}

inline Graph star_graph(std::size_t leaves) {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex i = 1; i <= leaves; ++i) pairs.emplace_back(0, i);
    return Graph(leaves + 1, pairs);
}

// Uniform labeled tree via a random Pruefer sequence.
inline Graph random_tree(std::size_t n, std::mt19937_64& rng) {
    if (n == 0) return Graph(0);
    if (n == 1) return Graph(1);
    if (n == 2) return Graph(2, {{0, 1}});
    std::uniform_int_distribution<Vertex> pick(0, n - 1);
    std::vector<Vertex> seq(n - 2);
    for (auto& s : seq) s = pick(rng);
    return Graph(n, detail::prufer_decode(seq, n));
}

inline Graph gnp_graph(std::size_t n, double p, std::mt19937_64& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gnp edge probability must lie in [0,1]");
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex i = 0; i < n; ++i)
        for (Vertex j = i + 1; j < n; ++j)
            if (coin(rng)) pairs.emplace_back(i, j);
    return Graph(n, pairs);
}

// Pairing (configuration) model; pairings with loops or multi-bonds are rejected.
inline Graph random_regular_graph(std::size_t n, std::size_t v, std::mt19937_64& rng,
                                  std::size_t max_attempts = 100000) {
    if ((n * v) % 2 != 0)
        throw std::invalid_argument("random_regular requires an even v*V (got v=" + std::to_string(v) +
                                    ", V=" + std::to_string(n) + ")");
    if (v >= n) throw std::invalid_argument("random_regular requires v < V");
    std::vector<Vertex> stubs;
    stubs.reserve(n * v);
    for (Vertex i = 0; i < n; ++i)
        for (std::size_t k = 0; k < v; ++k) stubs.push_back(i);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::vector<std::pair<Vertex, Vertex>> pairs;
        std::set<std::pair<Vertex, Vertex>> seen;
        bool ok = true;
        for (std::size_t i = 0; i < stubs.size(); i += 2) {
            Vertex a = std::min(stubs[i], stubs[i + 1]);
            Vertex b = std::max(stubs[i], stubs[i + 1]);
            if (a == b || !seen.insert({a, b}).second) { ok = false; break; }
            pairs.emplace_back(a, b);
        }
        if (ok) return Graph(n, pairs);
    }
    throw std::runtime_error("random_regular: no simple pairing found after " +
                             std::to_string(max_attempts) + " attempts");
}

// side x side torus; every vertex has the four lattice neighbours.
inline Graph periodic_grid(std::size_t side) {
    if (side < 3) throw std::invalid_argument("periodic grid needs side >= 3 to be 4-regular and simple");
    const std::size_t n = side * side;
    std::vector<std::pair<Vertex, Vertex>> pairs;
    pairs.reserve(2 * n);
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c) {
            Vertex v = r * side + c;
            pairs.emplace_back(v, r * side + (c + 1) % side);
            pairs.emplace_back(v, ((r + 1) % side) * side + c);
        }
    return Graph(n, pairs);
}

// Connected graph with exactly `extra` independent cycles: a random tree plus
// `extra` distinct random chords.
inline Graph random_connected_graph(std::size_t n, std::size_t extra, std::mt19937_64& rng) {
    if (n < 2 && extra > 0) throw std::invalid_argument("cannot add cycles to a graph with fewer than 2 vertices");
    const std::size_t max_bonds = n * (n - 1) / 2;
    if (n - 1 + extra > max_bonds) throw std::invalid_argument("cycle rank too large for a simple graph");
    Graph tree = random_tree(n, rng);
    std::set<std::pair<Vertex, Vertex>> have;
    for (const Bond& b : tree.bonds()) have.insert({b.u, b.v});
    std::uniform_int_distribution<Vertex> pick(0, n - 1);
    while (have.size() < n - 1 + extra) {
        Vertex a = pick(rng), b = pick(rng);
        if (a == b) continue;
        have.insert({std::min(a, b), std::max(a, b)});
    }
    return Graph(n, std::vector<std::pair<Vertex, Vertex>>(have.begin(), have.end()));
}

inline Graph generate(Model model, const GenerateParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    switch (model) {
        case Model::path: return path_graph(params.vertices);
        case Model::cycle: return cycle_graph(params.vertices);
        case Model::complete: return complete_graph(params.vertices);
        case Model::random_tree: return random_tree(params.vertices, rng);
        case Model::gnp: return gnp_graph(params.vertices, params.edge_probability, rng);
        case Model::random_regular:
            return random_regular_graph(params.vertices, params.degree, rng, params.max_attempts);
        case Model::periodic_grid: {
            std::size_t side = params.side;
            if (side == 0) {
                side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(params.vertices))));
                if (side * side != params.vertices)
                    throw std::invalid_argument("periodic_grid needs a perfect-square vertex count");
            }
            return periodic_grid(side);
        }
    }
    throw std::invalid_argument("unhandled model");
}

// Per-sample seed derivation (splitmix64) so ensemble samples are independent of order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace nodal
