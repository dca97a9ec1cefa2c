#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nodal {

using Vertex = std::size_t;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// Undirected bond stored canonically with u < v.
struct Bond {
    Vertex u = 0;
    Vertex v = 0;

    friend bool operator==(const Bond&, const Bond&) = default;
    friend auto operator<=>(const Bond&, const Bond&) = default;
};

// Union-find with path halving and union by size.
class DisjointSet {
public:
    explicit DisjointSet(std::size_t n = 0) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // Returns false when x and y were already joined.
    bool unite(std::size_t x, std::size_t y) {
        x = find(x);
        y = find(y);
        if (x == y) return false;
        if (size_[x] < size_[y]) std::swap(x, y);
        parent_[y] = x;
        size_[x] += size_[y];
        return true;
    }

    std::size_t size() const { return parent_.size(); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

// Finite simple undirected graph. Vertices are 0-based in memory; the text
// and JSON formats use 1-based labels.
class Graph {
public:
    Graph() = default;

    explicit Graph(std::size_t vertex_count) : n_(vertex_count), adj_(vertex_count) {}

    Graph(std::size_t vertex_count, std::span<const std::pair<Vertex, Vertex>> pairs)
        : Graph(vertex_count) {
        bonds_.reserve(pairs.size());
        for (auto [a, b] : pairs) {
            if (a >= n_ || b >= n_)
                throw std::invalid_argument("bond endpoint out of range: {" + std::to_string(a) +
                                            "," + std::to_string(b) + "}");
            if (a == b)
                throw std::invalid_argument("self-loop at vertex " + std::to_string(a));
            bonds_.push_back(Bond{std::min(a, b), std::max(a, b)});
        }
        std::sort(bonds_.begin(), bonds_.end());
        if (std::adjacent_find(bonds_.begin(), bonds_.end()) != bonds_.end())
            throw std::invalid_argument("multiple bonds between the same pair of vertices");
        for (const Bond& b : bonds_) {
            adj_[b.u].push_back(b.v);
            adj_[b.v].push_back(b.u);
        }
        for (auto& row : adj_) std::sort(row.begin(), row.end());
    }

    Graph(std::size_t vertex_count, std::initializer_list<std::pair<Vertex, Vertex>> pairs)
        : Graph(vertex_count, std::span<const std::pair<Vertex, Vertex>>(pairs.begin(), pairs.size())) {}

    Graph(std::size_t vertex_count, const std::vector<std::pair<Vertex, Vertex>>& pairs)
        : Graph(vertex_count, std::span<const std::pair<Vertex, Vertex>>(pairs)) {}

    std::size_t vertex_count() const { return n_; }
    std::size_t bond_count() const { return bonds_.size(); }
    const std::vector<Bond>& bonds() const { return bonds_; }
    std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
    std::size_t degree(Vertex v) const { return adj_[v].size(); }

    bool adjacent(Vertex a, Vertex b) const {
        return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
    }

    // Index of bond {a,b} in bonds(), or npos.
    std::size_t bond_index(Vertex a, Vertex b) const {
        const Bond key{std::min(a, b), std::max(a, b)};
        auto it = std::lower_bound(bonds_.begin(), bonds_.end(), key);
        return (it != bonds_.end() && *it == key) ? static_cast<std::size_t>(it - bonds_.begin()) : npos;
    }

    std::vector<std::pair<Vertex, Vertex>> bond_pairs() const {
        std::vector<std::pair<Vertex, Vertex>> out;
        out.reserve(bonds_.size());
        for (const Bond& b : bonds_) out.emplace_back(b.u, b.v);
        return out;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.bonds_ == b.bonds_;
    }

private:
    std::size_t n_ = 0;
    std::vector<Bond> bonds_;
    std::vector<std::vector<Vertex>> adj_;
};

struct ComponentLabeling {
    std::vector<std::size_t> labels;
    std::size_t component_count = 0;
};

inline ComponentLabeling connected_components(const Graph& g) {
    const std::size_t n = g.vertex_count();
    ComponentLabeling out{std::vector<std::size_t>(n, npos), 0};
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < n; ++s) {
        if (out.labels[s] != npos) continue;
        out.labels[s] = out.component_count;
        stack.push_back(s);
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex w : g.neighbors(v)) {
                if (out.labels[w] == npos) {
                    out.labels[w] = out.component_count;
                    stack.push_back(w);
                }
            }
        }
        ++out.component_count;
    }
    return out;
}

inline bool is_connected(const Graph& g) {
    return g.vertex_count() > 0 && connected_components(g).component_count == 1;
}

// r = B - V + Co
inline std::size_t cycle_rank(const Graph& g) {
    return g.bond_count() + connected_components(g).component_count - g.vertex_count();
}

// Proper 2-coloring (values 0/1) or nullopt if an odd cycle exists.
inline std::optional<std::vector<int>> bipartition(const Graph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<int> color(n, -1);
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < n; ++s) {
        if (color[s] != -1) continue;
        color[s] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex w : g.neighbors(v)) {
                if (color[w] == -1) {
                    color[w] = 1 - color[v];
                    stack.push_back(w);
                } else if (color[w] == color[v]) {
                    return std::nullopt;
                }
            }
        }
    }
    return color;
}

inline bool is_bipartite(const Graph& g) { return bipartition(g).has_value(); }

inline bool is_forest(const Graph& g) { return cycle_rank(g) == 0; }

inline bool is_tree(const Graph& g) { return is_connected(g) && is_forest(g); }

// Common degree if every vertex has the same degree.
inline std::optional<std::size_t> regular_degree(const Graph& g) {
    if (g.vertex_count() == 0) return std::nullopt;
    const std::size_t d = g.degree(0);
    for (Vertex v = 1; v < g.vertex_count(); ++v)
        if (g.degree(v) != d) return std::nullopt;
    return d;
}

// Subgraph on the vertices with keep[v] == true. `origin` maps new -> old.
struct InducedSubgraph {
    Graph graph;
    std::vector<Vertex> origin;
};

inline InducedSubgraph induced_subgraph(const Graph& g, const std::vector<bool>& keep) {
    std::vector<Vertex> relabel(g.vertex_count(), npos);
    InducedSubgraph out;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (keep[v]) {
            relabel[v] = out.origin.size();
            out.origin.push_back(v);
        }
    }
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (const Bond& b : g.bonds())
        if (keep[b.u] && keep[b.v]) pairs.emplace_back(relabel[b.u], relabel[b.v]);
    out.graph = Graph(out.origin.size(), pairs);
    return out;
}

// Same vertex set, only the bonds with keep_bond[i] == true.
inline Graph spanning_subgraph(const Graph& g, const std::vector<bool>& keep_bond) {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    const auto& bonds = g.bonds();
    for (std::size_t i = 0; i < bonds.size(); ++i)
        if (keep_bond[i]) pairs.emplace_back(bonds[i].u, bonds[i].v);
    return Graph(g.vertex_count(), pairs);
}

struct ChromaticNumber {
    std::size_t value = 0;
    bool exact = false;  // false: greedy upper bound (or 2 for bipartite, which is exact)
};

namespace detail {

inline bool color_search(const Graph& g, const std::vector<Vertex>& order, std::size_t pos,
                         std::size_t colors, std::vector<int>& assigned) {
    if (pos == order.size()) return true;
    const Vertex v = order[pos];
    int max_used = -1;
    for (std::size_t p = 0; p < pos; ++p) max_used = std::max(max_used, assigned[order[p]]);
    // Symmetry breaking: a vertex may open at most one new color.
    const int limit = std::min<int>(static_cast<int>(colors) - 1, max_used + 1);
    for (int c = 0; c <= limit; ++c) {
        bool ok = true;
        for (Vertex w : g.neighbors(v))
            if (assigned[w] == c) { ok = false; break; }
        if (!ok) continue;
        assigned[v] = c;
        if (color_search(g, order, pos + 1, colors, assigned)) return true;
        assigned[v] = -1;
    }
    return false;
}

}  // namespace detail

inline std::size_t greedy_coloring_bound(const Graph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Vertex a, Vertex b) { return g.degree(a) > g.degree(b); });
    std::vector<int> color(n, -1);
    std::size_t used = 0;
    for (Vertex v : order) {
        std::vector<bool> taken(n + 1, false);
        for (Vertex w : g.neighbors(v))
            if (color[w] >= 0) taken[static_cast<std::size_t>(color[w])] = true;
        std::size_t c = 0;
        while (taken[c]) ++c;
        color[v] = static_cast<int>(c);
        used = std::max(used, c + 1);
    }
    return used;
}

// Exact chromatic number by backtracking when V <= exact_limit; otherwise 2
// for bipartite graphs and a greedy upper bound, flagged as inexact.
inline ChromaticNumber chromatic_number(const Graph& g, std::size_t exact_limit = 12) {
    const std::size_t n = g.vertex_count();
    if (n == 0) return {0, true};
    if (g.bond_count() == 0) return {1, true};
    if (is_bipartite(g)) return {2, true};
    if (n > exact_limit) return {greedy_coloring_bound(g), false};
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Vertex a, Vertex b) { return g.degree(a) > g.degree(b); });
    const std::size_t upper = greedy_coloring_bound(g);
    for (std::size_t k = 3; k < upper; ++k) {
        std::vector<int> assigned(n, -1);
        if (detail::color_search(g, order, 0, k, assigned)) return {k, true};
    }
    return {upper, true};
}

}  // namespace nodal
