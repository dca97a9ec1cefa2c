#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nodal/graph.hpp"

namespace nodal {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Canonical text form: "V <n>" followed by "E <i> <j>" lines (1-based, i < j, sorted).
inline std::string to_text(const Graph& g) {
    std::ostringstream os;
    os << "V " << g.vertex_count() << '\n';
    for (const Bond& b : g.bonds()) os << "E " << b.u + 1 << ' ' << b.v + 1 << '\n';
    return os.str();
}

namespace detail {

inline std::size_t parse_vertex_label(const std::string& token, std::size_t n, std::size_t line) {
    std::size_t pos = 0;
    long long value = 0;
    try {
        value = std::stoll(token, &pos);
    } catch (const std::exception&) {
        throw ParseError(line, "expected integer vertex label, got '" + token + "'");
    }
    if (pos != token.size()) throw ParseError(line, "trailing characters in vertex label '" + token + "'");
    if (value < 1 || static_cast<std::size_t>(value) > n)
        throw ParseError(line, "vertex label " + token + " outside [1," + std::to_string(n) + "]");
    return static_cast<std::size_t>(value - 1);
}

}  // namespace detail

// Parses the text format. Blank lines and lines starting with '#' are ignored.
inline Graph parse_text(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    std::size_t line = 0;
    std::size_t n = 0;
    bool have_header = false;
    std::vector<std::pair<Vertex, Vertex>> pairs;
    while (std::getline(is, raw)) {
        ++line;
        std::istringstream ls(raw);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "V") {
            if (have_header) throw ParseError(line, "duplicate V line");
            long long v = -1;
            if (!(ls >> v) || v < 0) throw ParseError(line, "V expects a nonnegative integer");
            n = static_cast<std::size_t>(v);
            have_header = true;
        } else if (tag == "E") {
            if (!have_header) throw ParseError(line, "E before V");
            std::string a, b;
            if (!(ls >> a >> b)) throw ParseError(line, "E expects two vertex labels");
            pairs.emplace_back(detail::parse_vertex_label(a, n, line), detail::parse_vertex_label(b, n, line));
        } else {
            throw ParseError(line, "unknown record '" + tag + "'");
        }
        std::string extra;
        if (ls >> extra && extra[0] != '#') throw ParseError(line, "unexpected token '" + extra + "'");
    }
    if (!have_header) throw ParseError(line, "missing V line");
    try {
        return Graph(n, pairs);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line, e.what());
    }
}

inline nlohmann::json to_json(const Graph& g) {
    nlohmann::json bonds = nlohmann::json::array();
    for (const Bond& b : g.bonds()) bonds.push_back({b.u + 1, b.v + 1});
    return {{"vertex_count", g.vertex_count()}, {"bonds", bonds}};
}

inline Graph graph_from_json(const nlohmann::json& j) {
    if (!j.contains("vertex_count") || !j.contains("bonds"))
        throw std::invalid_argument("graph JSON needs vertex_count and bonds");
    const auto n = j.at("vertex_count").get<std::size_t>();
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (const auto& b : j.at("bonds")) {
        if (!b.is_array() || b.size() != 2) throw std::invalid_argument("bond must be a pair [i,j]");
        const auto a = b[0].get<long long>();
        const auto c = b[1].get<long long>();
        if (a < 1 || c < 1 || static_cast<std::size_t>(a) > n || static_cast<std::size_t>(c) > n)
            throw std::invalid_argument("bond endpoint outside [1,V]");
        pairs.emplace_back(static_cast<Vertex>(a - 1), static_cast<Vertex>(c - 1));
    }
    return Graph(n, pairs);
}

// FNV-1a over the canonical text form.
inline std::uint64_t graph_hash(const Graph& g) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_text(g)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace nodal
