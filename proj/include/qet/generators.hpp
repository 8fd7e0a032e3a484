#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qet/graph.hpp"
#include "qet/rng.hpp"

namespace qet {

enum class Family {
    random_regular,    // pairing model, simple graphs only
    dumbbell,          // two complete graphs joined by disjoint bridges
    regular_dumbbell,  // two random regular halves joined by disjoint bridges
    complete,
    file,
};

inline std::string to_string(Family f) {
    switch (f) {
        case Family::random_regular: return "random-regular";
        case Family::dumbbell: return "dumbbell";
        case Family::regular_dumbbell: return "regular-dumbbell";
        case Family::complete: return "complete";
        case Family::file: return "file";
    }
    return "unknown";
}

inline Family parse_family(const std::string& s) {
    if (s == "random-regular") return Family::random_regular;
    if (s == "dumbbell") return Family::dumbbell;
    if (s == "regular-dumbbell") return Family::regular_dumbbell;
    if (s == "complete") return Family::complete;
    if (s == "file") return Family::file;
    throw std::invalid_argument("unknown graph family '" + s + "'");
}

/// Instance description. For the dumbbell families n is the size of one half.
/// d is the degree after regularization (0 picks the natural maximum degree).
struct GraphSpec {
    Family family = Family::random_regular;
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t bridges = 1;
    std::string path;

    void validate() const {
        switch (family) {
            case Family::random_regular:
                if (n < 2 || d == 0 || d >= n) throw std::invalid_argument("random-regular needs 0 < d < n");
                if ((n * d) % 2 != 0) throw std::invalid_argument("random-regular needs n*d even");
                break;
            case Family::dumbbell:
                if (n < 2) throw std::invalid_argument("dumbbell needs halves of size >= 2");
                if (bridges < 1 || bridges > n) throw std::invalid_argument("dumbbell needs 1 <= bridges <= n_half");
                if (d != 0 && d < n) throw std::invalid_argument("dumbbell degree bound below n_half");
                break;
            case Family::regular_dumbbell:
                if (n < 4 || d < 3 || d >= n) throw std::invalid_argument("regular-dumbbell needs 3 <= d < n_half");
                if ((n * d) % 2 != 0) throw std::invalid_argument("regular-dumbbell needs n_half*d even");
                if (bridges < 1 || 2 * bridges > n) throw std::invalid_argument("regular-dumbbell needs 1 <= bridges <= n_half/2");
                break;
            case Family::complete:
                if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
                if (d != 0 && d < n - 1) throw std::invalid_argument("complete graph degree bound below n-1");
                break;
            case Family::file:
                if (path.empty()) throw std::invalid_argument("file family needs a path");
                break;
        }
    }
};

inline constexpr int kPairingAttempts = 1000;

namespace detail {

/// Pairing (configuration) model with rejection of loops and multi-edges.
inline std::vector<Edge> random_regular_edges(std::size_t n, std::size_t d, Rng& rng) {
    std::vector<Node> points(n * d);
    for (std::size_t i = 0; i < points.size(); ++i) points[i] = static_cast<Node>(i / d);
    std::vector<std::uint64_t> seen;
    for (int attempt = 0; attempt < kPairingAttempts; ++attempt) {
        std::shuffle(points.begin(), points.end(), rng);
        std::vector<Edge> edges;
        edges.reserve(points.size() / 2);
        seen.clear();
        bool simple = true;
        for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
            Node u = points[i], v = points[i + 1];
            if (u == v) {
                simple = false;
                break;
            }
            seen.push_back((std::uint64_t{std::min(u, v)} << 32) | std::max(u, v));
            edges.push_back({u, v});
        }
        if (!simple) continue;
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) continue;
        return edges;
    }
    throw std::runtime_error("pairing model found no simple graph within " +
                             std::to_string(kPairingAttempts) + " attempts");
}

inline std::vector<Edge> complete_edges(std::size_t n, Node offset) {
    std::vector<Edge> edges;
    for (Node u = 0; u < n; ++u)
        for (Node v = u + 1; v < n; ++v) edges.push_back({offset + u, offset + v});
    return edges;
}

}  // namespace detail

inline Graph read_edge_list(std::istream& in, std::optional<std::size_t> pad_to = std::nullopt);

/// Deterministic per (spec, seed).
inline Graph generate(const GraphSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng{splitmix64(seed ^ 0x5eedULL)};
    switch (spec.family) {
        case Family::random_regular: {
            const auto edges = detail::random_regular_edges(spec.n, spec.d, rng);
            return Graph::from_edges(spec.n, edges, spec.d);
        }
        case Family::dumbbell: {
            const std::size_t h = spec.n;
            auto edges = detail::complete_edges(h, 0);
            const auto right = detail::complete_edges(h, static_cast<Node>(h));
            edges.insert(edges.end(), right.begin(), right.end());
            for (Node i = 0; i < spec.bridges; ++i) edges.push_back({i, static_cast<Node>(h + i)});
            const std::size_t d = spec.d == 0 ? h : spec.d;
            return regularize(Graph::from_edges(2 * h, edges), d);
        }
        case Family::regular_dumbbell: {
            const std::size_t h = spec.n;
            auto left = detail::random_regular_edges(h, spec.d, rng);
            auto right = detail::random_regular_edges(h, spec.d, rng);
            for (auto& e : right) {
                e.u += static_cast<Node>(h);
                e.v += static_cast<Node>(h);
            }
            // Each bridge replaces one edge per half: {a,b} and {c,e} become the
            // bridge {a,c}, and b and e are padded with a self-loop. Removed edges
            // are picked greedily with unused endpoints so bridges stay disjoint.
            auto pick = [&](const std::vector<Edge>& half) {
                std::vector<char> used(2 * h, 0);
                std::vector<char> removed(half.size(), 0);
                std::vector<Node> ends;
                for (std::size_t i = 0; i < half.size() && ends.size() < spec.bridges; ++i) {
                    const Edge e = half[i];
                    if (used[e.u] || used[e.v]) continue;
                    used[e.u] = used[e.v] = 1;
                    removed[i] = 1;
                    ends.push_back(e.u);
                }
                if (ends.size() < spec.bridges) throw std::runtime_error("regular-dumbbell: not enough disjoint edges");
                return std::pair{removed, ends};
            };
            const auto [left_removed, left_ends] = pick(left);
            const auto [right_removed, right_ends] = pick(right);
            std::vector<Edge> edges;
            for (std::size_t i = 0; i < left.size(); ++i)
                if (!left_removed[i]) edges.push_back(left[i]);
            for (std::size_t i = 0; i < right.size(); ++i)
                if (!right_removed[i]) edges.push_back(right[i]);
            std::vector<Edge> bridges;
            for (std::size_t i = 0; i < spec.bridges; ++i) bridges.push_back({left_ends[i], right_ends[i]});
            edges.insert(edges.end(), bridges.begin(), bridges.end());
            return regularize(Graph::from_edges(2 * h, edges), spec.d);
        }
        case Family::complete: {
            const auto edges = detail::complete_edges(spec.n, 0);
            const std::size_t d = spec.d == 0 ? spec.n - 1 : spec.d;
            return regularize(Graph::from_edges(spec.n, edges), d);
        }
        case Family::file: {
            std::ifstream in{spec.path};
            if (!in) throw std::runtime_error("cannot open graph file '" + spec.path + "'");
            return read_edge_list(in, spec.d == 0 ? std::nullopt : std::optional<std::size_t>{spec.d});
        }
    }
    throw std::invalid_argument("unhandled graph family");
}

// =============================================================================
// Edge-list text format
// =============================================================================
//
//   n m d
//   u v        (m lines, 0-indexed; "v v" is one self-loop)

inline void write_edge_list(std::ostream& out, const Graph& g) {
    const auto edges = g.edges();
    out << g.node_count() << ' ' << edges.size() << ' ' << g.degree_bound() << '\n';
    for (const Edge& e : edges) out << e.u << ' ' << e.v << '\n';
}

/// Parses the edge-list format; pads every node to pad_to slots when given.
inline Graph read_edge_list(std::istream& in, std::optional<std::size_t> pad_to) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw std::invalid_argument("edge list: missing header");
    std::size_t n = 0, m = 0, d = 0;
    {
        std::istringstream header{line};
        if (!(header >> n >> m >> d)) throw std::invalid_argument("edge list: malformed header '" + line + "'");
    }
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!next_line()) throw std::invalid_argument("edge list: expected " + std::to_string(m) + " edges");
        std::istringstream row{line};
        long long u = -1, v = -1;
        if (!(row >> u >> v) || u < 0 || v < 0 || static_cast<std::size_t>(u) >= n ||
            static_cast<std::size_t>(v) >= n)
            throw std::invalid_argument("edge list: bad edge line '" + line + "'");
        edges.push_back({static_cast<Node>(u), static_cast<Node>(v)});
    }
    std::size_t max_deg = 0;
    {
        std::vector<std::size_t> deg(n, 0);
        for (const Edge& e : edges) {
            ++deg[e.u];
            if (e.u != e.v) ++deg[e.v];
        }
        for (auto x : deg) max_deg = std::max(max_deg, x);
    }
    const std::size_t bound = std::max(d, pad_to.value_or(0));
    if (max_deg > bound)
        throw std::invalid_argument("edge list: degree " + std::to_string(max_deg) +
                                    " exceeds declared bound " + std::to_string(bound));
    Graph g = Graph::from_edges(n, edges, bound);
    if (pad_to) g = regularize(g, *pad_to);
    return g;
}

}  // namespace qet
