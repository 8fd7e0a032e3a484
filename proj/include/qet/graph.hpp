#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qet {

using Node = std::uint32_t;

struct Edge {
    Node u;
    Node v;
};

// =============================================================================
// Graph
// =============================================================================
//
// Undirected multigraph with a degree bound d. Every node owns an ordered list
// of neighbor slots; a non-loop edge {u,v} occupies one slot at u and one at v,
// a self-loop occupies a single slot at its node and counts once towards m.
// After regularization every node has exactly d slots and the lazy random walk
// is symmetric.
class Graph {
public:
    Graph() = default;

    /// Builds from explicit slot lists. Throws std::invalid_argument when an id
    /// is out of range, a node exceeds the degree bound, or the non-loop slots
    /// are not symmetric.
    static Graph from_adjacency(const std::vector<std::vector<Node>>& adjacency,
                                std::size_t degree_bound) {
        Graph g;
        g.n_ = adjacency.size();
        g.d_ = degree_bound;
        g.offsets_.assign(g.n_ + 1, 0);
        g.loops_.assign(g.n_, 0);
        std::size_t loops = 0;
        std::size_t slots = 0;
        for (std::size_t v = 0; v < g.n_; ++v) {
            if (adjacency[v].size() > degree_bound)
                throw std::invalid_argument("node " + std::to_string(v) + " exceeds degree bound");
            g.offsets_[v + 1] = g.offsets_[v] + adjacency[v].size();
            for (Node u : adjacency[v]) {
                if (u >= g.n_) throw std::invalid_argument("neighbor id out of range");
                if (u == v) ++g.loops_[v];
            }
            loops += g.loops_[v];
            slots += adjacency[v].size();
        }
        g.slots_.reserve(slots);
        for (const auto& list : adjacency) g.slots_.insert(g.slots_.end(), list.begin(), list.end());
        g.m_ = (slots - loops) / 2 + loops;
        g.regular_ = slots == g.n_ * g.d_;
        if (!g.symmetric()) throw std::invalid_argument("adjacency is not symmetric");
        return g;
    }

    /// Builds from an edge list; "v v" is one self-loop slot. A degree bound of
    /// zero means "use the maximum degree".
    static Graph from_edges(std::size_t n, std::span<const Edge> edges, std::size_t degree_bound = 0) {
        std::vector<std::vector<Node>> adjacency(n);
        for (const Edge& e : edges) {
            if (e.u >= n || e.v >= n) throw std::invalid_argument("edge endpoint out of range");
            adjacency[e.u].push_back(e.v);
            if (e.u != e.v) adjacency[e.v].push_back(e.u);
        }
        if (degree_bound == 0) {
            for (const auto& list : adjacency) degree_bound = std::max(degree_bound, list.size());
        }
        return from_adjacency(adjacency, degree_bound);
    }

    std::size_t node_count() const { return n_; }
    std::size_t degree_bound() const { return d_; }
    std::size_t edge_count() const { return m_; }

    std::size_t degree(Node v) const { return offsets_[v + 1] - offsets_[v]; }
    std::size_t self_loops(Node v) const { return loops_[v]; }

    std::span<const Node> neighbors(Node v) const {
        return {slots_.data() + offsets_[v], slots_.data() + offsets_[v + 1]};
    }

    std::size_t max_degree() const {
        std::size_t best = 0;
        for (Node v = 0; v < n_; ++v) best = std::max(best, degree(v));
        return best;
    }

    bool is_regular() const { return regular_; }

    std::vector<std::vector<Node>> adjacency() const {
        std::vector<std::vector<Node>> out(n_);
        for (Node v = 0; v < n_; ++v) out[v].assign(neighbors(v).begin(), neighbors(v).end());
        return out;
    }

    /// Canonical edge list: each non-loop edge once from its smaller endpoint,
    /// each self-loop slot once, in slot order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(m_);
        for (Node v = 0; v < n_; ++v)
            for (Node u : neighbors(v))
                if (v <= u) out.push_back({v, u});
        return out;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.d_ == b.d_ && a.offsets_ == b.offsets_ && a.slots_ == b.slots_;
    }

    /// FNV-1a over (n, d, slot lists).
    std::uint64_t fingerprint() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t x) {
            for (int i = 0; i < 8; ++i) {
                h ^= (x >> (8 * i)) & 0xffU;
                h *= 0x100000001b3ULL;
            }
        };
        mix(n_);
        mix(d_);
        for (std::size_t o : offsets_) mix(o);
        for (Node s : slots_) mix(s);
        return h;
    }

private:
    bool symmetric() const {
        // Sorted (min, max) multiset of non-loop slot endpoints must pair up.
        std::vector<std::pair<Node, Node>> forward;
        forward.reserve(slots_.size());
        for (Node v = 0; v < n_; ++v)
            for (Node u : neighbors(v))
                if (u != v) forward.emplace_back(v, u);
        std::vector<std::pair<Node, Node>> backward;
        backward.reserve(forward.size());
        for (auto [a, b] : forward) backward.emplace_back(b, a);
        std::sort(forward.begin(), forward.end());
        std::sort(backward.begin(), backward.end());
        return forward == backward;
    }

    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::size_t m_ = 0;
    bool regular_ = true;
    std::vector<std::size_t> offsets_{0};
    std::vector<Node> slots_;
    std::vector<std::size_t> loops_;
};

// =============================================================================
// NodeSet
// =============================================================================

/// Sorted, duplicate-free node subset with its total degree d(S).
class NodeSet {
public:
    NodeSet() = default;

    NodeSet(const Graph& g, std::vector<Node> members) : members_{std::move(members)} {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
        for (Node v : members_) {
            if (v >= g.node_count()) throw std::invalid_argument("NodeSet member out of range");
            total_degree_ += g.degree(v);
        }
    }

    static NodeSet all(const Graph& g) {
        std::vector<Node> members(g.node_count());
        std::iota(members.begin(), members.end(), Node{0});
        return NodeSet{g, std::move(members)};
    }

    static NodeSet singleton(const Graph& g, Node v) { return NodeSet{g, {v}}; }

    std::span<const Node> members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    std::size_t total_degree() const { return total_degree_; }

    bool contains(Node v) const { return std::binary_search(members_.begin(), members_.end(), v); }

    /// Dense 0/1 membership vector of length n.
    std::vector<char> mask(std::size_t n) const {
        std::vector<char> m(n, 0);
        for (Node v : members_) m[v] = 1;
        return m;
    }

    friend bool operator==(const NodeSet& a, const NodeSet& b) { return a.members_ == b.members_; }

private:
    std::vector<Node> members_;
    std::size_t total_degree_ = 0;
};

inline NodeSet set_intersection(const Graph& g, const NodeSet& a, const NodeSet& b) {
    std::vector<Node> out;
    std::set_intersection(a.members().begin(), a.members().end(), b.members().begin(),
                          b.members().end(), std::back_inserter(out));
    return NodeSet{g, std::move(out)};
}

// =============================================================================
// QueryLedger
// =============================================================================

/// Per-trial query accounting: classical oracle queries plus modeled quantum
/// query units and modeled QRAM operations.
struct QueryLedger {
    std::uint64_t uniform_node = 0;
    std::uint64_t degree = 0;
    std::uint64_t neighbor = 0;
    std::uint64_t quantum_queries = 0;
    std::uint64_t qram_prep = 0;
    std::uint64_t qram_reflections = 0;

    std::uint64_t classical() const { return uniform_node + degree + neighbor; }
    std::uint64_t qram() const { return qram_prep + qram_reflections; }
    std::uint64_t total() const { return classical() + quantum_queries + qram(); }

    QueryLedger& operator+=(const QueryLedger& o) {
        uniform_node += o.uniform_node;
        degree += o.degree;
        neighbor += o.neighbor;
        quantum_queries += o.quantum_queries;
        qram_prep += o.qram_prep;
        qram_reflections += o.qram_reflections;
        return *this;
    }

    friend bool operator==(const QueryLedger&, const QueryLedger&) = default;
};

// =============================================================================
// Regularization and cut measures
// =============================================================================

/// Pads every node to exactly d slots with trailing self-loops.
inline Graph regularize(const Graph& g, std::size_t d) {
    if (d < g.max_degree())
        throw std::invalid_argument("degree bound " + std::to_string(d) + " below max degree " +
                                    std::to_string(g.max_degree()));
    auto adjacency = g.adjacency();
    for (Node v = 0; v < adjacency.size(); ++v) adjacency[v].resize(d, v);
    return Graph::from_adjacency(adjacency, d);
}

struct CutStats {
    std::size_t size = 0;            // |S|
    std::size_t volume = 0;          // d(S)
    std::size_t boundary_nodes = 0;  // |dS|, nodes outside S adjacent to S
    std::size_t cut_edges = 0;       // |E(S, S^c)|
};

inline CutStats cut_stats(const Graph& g, const NodeSet& s) {
    const auto in = s.mask(g.node_count());
    std::vector<char> seen(g.node_count(), 0);
    CutStats c;
    c.size = s.size();
    c.volume = s.total_degree();
    for (Node v : s.members()) {
        for (Node u : g.neighbors(v)) {
            if (in[u]) continue;
            ++c.cut_edges;
            if (!seen[u]) {
                seen[u] = 1;
                ++c.boundary_nodes;
            }
        }
    }
    return c;
}

/// Vertex expansion |dS|/|S|. Self-loops never cross the cut.
inline double set_expansion(const Graph& g, const NodeSet& s) {
    if (s.empty() || s.size() == g.node_count())
        throw std::invalid_argument("set_expansion needs a nonempty proper subset");
    const auto c = cut_stats(g, s);
    return static_cast<double>(c.boundary_nodes) / static_cast<double>(c.size);
}

/// Conductance |E(S,S^c)|/d(S), with no volume cap; zero for S = V.
inline double set_conductance(const Graph& g, const NodeSet& s) {
    if (s.empty()) throw std::invalid_argument("set_conductance needs a nonempty set");
    const auto c = cut_stats(g, s);
    if (c.volume == 0) throw std::invalid_argument("set_conductance needs positive volume");
    return static_cast<double>(c.cut_edges) / static_cast<double>(c.volume);
}

inline constexpr std::size_t kBruteforceMaxNodes = 22;

namespace detail {

// Neighbor bitmasks (self-loops dropped) for subset enumeration.
inline std::vector<std::uint32_t> neighbor_masks(const Graph& g) {
    std::vector<std::uint32_t> masks(g.node_count(), 0);
    for (Node v = 0; v < g.node_count(); ++v)
        for (Node u : g.neighbors(v))
            if (u != v) masks[v] |= (1U << u);
    return masks;
}

}  // namespace detail

/// Exact graph vertex expansion min_{1<=|S|<=n/2} |dS|/|S| by enumerating all
/// subsets. Exponential; limited to n <= 22.
inline double expansion_bruteforce(const Graph& g) {
    const std::size_t n = g.node_count();
    if (n > kBruteforceMaxNodes)
        throw std::invalid_argument("expansion_bruteforce limited to n <= 22");
    if (n < 2) throw std::invalid_argument("expansion_bruteforce needs n >= 2");
    const auto adj = detail::neighbor_masks(g);
    const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
    std::vector<std::uint32_t> reach(std::size_t{1} << n, 0);
    std::uint64_t best_num = n, best_den = 1;  // exceeds any attainable ratio
    for (std::uint32_t mask = 1; mask <= full && mask != 0; ++mask) {
        const int low = std::countr_zero(mask);
        reach[mask] = reach[mask & (mask - 1)] | adj[low];
        const auto size = static_cast<std::uint64_t>(std::popcount(mask));
        if (2 * size > n) continue;
        const auto boundary = static_cast<std::uint64_t>(std::popcount(reach[mask] & ~mask & full));
        if (boundary * best_den < best_num * size) {
            best_num = boundary;
            best_den = size;
        }
        if (mask == full) break;
    }
    return static_cast<double>(best_num) / static_cast<double>(best_den);
}

/// Exact graph conductance min |E(S,S^c)|/d(S) over sets holding at most half
/// of the total volume (|S| <= n/2 on regular graphs). Same limits as
/// expansion_bruteforce.
inline double conductance_bruteforce(const Graph& g) {
    const std::size_t n = g.node_count();
    if (n > kBruteforceMaxNodes)
        throw std::invalid_argument("conductance_bruteforce limited to n <= 22");
    const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
    std::uint64_t total_volume = 0;
    for (Node v = 0; v < n; ++v) total_volume += g.degree(v);
    std::uint64_t best_num = 1, best_den = 0;
    bool found = false;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        std::uint64_t volume = 0, cut = 0;
        for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
            const auto v = static_cast<Node>(std::countr_zero(rest));
            volume += g.degree(v);
            for (Node u : g.neighbors(v))
                if (!((mask >> u) & 1U)) ++cut;
        }
        if (volume == 0 || 2 * volume > total_volume) continue;
        if (!found || cut * best_den < best_num * volume) {
            best_num = cut;
            best_den = volume;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("no subset within half the volume");
    return static_cast<double>(best_num) / static_cast<double>(best_den);
}

}  // namespace qet
