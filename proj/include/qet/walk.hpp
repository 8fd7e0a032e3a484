#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "qet/graph.hpp"

namespace qet {

/// Dense nonnegative weights over the nodes. Substochastic vectors are allowed
/// (restricted propagation loses mass).
struct Distribution {
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    double mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
    double norm() const {
        double s = 0.0;
        for (double w : weights) s += w * w;
        return std::sqrt(s);
    }
    double operator[](std::size_t i) const { return weights[i]; }

    static Distribution point(std::size_t n, Node v) {
        Distribution p{std::vector<double>(n, 0.0)};
        p.weights.at(v) = 1.0;
        return p;
    }

    static Distribution uniform(std::size_t n) {
        return Distribution{std::vector<double>(n, 1.0 / static_cast<double>(n))};
    }

    /// Uniform probability distribution on S (1-norm one).
    static Distribution uniform_on(std::size_t n, const NodeSet& s) {
        if (s.empty()) throw std::invalid_argument("uniform_on needs a nonempty set");
        Distribution p{std::vector<double>(n, 0.0)};
        const double w = 1.0 / static_cast<double>(s.size());
        for (Node v : s.members()) p.weights[v] = w;
        return p;
    }
};

/// Normalized indicator |S> = |S|^{-1/2} sum_{v in S} |v>, 2-norm one.
inline std::vector<double> unit_indicator(std::size_t n, const NodeSet& s) {
    if (s.empty()) throw std::invalid_argument("unit_indicator needs a nonempty set");
    std::vector<double> x(n, 0.0);
    const double w = 1.0 / std::sqrt(static_cast<double>(s.size()));
    for (Node v : s.members()) x[v] = w;
    return x;
}

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double w : x) s += w * w;
    return std::sqrt(s);
}

/// out = P x for the lazy walk: half the mass stays, the other half spreads
/// evenly over the slots of its node. out must not alias x.
inline void apply_walk(const Graph& g, std::span<const double> x, std::span<double> out) {
    if (x.size() != g.node_count() || out.size() != g.node_count())
        throw std::invalid_argument("apply_walk: vector length mismatch");
    for (double& o : out) o = 0.0;
    for (Node v = 0; v < g.node_count(); ++v) {
        const double w = x[v];
        if (w == 0.0) continue;
        const auto nbrs = g.neighbors(v);
        if (nbrs.empty()) {
            out[v] += w;
            continue;
        }
        out[v] += 0.5 * w;
        const double share = 0.5 * w / static_cast<double>(nbrs.size());
        for (Node u : nbrs) out[u] += share;
    }
}

/// Applies P t times in place.
inline void apply_walk_power(const Graph& g, std::vector<double>& x, std::size_t t) {
    std::vector<double> scratch(x.size());
    for (std::size_t step = 0; step < t; ++step) {
        apply_walk(g, x, scratch);
        x.swap(scratch);
    }
}

inline Distribution walk_step(const Graph& g, const Distribution& p) {
    if (p.size() != g.node_count()) throw std::invalid_argument("walk_step: length mismatch");
    Distribution out{std::vector<double>(p.size())};
    apply_walk(g, p.weights, out.weights);
    return out;
}

/// P^t applied to the uniform distribution on start.
inline Distribution walk_power(const Graph& g, const NodeSet& start, std::size_t t) {
    Distribution p = Distribution::uniform_on(g.node_count(), start);
    apply_walk_power(g, p.weights, t);
    return p;
}

/// ||P^t e_v||^2, the probability that two independent t-step walks from v
/// end on the same node.
inline double collision_probability(const Graph& g, Node v, std::size_t t) {
    if (v >= g.node_count()) throw std::invalid_argument("collision_probability: node out of range");
    Distribution p = Distribution::point(g.node_count(), v);
    apply_walk_power(g, p.weights, t);
    const double r = p.norm();
    return r * r;
}

/// Pr(tau_v(S^c) > t): total mass of (P_S)^t e_v, P restricted to S.
inline double stay_probability(const Graph& g, const NodeSet& s, Node v, std::size_t t) {
    if (!s.contains(v)) throw std::invalid_argument("stay_probability: start node not in S");
    const auto in = s.mask(g.node_count());
    std::vector<double> x(g.node_count(), 0.0), next(g.node_count());
    x[v] = 1.0;
    for (std::size_t step = 0; step < t; ++step) {
        apply_walk(g, x, next);
        for (Node u = 0; u < g.node_count(); ++u)
            if (!in[u]) next[u] = 0.0;
        x.swap(next);
    }
    return std::accumulate(x.begin(), x.end(), 0.0);
}

/// Stay probabilities Pr(tau_v(S^c) > t) for every v in S at once, aligned
/// with s.members(). Propagates the indicator of S backwards through the
/// restricted chain: y <- P_S^T y.
inline std::vector<double> stay_probabilities(const Graph& g, const NodeSet& s, std::size_t t) {
    const auto in = s.mask(g.node_count());
    std::vector<double> y(g.node_count(), 0.0), next(g.node_count(), 0.0);
    for (Node v : s.members()) y[v] = 1.0;
    for (std::size_t step = 0; step < t; ++step) {
        for (Node v : s.members()) {
            const auto nbrs = g.neighbors(v);
            if (nbrs.empty()) {
                next[v] = y[v];
                continue;
            }
            double acc = 0.0;
            for (Node u : nbrs)
                if (in[u]) acc += y[u];
            next[v] = 0.5 * y[v] + 0.5 * acc / static_cast<double>(nbrs.size());
        }
        y.swap(next);
    }
    std::vector<double> out;
    out.reserve(s.size());
    for (Node v : s.members()) out.push_back(y[v]);
    return out;
}

struct CoreParams {
    double alpha = 1.0 / 40.0;
    double beta = 3.0 / 4.0;

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("CoreParams: alpha must be positive");
        if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("CoreParams: beta must lie in (0,1)");
    }
};

inline constexpr CoreParams kCanonicalCore{1.0 / 40.0, 3.0 / 4.0};
inline constexpr CoreParams kInnerCore{1.0 / 30.0, 39.0 / 40.0};

// Slack for floor() of quotients that are integers in exact arithmetic and for
// comparing stay probabilities against beta.
inline constexpr double kFloorSlack = 1e-9;
inline constexpr double kProbabilitySlack = 1e-12;

/// floor(scale / phi(S)) with phi(S) = cut/volume; S must have a boundary.
inline std::size_t core_horizon(const Graph& g, const NodeSet& s, double scale) {
    const auto c = cut_stats(g, s);
    if (c.cut_edges == 0) throw std::invalid_argument("diffusion core undefined: S has no boundary edges");
    const double x = scale * static_cast<double>(c.volume) / static_cast<double>(c.cut_edges);
    return static_cast<std::size_t>(std::floor(x + kFloorSlack));
}

/// The (alpha, beta)-diffusion core: nodes of S from which the walk stays in S
/// for floor(alpha / phi(S)) steps with probability at least beta.
inline NodeSet diffusion_core(const Graph& g, const NodeSet& s, CoreParams params) {
    params.validate();
    if (s.empty()) throw std::invalid_argument("diffusion_core needs a nonempty set");
    const std::size_t horizon = core_horizon(g, s, params.alpha);
    const auto stay = stay_probabilities(g, s, horizon);
    std::vector<Node> core;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (stay[i] >= params.beta - kProbabilitySlack) core.push_back(s.members()[i]);
    return NodeSet{g, std::move(core)};
}

}  // namespace qet
