#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qet/graph.hpp"
#include "qet/rng.hpp"
#include "qet/walk.hpp"

namespace qet {

// =============================================================================
// Chebyshev truncation of x^t
// =============================================================================
//
// x^t = 2^{1-t} sum_{k = t mod 2} binom(t, (t-k)/2) T_k(x), with the k = 0 term
// halved. The coefficients are the law of |X| for X a sum of t Rademacher signs,
// so the tail beyond D is at most 2 exp(-D^2 / (2t)): truncating at
// D = ceil(sqrt(2 t ln(2/eps))) leaves sup-error at most eps on [-1, 1].

struct ChebExpansion {
    std::size_t t = 0;
    double epsilon = 0.0;
    std::size_t degree = 0;            // D
    std::vector<double> coefficients;  // c_0 .. c_D

    double coefficient_sum() const {
        double s = 0.0;
        for (double c : coefficients) s += std::abs(c);
        return s;
    }

    /// sum_k c_k T_k(x) by forward recurrence.
    double evaluate(double x) const {
        double prev = 1.0, cur = x, acc = coefficients.empty() ? 0.0 : coefficients[0];
        for (std::size_t k = 1; k < coefficients.size(); ++k) {
            acc += coefficients[k] * cur;
            const double next = 2.0 * x * cur - prev;
            prev = cur;
            cur = next;
        }
        return acc;
    }
};

/// Truncation degree min(t, ceil(sqrt(2 t ln(2/eps)))).
inline std::size_t cheb_degree(std::size_t t, double epsilon) {
    if (t == 0) return 0;
    const double raw = std::sqrt(2.0 * static_cast<double>(t) * std::log(2.0 / epsilon));
    return std::min(t, static_cast<std::size_t>(std::ceil(raw)));
}

inline ChebExpansion cheb_coeffs(std::size_t t, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("cheb_coeffs: epsilon must lie in (0,1)");
    ChebExpansion e;
    e.t = t;
    e.epsilon = epsilon;
    e.degree = cheb_degree(t, epsilon);
    e.coefficients.assign(e.degree + 1, 0.0);
    const double td = static_cast<double>(t);
    const double log_half_power = (1.0 - td) * std::log(2.0);
    for (std::size_t k = t % 2; k <= e.degree; k += 2) {
        const double j = static_cast<double>((t - k) / 2);
        const double log_binom = std::lgamma(td + 1.0) - std::lgamma(j + 1.0) - std::lgamma(td - j + 1.0);
        double c = std::exp(log_binom + log_half_power);
        if (k == 0) c *= 0.5;
        e.coefficients[k] = c;
    }
    return e;
}

// =============================================================================
// Fast-forwarding and norm estimation
// =============================================================================

/// sum_k c_k T_k(P) |S> via T_{k+1}(P)v = 2P T_k(P)v - T_{k-1}(P)v, where |S> is
/// the normalized indicator. Within epsilon of P^t |S> in 2-norm since P is
/// symmetric with spectrum in [0, 1].
inline std::vector<double> fast_forward(const Graph& g, const NodeSet& s, std::size_t t, double epsilon) {
    if (!g.is_regular()) throw std::invalid_argument("fast_forward needs a regular graph (symmetric walk)");
    auto start = unit_indicator(g.node_count(), s);
    if (t == 0) return start;
    const ChebExpansion e = cheb_coeffs(t, epsilon);
    const std::size_t n = g.node_count();
    std::vector<double> prev = start, cur(n), next(n), acc(n, 0.0);
    apply_walk(g, prev, cur);  // T_1(P) v = P v
    for (std::size_t i = 0; i < n; ++i) acc[i] = e.coefficients[0] * prev[i];
    if (e.degree >= 1)
        for (std::size_t i = 0; i < n; ++i) acc[i] += e.coefficients[1] * cur[i];
    for (std::size_t k = 2; k <= e.degree; ++k) {
        apply_walk(g, cur, next);
        for (std::size_t i = 0; i < n; ++i) next[i] = 2.0 * next[i] - prev[i];
        const double c = e.coefficients[k];
        if (c != 0.0)
            for (std::size_t i = 0; i < n; ++i) acc[i] += c * next[i];
        prev.swap(cur);
        cur.swap(next);
    }
    return acc;
}

/// Precision n^-2 used when the caller does not choose one.
inline double default_ff_epsilon(std::size_t n) { return 1.0 / (static_cast<double>(n) * static_cast<double>(n)); }

inline std::vector<double> fast_forward(const Graph& g, const NodeSet& s, std::size_t t) {
    return fast_forward(g, s, t, default_ff_epsilon(g.node_count()));
}

/// ||P^t |S>||, the ground truth the estimators are measured against.
inline double norm_exact(const Graph& g, const NodeSet& s, std::size_t t) {
    if (!g.is_regular()) throw std::invalid_argument("norm_exact needs a regular graph");
    auto x = unit_indicator(g.node_count(), s);
    apply_walk_power(g, x, t);
    return norm2(x);
}

enum class Backend { exact, noisy };

inline std::string to_string(Backend b) { return b == Backend::exact ? "exact" : "noisy-model"; }

inline Backend parse_backend(const std::string& s) {
    if (s == "exact") return Backend::exact;
    if (s == "noisy" || s == "noisy-model") return Backend::noisy;
    throw std::invalid_argument("unknown backend '" + s + "'");
}

struct NormEstimate {
    double value = 0.0;
    double eps_prime = 0.0;
    double delta = 0.0;
    Backend backend = Backend::exact;
    std::uint64_t query_cost = 0;        // modeled quantum query units
    std::uint64_t qram_reflections = 0;  // modeled reflections around |S>
    bool failure_branch = false;         // noisy model drew the widened band
};

/// ceil() that ignores representation noise just above an integer, so that
/// e.g. 1/0.05 charges 20 units rather than 21.
inline std::uint64_t ceil_units(double x) {
    return static_cast<std::uint64_t>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

/// Modeled amplitude-estimation cost ceil(sqrt t) ceil(sqrt d) ceil(1/eps')
/// ceil(ln 1/delta), hidden constants set to one.
inline std::uint64_t estimator_query_cost(std::size_t t, std::size_t d, double eps_prime, double delta) {
    return ceil_units(std::sqrt(static_cast<double>(t))) * ceil_units(std::sqrt(static_cast<double>(d))) *
           ceil_units(1.0 / eps_prime) * ceil_units(std::log(1.0 / delta));
}

inline std::uint64_t estimator_reflections(double eps_prime, double delta) {
    return ceil_units(1.0 / eps_prime) * ceil_units(std::log(1.0 / delta));
}

/// One-off QRAM preparation of |S>: |S| ceil(ln n) units.
inline std::uint64_t qram_prep_cost(std::size_t set_size, std::size_t n) {
    return static_cast<std::uint64_t>(set_size) * ceil_units(std::log(static_cast<double>(n)));
}

/// (eps', delta) estimate of ||P^t |S>||. The noisy model adds a uniform error
/// in [-eps', eps'] with probability 1 - delta and in [-4 eps', 4 eps']
/// otherwise, then clamps to [0, 1].
template <class Gen>
NormEstimate estimate_norm(const Graph& g, const NodeSet& s, std::size_t t, double eps_prime, double delta,
                           Backend backend, Gen& rng) {
    if (!(eps_prime > 0.0)) throw std::invalid_argument("estimate_norm: precision must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("estimate_norm: delta must lie in (0,1)");
    NormEstimate out;
    out.eps_prime = eps_prime;
    out.delta = delta;
    out.backend = backend;
    out.query_cost = estimator_query_cost(t, g.degree_bound(), eps_prime, delta);
    out.qram_reflections = estimator_reflections(eps_prime, delta);
    const double truth = norm_exact(g, s, t);
    if (backend == Backend::exact) {
        out.value = truth;
        return out;
    }
    out.failure_branch = uniform_unit(rng) < delta;
    const double width = out.failure_branch ? 4.0 * eps_prime : eps_prime;
    const double noise = std::uniform_real_distribution<double>{-width, width}(rng);
    out.value = std::clamp(truth + noise, 0.0, 1.0);
    return out;
}

}  // namespace qet
