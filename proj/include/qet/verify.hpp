#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qet/esp.hpp"
#include "qet/generators.hpp"
#include "qet/graph.hpp"
#include "qet/qff.hpp"
#include "qet/rational.hpp"
#include "qet/rng.hpp"
#include "qet/testers.hpp"
#include "qet/walk.hpp"

namespace qet {

// =============================================================================
// Property-verification suites
// =============================================================================
//
// Each suite returns one check per property with the measured margin against
// its bound. Exact properties use a 1e-9 tolerance; statistical ones compare
// against the bound widened by three standard errors.

struct PropertyCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<PropertyCheck> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
    }
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::size_t esp_runs = 500;
    std::size_t estimator_calls = 10000;
    std::size_t collision_pairs = 100000;
    std::size_t random_triples = 1000;
};

inline constexpr double kExactTolerance = 1e-9;

namespace detail {

struct NamedGraph {
    std::string name;
    Graph graph;
};

inline std::vector<NamedGraph> random_instances(std::uint64_t seed) {
    std::vector<NamedGraph> out;
    const std::pair<std::size_t, std::size_t> shapes[] = {{16, 3}, {32, 4}, {64, 4}, {128, 3}};
    for (auto [n, d] : shapes) {
        GraphSpec s;
        s.family = Family::random_regular;
        s.n = n;
        s.d = d;
        out.push_back({"random-regular n=" + std::to_string(n) + " d=" + std::to_string(d), generate(s, seed + n)});
    }
    return out;
}

/// Dumbbells paired with their left half {0, ..., n/2 - 1}.
inline std::vector<NamedGraph> dumbbell_instances(std::uint64_t seed) {
    std::vector<NamedGraph> out;
    GraphSpec s;
    s.family = Family::dumbbell;
    s.n = 8;
    s.d = 8;
    out.push_back({"dumbbell K8 d=8", generate(s, seed)});
    s.n = 16;
    s.d = 16;
    out.push_back({"dumbbell K16 d=16", generate(s, seed)});
    s.family = Family::regular_dumbbell;
    s.n = 64;
    s.d = 4;
    out.push_back({"regular-dumbbell 2x64 d=4", generate(s, seed + 1)});
    s.n = 256;
    out.push_back({"regular-dumbbell 2x256 d=4", generate(s, seed + 2)});
    return out;
}

inline NodeSet left_half(const Graph& g) {
    std::vector<Node> side(g.node_count() / 2);
    for (Node v = 0; v < side.size(); ++v) side[v] = v;
    return NodeSet{g, std::move(side)};
}

/// Breadth-first ball of the given size around a random node.
template <class Gen>
NodeSet random_ball(const Graph& g, std::size_t size, Gen& rng) {
    std::vector<char> seen(g.node_count(), 0);
    std::vector<Node> order{static_cast<Node>(uniform_below(rng, g.node_count()))};
    seen[order[0]] = 1;
    for (std::size_t head = 0; head < order.size() && order.size() < size; ++head) {
        for (Node u : g.neighbors(order[head])) {
            if (seen[u] || order.size() >= size) continue;
            seen[u] = 1;
            order.push_back(u);
        }
    }
    return NodeSet{g, std::move(order)};
}

template <class Gen>
NodeSet random_subset(const Graph& g, std::size_t size, Gen& rng) {
    std::vector<Node> all(g.node_count());
    for (Node v = 0; v < all.size(); ++v) all[v] = v;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(size);
    return NodeSet{g, std::move(all)};
}

inline PropertyCheck at_least(std::string name, double measured, double bound, std::string detail = {}) {
    return {std::move(name), measured >= bound, measured, bound, std::move(detail)};
}

inline PropertyCheck at_most(std::string name, double measured, double bound, std::string detail = {}) {
    return {std::move(name), measured <= bound, measured, bound, std::move(detail)};
}

inline double binomial_se(double p, std::size_t trials) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(trials));
}

}  // namespace detail

/// Monte Carlo collision frequency of independent walk pairs against
/// ||P^t e_v||^2. Reports the largest deviation in binomial standard errors.
inline SuiteReport verify_collision(const VerifyOptions& o) {
    SuiteReport r{"collision", {}};
    auto rng = make_rng(o.seed, 0, Stream::verify);
    double worst = 0.0;
    std::string worst_at;
    std::size_t cases = 0;
    auto instances = detail::random_instances(o.seed);
    instances.push_back({"complete K4", generate({Family::complete, 4, 3, 1, {}}, o.seed)});
    for (const auto& [name, g] : instances) {
        for (std::size_t t : {1u, 3u, 8u}) {
            const Node v = static_cast<Node>(uniform_below(rng, g.node_count()));
            const double p = collision_probability(g, v, t);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < o.collision_pairs; ++i)
                hits += lazy_walk_endpoint(g, v, t, rng) == lazy_walk_endpoint(g, v, t, rng);
            const double freq = static_cast<double>(hits) / static_cast<double>(o.collision_pairs);
            const double z = std::abs(freq - p) / std::max(detail::binomial_se(p, o.collision_pairs), 1e-300);
            ++cases;
            if (z > worst) {
                worst = z;
                worst_at = name + " t=" + std::to_string(t);
            }
        }
    }
    r.checks.push_back(detail::at_most("collision frequency within 3 SE of ||P^t e_v||^2", worst, 3.0,
                                       std::to_string(cases) + " cases, worst at " + worst_at));
    return r;
}

/// Norm floors ||P^t u_S|| >= sqrt(|S|/n) and ||w||^2 >= (1 + ||w - u||_1^2)/n on
/// random (graph, set, t) triples.
inline SuiteReport verify_eq1(const VerifyOptions& o) {
    SuiteReport r{"eq1", {}};
    auto rng = make_rng(o.seed, 1, Stream::verify);
    auto graphs = detail::random_instances(o.seed);
    for (auto& x : detail::dumbbell_instances(o.seed)) graphs.push_back(std::move(x));
    double floor_margin = std::numeric_limits<double>::infinity();
    double l1_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < o.random_triples; ++i) {
        const Graph& g = graphs[uniform_below(rng, graphs.size())].graph;
        const std::size_t n = g.node_count();
        const NodeSet s = detail::random_subset(g, 1 + uniform_below(rng, n), rng);
        const std::size_t t = uniform_below(rng, 64);
        auto x = unit_indicator(n, s);
        apply_walk_power(g, x, t);
        floor_margin = std::min(floor_margin, norm2(x) - std::sqrt(static_cast<double>(s.size()) / n));
        const Distribution w = walk_power(g, s, t);
        double l1 = 0.0;
        for (double wi : w.weights) l1 += std::abs(wi - 1.0 / static_cast<double>(n));
        const double nw = w.norm();
        l1_margin = std::min(l1_margin, nw * nw - (1.0 + l1 * l1) / static_cast<double>(n));
    }
    r.checks.push_back(detail::at_least("||P^t u_S|| - sqrt(|S|/n) >= 0", floor_margin, -kExactTolerance));
    r.checks.push_back(detail::at_least("||w||^2 - (1 + ||w-u||_1^2)/n >= 0", l1_margin, -kExactTolerance));
    return r;
}

/// Phi(S)/d <= phi(S) <= Phi(S) for random sets with |S| <= n/2.
inline SuiteReport verify_eq3(const VerifyOptions& o) {
    SuiteReport r{"eq3", {}};
    auto rng = make_rng(o.seed, 2, Stream::verify);
    auto graphs = detail::random_instances(o.seed);
    for (auto& x : detail::dumbbell_instances(o.seed)) graphs.push_back(std::move(x));
    double lower = std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < o.random_triples; ++i) {
        const Graph& g = graphs[uniform_below(rng, graphs.size())].graph;
        const std::size_t size = 1 + uniform_below(rng, g.node_count() / 2);
        const NodeSet s = i % 2 ? detail::random_ball(g, size, rng) : detail::random_subset(g, size, rng);
        const double big = set_expansion(g, s);
        const double small = set_conductance(g, s);
        lower = std::min(lower, small - big / static_cast<double>(g.degree_bound()));
        upper = std::min(upper, big - small);
    }
    r.checks.push_back(detail::at_least("phi(S) - Phi(S)/d >= 0", lower, -kExactTolerance));
    r.checks.push_back(detail::at_least("Phi(S) - phi(S) >= 0", upper, -kExactTolerance));
    return r;
}

/// d(S_{a,b})/d(S) > 1 - a/(2(1-b)) over a grid of (a, b) and sets.
inline SuiteReport verify_lemma1(const VerifyOptions& o) {
    SuiteReport r{"lemma1", {}};
    auto rng = make_rng(o.seed, 3, Stream::verify);
    std::vector<std::pair<const Graph*, NodeSet>> cases;
    const auto dumbbells = detail::dumbbell_instances(o.seed);
    const auto randoms = detail::random_instances(o.seed);
    for (const auto& x : dumbbells) cases.emplace_back(&x.graph, detail::left_half(x.graph));
    for (const auto& x : randoms)
        for (int k = 0; k < 4; ++k) {
            const std::size_t size = 1 + uniform_below(rng, x.graph.node_count() / 2);
            cases.emplace_back(&x.graph, detail::random_ball(x.graph, size, rng));
        }
    const double alphas[] = {1.0 / 40.0, 1.0 / 30.0, 1.0 / 20.0, 1.0 / 10.0, 1.0 / 4.0, 1.0};
    const double betas[] = {0.5, 0.75, 0.9, 39.0 / 40.0};
    double margin = std::numeric_limits<double>::infinity();
    std::size_t tested = 0;
    for (const auto& [g, s] : cases) {
        if (cut_stats(*g, s).cut_edges == 0) continue;
        for (double a : alphas)
            for (double b : betas) {
                const double bound = 1.0 - a / (2.0 * (1.0 - b));
                if (bound <= 0.0) continue;
                const NodeSet core = diffusion_core(*g, s, {a, b});
                const double ratio =
                    static_cast<double>(core.total_degree()) / static_cast<double>(s.total_degree());
                margin = std::min(margin, ratio - bound);
                ++tested;
            }
    }
    PropertyCheck c = detail::at_least("min d(S_ab)/d(S) - (1 - a/(2(1-b)))", margin, 0.0,
                                       std::to_string(tested) + " (set, a, b) cases");
    c.passed = margin > 0.0;
    r.checks.push_back(c);
    return r;
}

/// Inner core S' = S_{1/30,39/40}: d(S') > d(S)/3 and every v in S' stays in
/// S_d for floor(1/(120 phi(S))) steps with probability >= 9/10.
inline SuiteReport verify_lemma2(const VerifyOptions& o) {
    SuiteReport r{"lemma2", {}};
    std::vector<detail::NamedGraph> graphs = detail::dumbbell_instances(o.seed);
    GraphSpec big;
    big.family = Family::dumbbell;
    big.n = 64;
    big.d = 64;
    graphs.push_back({"dumbbell K64 d=64", generate(big, o.seed)});
    double size_margin = std::numeric_limits<double>::infinity();
    double stay_min = std::numeric_limits<double>::infinity();
    std::size_t tested = 0;
    for (const auto& [name, g] : graphs) {
        const NodeSet s = detail::left_half(g);
        const std::size_t horizon = core_horizon(g, s, 1.0 / 120.0);
        if (horizon < 1) continue;
        ++tested;
        const NodeSet core = diffusion_core(g, s, kCanonicalCore);
        const NodeSet inner = diffusion_core(g, s, kInnerCore);
        size_margin = std::min(size_margin, static_cast<double>(inner.total_degree()) -
                                                static_cast<double>(s.total_degree()) / 3.0);
        if (inner.empty()) continue;
        const auto stays = stay_probabilities(g, core, horizon);
        for (Node v : inner.members()) {
            const auto it = std::lower_bound(core.members().begin(), core.members().end(), v);
            stay_min = std::min(stay_min, stays[static_cast<std::size_t>(it - core.members().begin())]);
        }
    }
    const std::string detail = std::to_string(tested) + " instances with horizon >= 1";
    PropertyCheck size = detail::at_least("min d(S') - d(S)/3", size_margin, 0.0, detail);
    size.passed = tested > 0 && size_margin > 0.0;
    r.checks.push_back(size);
    r.checks.push_back(detail::at_least("min stay probability in S_d from S'", stay_min, 0.9 - kExactTolerance, detail));
    return r;
}

/// ||P^t w||^2 >= (1 + 4(3g/4 - (1+eps)/2)^2)/n for distributions w with
/// g-overlap on the core of a low-expansion half A, t <= 1/(40 Phi(A)).
inline SuiteReport verify_lemma3(const VerifyOptions& o) {
    SuiteReport r{"lemma3", {}};
    const double eps = 1.0 / 16.0;
    double margin = std::numeric_limits<double>::infinity();
    std::size_t tested = 0;
    for (const auto& [name, g] : detail::dumbbell_instances(o.seed)) {
        const std::size_t n = g.node_count();
        const NodeSet a = detail::left_half(g);
        const NodeSet core = diffusion_core(g, a, kCanonicalCore);
        if (core.empty()) continue;
        const std::size_t t_max =
            static_cast<std::size_t>(std::floor(1.0 / (40.0 * set_expansion(g, a)) + kFloorSlack));
        for (double gamma : {0.75, 0.875, 1.0}) {
            if (!(gamma > 2.0 * (1.0 + eps) / 3.0)) continue;
            // gamma mass spread on the core, the rest on the other half.
            Distribution w{std::vector<double>(n, 0.0)};
            for (Node v : core.members()) w.weights[v] += gamma / static_cast<double>(core.size());
            for (Node v = static_cast<Node>(n / 2); v < n; ++v)
                w.weights[v] += (1.0 - gamma) / static_cast<double>(n - n / 2);
            const double x = 3.0 * gamma / 4.0 - (1.0 + eps) / 2.0;
            const double bound = (1.0 + 4.0 * x * x) / static_cast<double>(n);
            for (std::size_t t = 0; t <= t_max; ++t) {
                const double nn = w.norm();
                margin = std::min(margin, nn * nn - bound);
                ++tested;
                w = walk_step(g, w);
            }
        }
    }
    r.checks.push_back(detail::at_least("min ||P^t w||^2 - (1 + 4(3g/4 - (1+eps)/2)^2)/n", margin,
                                        -kExactTolerance, std::to_string(tested) + " (instance, g, t) cases"));
    return r;
}

/// Kernel rows along ESP paths: sum K = sum K^ = 1, K^(S, empty) = 0,
/// sum K d(S') = d(S), and the candidates are nested, all in exact rationals.
inline SuiteReport verify_martingale(const VerifyOptions& o, std::size_t rows = 10000) {
    SuiteReport r{"martingale", {}};
    auto rng = make_rng(o.seed, 4, Stream::verify);
    auto graphs = detail::random_instances(o.seed);
    for (auto& x : detail::dumbbell_instances(o.seed)) graphs.push_back(std::move(x));
    std::size_t checked = 0, bad_sum = 0, bad_hat = 0, bad_mart = 0, bad_nest = 0;
    Rational worst_dev{0};
    while (checked < rows) {
        const Graph& g = graphs[uniform_below(rng, graphs.size())].graph;
        EspState state = EspState::start(g, static_cast<Node>(uniform_below(rng, g.node_count())));
        for (int step = 0; step < 12 && checked < rows; ++step) {
            const KernelRow row = kernel_row(g, state.current);
            Rational k_sum{0}, hat_sum{0}, mart{0};
            for (const auto& c : row.candidates) {
                k_sum += c.k;
                hat_sum += c.k_hat;
                mart += c.k * Rational{static_cast<std::int64_t>(c.volume)};
                if (c.empty && c.k_hat != Rational{0}) ++bad_hat;
            }
            for (std::size_t i = 1; i < row.candidates.size(); ++i)
                if (row.candidates[i].size < row.candidates[i - 1].size ||
                    row.candidates[i].prefix < row.candidates[i - 1].prefix)
                    ++bad_nest;
            bad_sum += (k_sum != Rational{1}) || (hat_sum != Rational{1});
            const Rational dev = mart - Rational{static_cast<std::int64_t>(row.volume)};
            if (dev != Rational{0}) {
                ++bad_mart;
                const Rational mag = dev < Rational{0} ? Rational{0} - dev : dev;
                if (mag > worst_dev) worst_dev = mag;
            }
            ++checked;
            state = esp_step(g, state, rng, true);
            if (state.current.size() == g.node_count()) break;
        }
    }
    const std::string detail = std::to_string(checked) + " rows";
    r.checks.push_back(detail::at_most("rows with sum K != 1 or sum K^ != 1", static_cast<double>(bad_sum), 0.0, detail));
    r.checks.push_back(detail::at_most("rows with K^(S, empty) != 0", static_cast<double>(bad_hat), 0.0, detail));
    r.checks.push_back(detail::at_most("max |sum K d(S') - d(S)|", worst_dev.to_double(), 0.0,
                                       std::to_string(bad_mart) + " deviating rows of " + detail));
    r.checks.push_back(detail::at_most("rows with non-nested candidates", static_cast<double>(bad_nest), 0.0, detail));
    return r;
}

namespace detail {

struct EspSample {
    double ratio = 0.0;         // cost_tau / d(S_tau)
    double min_conductance = 0.0;  // min over t < T
};

/// Runs of the biased ESP with tau bounded by T, started from uniform nodes.
inline std::vector<EspSample> esp_samples(const Graph& g, std::size_t T, std::size_t runs, Rng& rng) {
    EvolvingSetProcess process{g};
    StoppingRule rule;
    rule.max_steps = T;
    rule.theta = 0.0;
    std::vector<EspSample> out;
    out.reserve(runs);
    for (std::size_t i = 0; i < runs; ++i) {
        double min_phi = std::numeric_limits<double>::infinity();
        EspRunOptions opts;
        opts.observer = [&](const EvolvingSetProcess& p) {
            if (p.step() < T) min_phi = std::min(min_phi, p.conductance());
        };
        const auto tr = run_esp(process, static_cast<Node>(uniform_below(rng, g.node_count())), rule, rng, opts);
        out.push_back({static_cast<double>(tr.final_cost) / static_cast<double>(tr.final_set.total_degree()), min_phi});
    }
    return out;
}

inline std::vector<NamedGraph> esp_instances(std::uint64_t seed) {
    std::vector<NamedGraph> out;
    GraphSpec s;
    s.family = Family::random_regular;
    s.n = 256;
    s.d = 4;
    out.push_back({"random-regular n=256 d=4", generate(s, seed)});
    s.family = Family::regular_dumbbell;
    s.n = 128;
    out.push_back({"regular-dumbbell 2x128 d=4", generate(s, seed)});
    s.family = Family::dumbbell;
    s.n = 16;
    s.d = 16;
    out.push_back({"dumbbell K16 d=16", generate(s, seed)});
    return out;
}

}  // namespace detail

/// Mean cost_tau/d(S_tau) <= 1 + 4 sqrt(T ln m) within three standard errors.
inline SuiteReport verify_lemma8(const VerifyOptions& o) {
    SuiteReport r{"lemma8", {}};
    auto rng = make_rng(o.seed, 5, Stream::verify);
    for (const auto& [name, g] : detail::esp_instances(o.seed)) {
        for (std::size_t T : {10u, 100u}) {
            const auto samples = detail::esp_samples(g, T, o.esp_runs, rng);
            double mean = 0.0, sq = 0.0;
            for (const auto& s : samples) mean += s.ratio;
            mean /= static_cast<double>(samples.size());
            for (const auto& s : samples) sq += (s.ratio - mean) * (s.ratio - mean);
            const double se = std::sqrt(sq / static_cast<double>(samples.size() - 1) / static_cast<double>(samples.size()));
            const double bound = 1.0 + 4.0 * std::sqrt(static_cast<double>(T) * std::log(static_cast<double>(g.edge_count())));
            std::ostringstream d;
            d << name << " T=" << T << " runs=" << samples.size() << " se=" << se;
            r.checks.push_back(detail::at_most("mean cost/d(S_tau) vs 1 + 4 sqrt(T ln m) + 3 SE", mean, bound + 3.0 * se, d.str()));
        }
    }
    return r;
}

/// Pr(min_{t<T} phi(S_t) <= 2 sqrt(4 ln m / T)) >= 3/4 within three SE.
inline SuiteReport verify_lemma10(const VerifyOptions& o) {
    SuiteReport r{"lemma10", {}};
    auto rng = make_rng(o.seed, 6, Stream::verify);
    for (const auto& [name, g] : detail::esp_instances(o.seed)) {
        const double log_m = std::log(static_cast<double>(g.edge_count()));
        // T above 16 ln m keeps the threshold below one.
        const std::size_t T = static_cast<std::size_t>(std::ceil(64.0 * log_m));
        const double threshold = 2.0 * std::sqrt(4.0 * log_m / static_cast<double>(T));
        const auto samples = detail::esp_samples(g, T, o.esp_runs, rng);
        std::size_t hits = 0;
        for (const auto& s : samples) hits += s.min_conductance <= threshold;
        const double freq = static_cast<double>(hits) / static_cast<double>(samples.size());
        const double se = detail::binomial_se(0.75, samples.size());
        std::ostringstream d;
        d << name << " T=" << T << " threshold=" << threshold;
        r.checks.push_back(detail::at_least("frequency vs 3/4 - 3 SE", freq, 0.75 - 3.0 * se, d.str()));
    }
    return r;
}

/// With p = Pr(tau_v(S^c) <= T) computed exactly, the frequency of
/// min_{t<=T} d(S_t n S)/d(S_t) >= 1 - b p is at least 1 - 1/b within three SE.
inline SuiteReport verify_lemma9(const VerifyOptions& o) {
    SuiteReport r{"lemma9", {}};
    auto rng = make_rng(o.seed, 7, Stream::verify);
    for (const auto& [name, g] : detail::esp_instances(o.seed)) {
        if (name.find("dumbbell") == std::string::npos) continue;
        const NodeSet s = detail::left_half(g);
        const auto in = s.mask(g.node_count());
        for (std::size_t T : {4u, 32u}) {
            const Node v = s.members()[s.size() - 1];  // a node away from the bridges
            const double p = 1.0 - stay_probability(g, s, v, T);
            for (double beta : {2.0, 4.0}) {
                const double floor = 1.0 - beta * p;
                EvolvingSetProcess process{g};
                StoppingRule rule;
                rule.max_steps = T;
                rule.theta = 0.0;
                std::size_t hits = 0;
                for (std::size_t i = 0; i < o.esp_runs; ++i) {
                    double worst = 1.0;
                    EspRunOptions opts;
                    opts.observer = [&](const EvolvingSetProcess& proc) {
                        std::size_t inside = 0;
                        for (Node u : proc.members()) inside += in[u] ? g.degree(u) : 0;
                        worst = std::min(worst, static_cast<double>(inside) / static_cast<double>(proc.volume()));
                    };
                    run_esp(process, v, rule, rng, opts);
                    hits += worst >= floor;
                }
                const double freq = static_cast<double>(hits) / static_cast<double>(o.esp_runs);
                const double target = 1.0 - 1.0 / beta;
                std::ostringstream d;
                d << name << " T=" << T << " p=" << p << " beta=" << beta;
                r.checks.push_back(detail::at_least("frequency vs 1 - 1/b - 3 SE", freq,
                                                    target - 3.0 * detail::binomial_se(target, o.esp_runs), d.str()));
            }
        }
    }
    return r;
}

/// Chebyshev truncation: grid sup-error <= eps, sum |c_k| <= 1, D <= t and
/// D <= ceil(sqrt(2 t ln(2/eps))), and fast_forward within eps of P^t u_S.
inline SuiteReport verify_chebyshev(const VerifyOptions& o) {
    SuiteReport r{"chebyshev", {}};
    double worst_grid = 0.0, worst_sum = 0.0, worst_ff = 0.0;
    std::size_t degree_violations = 0;
    for (std::size_t t : {1u, 2u, 7u, 50u, 100u, 500u, 2000u})
        for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
            const ChebExpansion e = cheb_coeffs(t, eps);
            const double bound = std::ceil(std::sqrt(2.0 * static_cast<double>(t) * std::log(2.0 / eps)));
            if (e.degree > t || static_cast<double>(e.degree) > bound) ++degree_violations;
            worst_sum = std::max(worst_sum, e.coefficient_sum());
            for (int i = 0; i <= 1000; ++i) {
                const double x = -1.0 + 2.0 * i / 1000.0;
                worst_grid = std::max(worst_grid, (std::abs(std::pow(x, static_cast<double>(t)) - e.evaluate(x))) / eps);
            }
        }
    auto rng = make_rng(o.seed, 8, Stream::verify);
    auto graphs = detail::random_instances(o.seed);
    for (auto& x : detail::dumbbell_instances(o.seed)) graphs.push_back(std::move(x));
    for (const auto& [name, g] : graphs)
        for (std::size_t t : {0u, 5u, 100u, 500u})
            for (double eps : {1e-3, 1e-6, 1e-8}) {
                const NodeSet s = detail::random_ball(g, 1 + uniform_below(rng, g.node_count() / 2), rng);
                const auto approx = fast_forward(g, s, t, eps);
                auto exact = unit_indicator(g.node_count(), s);
                apply_walk_power(g, exact, t);
                for (std::size_t i = 0; i < exact.size(); ++i) exact[i] -= approx[i];
                worst_ff = std::max(worst_ff, norm2(exact) / eps);
            }
    r.checks.push_back(detail::at_most("max grid sup-error / eps", worst_grid, 1.0 + kExactTolerance));
    r.checks.push_back(detail::at_most("max sum |c_k|", worst_sum, 1.0 + kExactTolerance));
    r.checks.push_back(detail::at_most("degree bound violations", static_cast<double>(degree_violations), 0.0));
    r.checks.push_back(detail::at_most("max ||fast_forward - P^t u_S|| / eps", worst_ff, 1.0 + kExactTolerance));
    return r;
}

/// Noisy-model within-eps' rate >= 1 - delta within three SE.
inline SuiteReport verify_estimator(const VerifyOptions& o) {
    SuiteReport r{"estimator", {}};
    auto rng = make_rng(o.seed, 9, Stream::verify);
    GraphSpec spec;
    spec.family = Family::random_regular;
    spec.n = 64;
    spec.d = 4;
    const Graph g = generate(spec, o.seed);
    const NodeSet s = detail::random_ball(g, 8, rng);
    for (double delta : {0.01, 0.1}) {
        const double eps_prime = 0.01;
        const double truth = norm_exact(g, s, 20);
        std::size_t within = 0;
        for (std::size_t i = 0; i < o.estimator_calls; ++i) {
            const auto e = estimate_norm(g, s, 20, eps_prime, delta, Backend::noisy, rng);
            within += std::abs(e.value - truth) <= eps_prime;
        }
        const double freq = static_cast<double>(within) / static_cast<double>(o.estimator_calls);
        const double target = 1.0 - delta;
        std::ostringstream d;
        d << "delta=" << delta << " calls=" << o.estimator_calls;
        r.checks.push_back(detail::at_least("within-eps' rate vs 1 - delta - 3 SE", freq,
                                            target - 3.0 * detail::binomial_se(target, o.estimator_calls), d.str()));
    }
    return r;
}

// =============================================================================
// Seed-set guarantee
// =============================================================================

struct SeedSetExperiment {
    std::size_t degree = 0;
    double gamma = 0.0;
    double premise = 0.0;     // gamma^2 / (480 alpha ln m)
    double conductance = 0.0;  // phi of the left half
    std::size_t inner_core = 0;
    std::size_t runs = 0;
    std::size_t successes = 0;
    std::map<StopReason, std::size_t> stops;

    double frequency() const { return runs == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(runs); }
};

/// Two K_64 joined by one bridge and padded to the given degree. Runs the
/// seed-set ESP from inner-core nodes of the left half and counts the event
/// {d(S n S_d)/d(S) >= 3/4 and (phi(S) <= gamma or d(S) >= M)}. A gamma <= 0
/// picks the smallest gamma meeting the premise, sqrt(480 alpha ln m phi(A)).
inline SeedSetExperiment seed_set_experiment(std::size_t degree, double gamma, double volume_target,
                                             std::size_t runs, std::uint64_t seed) {
    GraphSpec spec;
    spec.family = Family::dumbbell;
    spec.n = 64;
    spec.d = degree;
    const Graph g = generate(spec, seed);
    const NodeSet a = detail::left_half(g);
    SeedSetParams params;
    if (gamma <= 0.0)
        gamma = std::sqrt(480.0 * params.alpha * std::log(static_cast<double>(g.edge_count())) * set_conductance(g, a));
    params.gamma = gamma;
    params.volume_target = volume_target;
    SeedSetExperiment out;
    out.degree = degree;
    out.gamma = gamma;
    out.premise = params.premise_conductance(g.edge_count());
    out.conductance = set_conductance(g, a);
    const NodeSet core = diffusion_core(g, a, kCanonicalCore);
    const NodeSet inner = diffusion_core(g, a, kInnerCore);
    out.inner_core = inner.size();
    if (inner.empty()) return out;
    const auto core_mask = core.mask(g.node_count());
    auto rng = make_rng(seed, degree, Stream::esp);
    EvolvingSetProcess process{g};
    const StoppingRule rule = params.rule(g.edge_count());
    for (std::size_t i = 0; i < runs; ++i) {
        const Node v = inner.members()[uniform_below(rng, inner.size())];
        ++out.stops[run_esp(process, v, rule, rng).reason];
        std::size_t overlap = 0;
        for (Node u : process.members()) overlap += core_mask[u] ? g.degree(u) : 0;
        const bool overlapping = 4 * overlap >= 3 * process.volume();
        const bool target = process.conductance() <= gamma ||
                            static_cast<double>(process.volume()) >= volume_target;
        ++out.runs;
        out.successes += overlapping && target;
    }
    return out;
}

/// Smallest padding degree for which gamma = 1 meets the premise on the K_64
/// dumbbell: phi(A) = 1/(64 d) <= 1/(2400 ln m).
inline std::size_t seed_set_premise_degree() {
    for (std::size_t d = 64;; ++d) {
        const std::size_t m = 2 * (64 * 63 / 2) + 1 + 128 * (d - 63) - 2;
        if (2400.0 * std::log(static_cast<double>(m)) <= 64.0 * static_cast<double>(d)) return d;
    }
}

inline SuiteReport verify_seedset(const VerifyOptions& o) {
    SuiteReport r{"seedset", {}};
    const std::size_t d = seed_set_premise_degree();
    const auto e = seed_set_experiment(d, 0.0, 64.0 * static_cast<double>(d) / 2.0, o.esp_runs, o.seed);
    const double se = detail::binomial_se(0.2, std::max<std::size_t>(e.runs, 1));
    std::ostringstream det;
    det << "K64 dumbbell d=" << d << " gamma=" << e.gamma << " phi(A)=" << e.conductance << " premise=" << e.premise
        << " inner core=" << e.inner_core << " runs=" << e.runs;
    PropertyCheck c = detail::at_least("success frequency vs 1/5 - 3 SE", e.frequency(), 0.2 - 3.0 * se, det.str());
    c.passed = c.passed && e.conductance <= e.premise + kExactTolerance && e.runs > 0;
    r.checks.push_back(c);
    return r;
}

// =============================================================================
// Dispatch
// =============================================================================

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"collision", "eq1",    "eq3",       "lemma1",     "lemma2",
                                                "lemma3",    "lemma8", "lemma9",    "lemma10",    "martingale",
                                                "chebyshev", "estimator", "seedset"};
    return names;
}

inline SuiteReport run_suite(const std::string& name, const VerifyOptions& o) {
    if (name == "collision") return verify_collision(o);
    if (name == "eq1") return verify_eq1(o);
    if (name == "eq3") return verify_eq3(o);
    if (name == "lemma1") return verify_lemma1(o);
    if (name == "lemma2") return verify_lemma2(o);
    if (name == "lemma3") return verify_lemma3(o);
    if (name == "lemma8") return verify_lemma8(o);
    if (name == "lemma9") return verify_lemma9(o);
    if (name == "lemma10") return verify_lemma10(o);
    if (name == "martingale") return verify_martingale(o);
    if (name == "chebyshev") return verify_chebyshev(o);
    if (name == "estimator") return verify_estimator(o);
    if (name == "seedset") return verify_seedset(o);
    throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace qet
