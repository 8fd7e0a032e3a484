// Acceptance run: one PASS/FAIL line per criterion, each with its measured
// values and wall time. Exit status is the number of failed criteria.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qet/esp.hpp"
#include "qet/generators.hpp"
#include "qet/qff.hpp"
#include "qet/scaling.hpp"
#include "qet/testers.hpp"
#include "qet/verify.hpp"
#include "qet/walk.hpp"
#include "support/oracles.hpp"

using namespace qet;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr double kTol = 1e-9;

struct Outcome {
    bool passed = false;
    std::string detail;
};

Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
    return generate({Family::random_regular, n, d, 1, {}}, seed);
}

Graph clique_dumbbell(std::size_t half, std::size_t d) {
    GraphSpec s;
    s.family = Family::dumbbell;
    s.n = half;
    s.d = d;
    return generate(s, 1);
}

Graph regular_dumbbell(std::size_t half, std::size_t d, std::uint64_t seed) {
    GraphSpec s;
    s.family = Family::regular_dumbbell;
    s.n = half;
    s.d = d;
    return generate(s, seed);
}

std::vector<char> left_mask(const Graph& g) {
    std::vector<char> m(g.node_count(), 0);
    for (Node v = 0; v < g.node_count() / 2; ++v) m[v] = 1;
    return m;
}

NodeSet from_mask(const Graph& g, const std::vector<char>& mask) {
    std::vector<Node> members;
    for (Node v = 0; v < mask.size(); ++v)
        if (mask[v]) members.push_back(v);
    return NodeSet{g, members};
}

double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

template <class Body>
void parallel_for(std::size_t count, Body body) {
    const std::size_t threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16u));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(threads, count); ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

/// Dense diffusion core: nodes whose exact stay mass over floor(a vol/cut)
/// steps is at least b.
std::vector<char> oracle_core(const Graph& g, const oracle::Matrix& m, const std::vector<char>& inside, double a,
                              double b) {
    const auto c = oracle::cut_of(g, inside);
    const auto horizon = static_cast<std::size_t>(
        std::floor(a * static_cast<double>(c.volume) / static_cast<double>(c.cut_edges) + 1e-9));
    const auto stay = oracle::stay_masses(m, inside, horizon);
    std::vector<char> core(g.node_count(), 0);
    for (Node v = 0; v < g.node_count(); ++v) core[v] = inside[v] && stay[v] >= b - 1e-12;
    return core;
}

// -----------------------------------------------------------------------------

Outcome collision_identity() {
    const std::size_t pairs = 100000;
    const std::pair<std::size_t, std::size_t> shapes[] = {{16, 3}, {32, 3}, {64, 4}, {128, 4}, {256, 4}};
    struct Case {
        Graph g;
        Node v;
        std::size_t t;
        double z = 0.0;
    };
    std::vector<Case> cases;
    auto rng = make_rng(kSeed, 1, Stream::verify);
    for (int k = 0; k < 20; ++k) {
        const auto [n, d] = shapes[k % 5];
        Graph g = random_regular(n, d, kSeed + static_cast<std::uint64_t>(k));
        const auto v = static_cast<Node>(uniform_below(rng, n));
        const std::size_t t = 1 + uniform_below(rng, 24);
        cases.push_back({std::move(g), v, t});
    }
    parallel_for(cases.size(), [&](std::size_t i) {
        Case& c = cases[i];
        std::vector<double> e(c.g.node_count(), 0.0);
        e[c.v] = 1.0;
        const auto p_t = oracle::power_apply(oracle::transition_matrix(c.g), e, c.t);
        const double p = oracle::norm(p_t) * oracle::norm(p_t);
        auto rng_i = make_rng(kSeed, i, Stream::walks);
        std::size_t hits = 0;
        for (std::size_t j = 0; j < pairs; ++j)
            hits += lazy_walk_endpoint(c.g, c.v, c.t, rng_i) == lazy_walk_endpoint(c.g, c.v, c.t, rng_i);
        c.z = std::abs(static_cast<double>(hits) / pairs - p) / binomial_se(p, pairs);
    });
    double worst = 0.0;
    for (const auto& c : cases) worst = std::max(worst, c.z);
    return {worst <= 3.0, "20 instances x 1e5 pairs, max |freq - ||P^t e_v||^2| = " + fmt(worst) + " SE (bound 3)"};
}

Outcome sandwich_and_norm_floors() {
    std::vector<Graph> graphs{random_regular(16, 3, 1), random_regular(32, 4, 2), random_regular(64, 4, 3),
                              random_regular(128, 3, 4), clique_dumbbell(8, 8), clique_dumbbell(16, 16),
                              regular_dumbbell(32, 4, 5)};
    std::vector<oracle::Matrix> dense;
    for (const auto& g : graphs) dense.push_back(oracle::transition_matrix(g));
    auto rng = make_rng(kSeed, 2, Stream::verify);
    double lower = 1e300, upper = 1e300, floor_margin = 1e300, l1_margin = 1e300, agree = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = uniform_below(rng, graphs.size());
        const Graph& g = graphs[k];
        const std::size_t n = g.node_count();
        std::vector<char> mask(n, 0);
        const std::size_t size = 1 + uniform_below(rng, n / 2);
        std::vector<Node> perm(n);
        for (Node v = 0; v < n; ++v) perm[v] = v;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t j = 0; j < size; ++j) mask[perm[j]] = 1;
        const std::size_t t = uniform_below(rng, 64);

        const auto c = oracle::cut_of(g, mask);
        const double big = static_cast<double>(c.boundary) / static_cast<double>(c.size);
        const double small = static_cast<double>(c.cut_edges) / static_cast<double>(c.volume);
        lower = std::min(lower, small - big / static_cast<double>(g.degree_bound()));
        upper = std::min(upper, big - small);
        const NodeSet s = from_mask(g, mask);
        agree = std::max({agree, std::abs(set_expansion(g, s) - big), std::abs(set_conductance(g, s) - small)});

        std::vector<double> unit(n, 0.0), prob(n, 0.0);
        for (Node v = 0; v < n; ++v)
            if (mask[v]) {
                unit[v] = 1.0 / std::sqrt(static_cast<double>(size));
                prob[v] = 1.0 / static_cast<double>(size);
            }
        const auto x = oracle::power_apply(dense[k], unit, t);
        floor_margin = std::min(floor_margin, oracle::norm(x) - std::sqrt(static_cast<double>(size) / n));
        agree = std::max(agree, std::abs(norm_exact(g, s, t) - oracle::norm(x)));
        const auto w = oracle::power_apply(dense[k], prob, t);
        double l1 = 0.0;
        for (double wi : w) l1 += std::abs(wi - 1.0 / static_cast<double>(n));
        l1_margin = std::min(l1_margin, oracle::norm(w) * oracle::norm(w) - (1.0 + l1 * l1) / static_cast<double>(n));
    }
    const bool ok = lower >= -kTol && upper >= -kTol && floor_margin >= -kTol && l1_margin >= -kTol && agree <= kTol;
    return {ok, "1000 triples: min phi - Phi/d = " + fmt(lower) + ", min Phi - phi = " + fmt(upper) +
                    ", min ||P^t|S>|| - sqrt(|S|/n) = " + fmt(floor_margin) + ", min ||w||^2 - (1+||w-u||_1^2)/n = " +
                    fmt(l1_margin) + ", library vs oracle max gap " + fmt(agree)};
}

Outcome diffusion_cores() {
    struct Instance {
        Graph g;
        std::vector<std::vector<char>> sets;
    };
    std::vector<Instance> instances;
    for (auto&& g : {clique_dumbbell(8, 8), clique_dumbbell(16, 16), clique_dumbbell(32, 32), clique_dumbbell(64, 64),
                     regular_dumbbell(64, 4, 7),
                     regular_dumbbell(128, 4, 8)}) {
        Instance x{g, {left_mask(g)}};
        instances.push_back(std::move(x));
    }
    auto rng = make_rng(kSeed, 3, Stream::verify);
    for (std::size_t n : {32u, 64u, 128u}) {
        Instance x{random_regular(n, 4, n), {}};
        for (int k = 0; k < 4; ++k) {
            const NodeSet ball = detail::random_ball(x.g, 1 + uniform_below(rng, n / 2), rng);
            x.sets.push_back(ball.mask(n));
        }
        instances.push_back(std::move(x));
    }
    const double alphas[] = {1.0 / 40.0, 1.0 / 30.0, 1.0 / 20.0, 1.0 / 10.0, 1.0 / 4.0, 1.0};
    const double betas[] = {0.5, 0.75, 0.9, 39.0 / 40.0};
    double core_margin = 1e300;
    std::size_t size_cases = 0, mismatches = 0;
    double inner_margin = 1e300, stay_min = 1e300;
    std::size_t stay_cases = 0;
    for (const auto& inst : instances) {
        const Graph& g = inst.g;
        const auto m = oracle::transition_matrix(g);
        for (const auto& mask : inst.sets) {
            const auto cut = oracle::cut_of(g, mask);
            if (cut.cut_edges == 0) continue;
            const NodeSet s = from_mask(g, mask);
            for (double a : alphas)
                for (double b : betas) {
                    const double bound = 1.0 - a / (2.0 * (1.0 - b));
                    if (bound <= 0.0) continue;
                    const auto core = oracle_core(g, m, mask, a, b);
                    mismatches += !(from_mask(g, core) == diffusion_core(g, s, {a, b}));
                    const double ratio =
                        static_cast<double>(oracle::cut_of(g, core).volume) / static_cast<double>(cut.volume);
                    core_margin = std::min(core_margin, ratio - bound);
                    ++size_cases;
                }
            const auto horizon = static_cast<std::size_t>(
                std::floor(static_cast<double>(cut.volume) / (120.0 * static_cast<double>(cut.cut_edges)) + 1e-9));
            if (horizon < 1) continue;
            ++stay_cases;
            const auto core = oracle_core(g, m, mask, 1.0 / 40.0, 0.75);
            const auto inner = oracle_core(g, m, mask, 1.0 / 30.0, 39.0 / 40.0);
            inner_margin = std::min(inner_margin, static_cast<double>(oracle::cut_of(g, inner).volume) -
                                                    static_cast<double>(cut.volume) / 3.0);
            const auto stay = oracle::stay_masses(m, core, horizon);
            for (Node v = 0; v < g.node_count(); ++v)
                if (inner[v]) stay_min = std::min(stay_min, stay[v]);
        }
    }
    const bool ok = core_margin > 0.0 && mismatches == 0 && stay_cases > 0 && inner_margin > 0.0 &&
                    stay_min >= 0.9 - kTol;
    return {ok, std::to_string(size_cases) + " (S,a,b) cases: min d(S_ab)/d(S) - (1 - a/(2(1-b))) = " +
                    fmt(core_margin) + ", library/oracle core mismatches " + std::to_string(mismatches) + "; " +
                    std::to_string(stay_cases) + " sets with horizon >= 1: min d(S') - d(S)/3 = " +
                    fmt(inner_margin) + ", min stay in S_d from S' = " + fmt(stay_min) + " (bound 0.9)"};
}

Outcome kernel_exactness() {
    std::vector<Graph> graphs{random_regular(16, 3, 11), random_regular(32, 4, 12), random_regular(64, 3, 13),
                              clique_dumbbell(8, 8), regular_dumbbell(16, 4, 14)};
    auto rng = make_rng(kSeed, 4, Stream::esp);
    std::size_t rows = 0, failures = 0, disagreements = 0;
    const std::size_t target = 10000;
    while (rows < target) {
        const Graph& g = graphs[rows % graphs.size()];
        StoppingRule rule;
        rule.max_steps = 1 + uniform_below(rng, 12);
        rule.theta = 0.0;
        EspRunOptions keep;
        keep.keep_path = true;
        const auto tr = run_esp(g, static_cast<Node>(uniform_below(rng, g.node_count())), rule, rng, keep);
        for (const NodeSet& s : tr.path) {
            if (rows >= target) break;
            if (s.empty()) continue;
            ++rows;
            const auto want = oracle::kernel(g, {s.members().begin(), s.members().end()});
            Rational k_sum, k_hat_sum, volume;
            for (const auto& o : want) {
                k_sum += o.probability;
                k_hat_sum += o.biased_probability;
                std::int64_t vol = 0;
                for (Node v : o.set) vol += static_cast<std::int64_t>(g.degree(v));
                volume += o.probability * Rational(vol);
                if (o.set.empty() && !(o.biased_probability == Rational(0))) ++failures;
            }
            if (!(k_sum == Rational(1)) || !(k_hat_sum == Rational(1)) ||
                !(volume == Rational(static_cast<std::int64_t>(s.total_degree()))))
                ++failures;
            const KernelRow row = kernel_row(g, s);
            std::map<std::vector<Node>, std::pair<Rational, Rational>> got;
            for (std::size_t i = 0; i < row.candidates.size(); ++i) {
                const NodeSet c = row.candidate_set(g, i);
                auto& slot = got[{c.members().begin(), c.members().end()}];
                slot.first += row.candidates[i].k;
                slot.second += row.candidates[i].k_hat;
            }
            bool same = got.size() == want.size();
            for (const auto& o : want) {
                const auto it = got.find(o.set);
                same = same && it != got.end() && it->second.first == o.probability &&
                       it->second.second == o.biased_probability;
            }
            disagreements += !same;
        }
    }
    return {failures == 0 && disagreements == 0,
            std::to_string(rows) + " rows in exact rationals: rows violating sum K = sum K^ = 1, K^(empty) = 0 or "
                                   "sum K d = d(S): " +
                std::to_string(failures) + ", library rows differing from oracle enumeration: " +
                std::to_string(disagreements)};
}

Outcome esp_cost_and_conductance() {
    const std::vector<std::pair<std::string, Graph>> instances{{"random-regular n=256", random_regular(256, 4, 21)},
                                                               {"regular-dumbbell 2x128", regular_dumbbell(128, 4, 22)},
                                                               {"dumbbell K16", clique_dumbbell(16, 16)}};
    const std::size_t runs = 500;
    bool ok = true;
    std::ostringstream out;
    std::size_t cost_mismatches = 0;
    auto rng = make_rng(kSeed, 5, Stream::esp);
    for (const auto& [name, g] : instances) {
        const double log_m = std::log(static_cast<double>(g.edge_count()));
        for (std::size_t T : {10u, 100u}) {
            StoppingRule rule;
            rule.max_steps = T;
            rule.theta = 0.0;
            std::vector<double> ratios;
            for (std::size_t i = 0; i < runs; ++i) {
                EspRunOptions keep;
                keep.keep_path = i < 20;
                const auto tr = run_esp(g, static_cast<Node>(uniform_below(rng, g.node_count())), rule, rng, keep);
                if (keep.keep_path) {
                    std::vector<std::vector<char>> path;
                    for (const auto& s : tr.path) path.push_back(s.mask(g.node_count()));
                    cost_mismatches += oracle::path_cost(g, path) != tr.final_cost;
                }
                ratios.push_back(static_cast<double>(tr.final_cost) / static_cast<double>(tr.final_set.total_degree()));
            }
            double mean = 0.0, var = 0.0;
            for (double r : ratios) mean += r;
            mean /= static_cast<double>(runs);
            for (double r : ratios) var += (r - mean) * (r - mean);
            const double se = std::sqrt(var / static_cast<double>(runs - 1) / static_cast<double>(runs));
            const double bound = 1.0 + 4.0 * std::sqrt(static_cast<double>(T) * log_m);
            ok = ok && mean <= bound + 3.0 * se;
            out << name << " T=" << T << " mean cost/d = " << fmt(mean) << " <= " << fmt(bound) << "; ";
        }
        const auto T = static_cast<std::size_t>(std::ceil(64.0 * log_m));
        const double threshold = 2.0 * std::sqrt(4.0 * log_m / static_cast<double>(T));
        StoppingRule rule;
        rule.max_steps = T;
        rule.theta = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < runs; ++i) {
            double min_phi = std::numeric_limits<double>::infinity();
            EspRunOptions watch;
            watch.observer = [&](const EvolvingSetProcess& p) {
                if (p.step() < T) min_phi = std::min(min_phi, p.conductance());
            };
            run_esp(g, static_cast<Node>(uniform_below(rng, g.node_count())), rule, rng, watch);
            hits += min_phi <= threshold;
        }
        const double freq = static_cast<double>(hits) / runs;
        ok = ok && freq >= 0.75 - 3.0 * binomial_se(0.75, runs);
        out << "min_{t<" << T << "} phi <= " << fmt(threshold) << " freq " << fmt(freq) << " >= 3/4; ";
    }
    ok = ok && cost_mismatches == 0;
    out << "path costs differing from recomputation: " << cost_mismatches;
    return {ok, out.str()};
}

Outcome seed_set_guarantee() {
    const std::size_t d = seed_set_premise_degree();
    const Graph g = clique_dumbbell(64, d);
    const auto left = left_mask(g);
    const auto m = oracle::transition_matrix(g);
    const auto inner = oracle_core(g, m, left, 1.0 / 30.0, 39.0 / 40.0);
    const std::size_t inner_size = oracle::cut_of(g, inner).size;
    const double volume_target = 64.0 * static_cast<double>(d) / 2.0;
    const auto e = seed_set_experiment(d, 0.0, volume_target, 500, kSeed);
    const double se = binomial_se(0.2, e.runs);
    const bool premise = e.conductance <= e.premise + kTol && e.gamma <= 1.0;
    const bool ok = premise && inner_size == e.inner_core && e.runs == 500 && e.frequency() >= 0.2 - 3.0 * se;
    std::ostringstream out;
    out << "K64 dumbbell padded to d=" << d << ": phi(A) = " << fmt(e.conductance) << " <= premise " << fmt(e.premise)
        << " at gamma = " << fmt(e.gamma) << ", inner core " << e.inner_core << " nodes (oracle " << inner_size
        << "), success frequency " << fmt(e.frequency()) << " over " << e.runs << " runs (bound " << fmt(0.2 - 3 * se)
        << "); stops:";
    for (const auto& [reason, count] : e.stops) out << ' ' << to_string(reason) << '=' << count;
    const auto low = seed_set_experiment(64, 0.125, 64.0 * 64.0 / 2.0, 500, kSeed);
    out << " | below the premise, d=64 gamma=1/8: frequency " << fmt(low.frequency()) << " (informational)";
    return {ok, out.str()};
}

Outcome fast_forward_accuracy() {
    const std::vector<Graph> graphs{random_regular(64, 4, 31), random_regular(128, 3, 32), clique_dumbbell(16, 16),
                                    regular_dumbbell(32, 4, 33)};
    auto rng = make_rng(kSeed, 7, Stream::verify);
    double worst = 0.0;
    std::size_t degree_violations = 0, cases = 0;
    for (const auto& g : graphs) {
        const auto m = oracle::transition_matrix(g);
        const std::size_t n = g.node_count();
        for (int k = 0; k < 2; ++k) {
            std::vector<Node> members;
            for (Node v = 0; v < n; ++v)
                if (uniform_below(rng, 4) == 0) members.push_back(v);
            if (members.empty()) members.push_back(0);
            const NodeSet s{g, members};
            std::vector<double> x(n, 0.0);
            for (Node v : members) x[v] = 1.0 / std::sqrt(static_cast<double>(members.size()));
            std::size_t done = 0;
            for (std::size_t t : {1u, 10u, 100u, 500u, 1000u, 2000u}) {
                x = oracle::power_apply(m, x, t - done);
                done = t;
                for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
                    const auto approx = fast_forward(g, s, t, eps);
                    double err = 0.0;
                    for (std::size_t i = 0; i < n; ++i) err += (approx[i] - x[i]) * (approx[i] - x[i]);
                    worst = std::max(worst, std::sqrt(err) / eps);
                    const auto D = cheb_coeffs(t, eps).degree;
                    const double cap = std::ceil(std::sqrt(2.0 * static_cast<double>(t) * std::log(2.0 / eps)));
                    degree_violations += D > t || static_cast<double>(D) > cap;
                    ++cases;
                }
            }
        }
    }
    const bool ok = worst <= 1.0 + kTol && degree_violations == 0;
    return {ok, std::to_string(cases) + " (graph, S, t <= 2000, eps >= 1e-8) cases: max ||ff - P^t|S>|| / eps = " +
                    fmt(worst) + ", degree violations " + std::to_string(degree_violations) +
                    "; D(2000, 1e-8) = " + std::to_string(cheb_coeffs(2000, 1e-8).degree)};
}

Outcome estimator_contract() {
    const Graph g = random_regular(64, 4, 41);
    const NodeSet s{g, {0, 5, 9, 17, 33}};
    std::vector<double> x(64, 0.0);
    for (Node v : s.members()) x[v] = 1.0 / std::sqrt(5.0);
    const double truth = oracle::norm(oracle::power_apply(oracle::transition_matrix(g), x, 30));
    auto rng = make_rng(kSeed, 8, Stream::estimator);
    const std::size_t calls = 10000;
    bool ok = true;
    std::ostringstream out;
    for (double delta : {0.01, 0.05, 0.2}) {
        for (double eps : {0.001, 0.02}) {
            std::size_t within = 0;
            for (std::size_t i = 0; i < calls; ++i)
                within += std::abs(estimate_norm(g, s, 30, eps, delta, Backend::noisy, rng).value - truth) <= eps;
            const double freq = static_cast<double>(within) / calls;
            const double bound = 1.0 - delta - 3.0 * binomial_se(1.0 - delta, calls);
            ok = ok && freq >= bound;
            out << "delta=" << delta << " eps'=" << eps << ": " << fmt(freq) << " >= " << fmt(bound) << "; ";
        }
    }
    return {ok, out.str() + std::to_string(calls) + " calls each"};
}

struct SeparationCell {
    std::size_t accepts = 0;
    std::size_t trials = 0;
    std::size_t witnesses = 0;
    std::size_t bad_witnesses = 0;
};

SeparationCell separation_cell(TesterKind kind, const Graph& g, std::uint64_t seed) {
    TesterConfig cfg;
    cfg.n = g.node_count();
    cfg.d = g.degree_bound();
    cfg.phi = 0.5;
    cfg.epsilon = 0.01;
    cfg.profile = Profile::desk;
    std::vector<Verdict> verdicts(30);
    parallel_for(verdicts.size(), [&](std::size_t i) {
        auto rng = make_rng(seed, i, Stream::tester);
        verdicts[i] = run_tester(kind, g, cfg, rng);
    });
    SeparationCell c;
    c.trials = verdicts.size();
    for (const auto& v : verdicts) {
        c.accepts += v.decision == Decision::accept;
        if (v.reason != RejectReason::cut_witness) continue;
        ++c.witnesses;
        const auto cut = oracle::cut_of(g, v.witness->mask(g.node_count()));
        const bool genuine = 2 * cut.size <= g.node_count() &&
                             static_cast<double>(cut.boundary) / static_cast<double>(cut.size) <= cfg.phi / 2.0;
        c.bad_witnesses += !genuine;
    }
    return c;
}

Outcome tester_separation() {
    bool ok = true;
    std::ostringstream out;
    for (std::size_t n : {256u, 512u, 1024u}) {
        const Graph expander = random_regular(n, 4, derive_seed(kSeed, n, Stream::graph));
        const Graph dumbbell = regular_dumbbell(n / 2, 4, derive_seed(kSeed, n + 1, Stream::graph));
        out << "n=" << n;
        for (TesterKind kind : {TesterKind::seeded_qff, TesterKind::gr}) {
            const auto a = separation_cell(kind, expander, kSeed + n);
            const auto r = separation_cell(kind, dumbbell, kSeed + n + 7);
            const std::size_t rejects = r.trials - r.accepts;
            ok = ok && 3 * a.accepts >= 2 * a.trials && 3 * rejects >= 2 * r.trials && a.bad_witnesses == 0 &&
                 r.bad_witnesses == 0;
            out << ' ' << to_string(kind) << " accept " << a.accepts << "/30 reject " << rejects << "/30 (witnesses "
                << r.witnesses << ", invalid " << a.bad_witnesses + r.bad_witnesses << ")";
        }
        out << "; ";
    }
    return {ok, out.str()};
}

Outcome complexity_trends() {
    const std::vector<std::size_t> sizes{256, 512, 1024, 2048, 4096};
    std::map<TesterKind, std::vector<double>> means;
    std::vector<double> xs;
    for (std::size_t n : sizes) {
        const Graph g = random_regular(n, 4, derive_seed(kSeed, n, Stream::graph));
        xs.push_back(static_cast<double>(n));
        TesterConfig cfg;
        cfg.n = n;
        cfg.d = 4;
        cfg.phi = 0.5;
        cfg.epsilon = 0.01;
        cfg.profile = Profile::desk;
        for (TesterKind kind : {TesterKind::seeded_qff, TesterKind::qff}) {
            std::vector<double> totals(5);
            parallel_for(totals.size(), [&](std::size_t i) {
                auto rng = make_rng(kSeed, i, Stream::tester);
                totals[i] = static_cast<double>(run_tester(kind, g, cfg, rng).ledger.total());
            });
            double mean = 0.0;
            for (double t : totals) mean += t / static_cast<double>(totals.size());
            means[kind].push_back(mean);
        }
    }
    const double seeded = fit_loglog(xs, means[TesterKind::seeded_qff]).slope;
    const double plain = fit_loglog(xs, means[TesterKind::qff]).slope;
    const bool in_bands = seeded >= 0.23 && seeded <= 0.43 && plain >= 0.40 && plain <= 0.60;
    const bool separated = !(seeded >= 0.40 && seeded <= 0.60) && !(plain >= 0.23 && plain <= 0.43) && seeded < plain;
    return {in_bands && separated, "n = 2^8..2^12, 5 trials each: seeded-qff slope " + fmt(seeded) +
                                       " (band [0.23, 0.43]), qff slope " + fmt(plain) + " (band [0.40, 0.60])"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "collision identity", 60, collision_identity},
        {2, "conductance sandwich and norm floors", 60, sandwich_and_norm_floors},
        {3, "diffusion core size and stay bounds", 300, diffusion_cores},
        {4, "ESP kernel exactness", 120, kernel_exactness},
        {5, "ESP cost and conductance bounds", 600, esp_cost_and_conductance},
        {6, "seed-set guarantee", 900, seed_set_guarantee},
        {7, "fast-forwarding accuracy", 120, fast_forward_accuracy},
        {8, "2-norm estimator contract", 60, estimator_contract},
        {9, "tester separation", 1800, tester_separation},
        {10, "complexity trends", 1800, complexity_trends},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string{"exception: "} + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.passed && secs <= c.budget_s;
        failed += !pass;
        std::printf("criterion %2d %s: %s [%.1fs of %.0fs] %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                    c.budget_s, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
