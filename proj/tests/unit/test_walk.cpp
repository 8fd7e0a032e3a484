#include <random>

#include <gtest/gtest.h>

#include "qet/generators.hpp"
#include "qet/testers.hpp"
#include "qet/walk.hpp"
#include "support/oracles.hpp"

using namespace qet;

namespace {

Graph two_nodes() { return Graph::from_edges(2, std::vector<Edge>{{0, 1}}); }

Graph dumbbell(std::size_t half, std::size_t d) {
    GraphSpec s;
    s.family = Family::dumbbell;
    s.n = half;
    s.d = d;
    return generate(s, 1);
}

NodeSet left(const Graph& g) {
    std::vector<Node> m;
    for (Node v = 0; v < g.node_count() / 2; ++v) m.push_back(v);
    return NodeSet{g, m};
}

}  // namespace

TEST(WalkStep, TwoNodeLazyStep) {
    const auto p = walk_step(two_nodes(), Distribution::point(2, 0));
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(WalkStep, SelfLoopsAddToHoldingProbability) {
    // Node 0 has two neighbours and two self-loops in a 4-regular padding.
    const Graph g = regularize(Graph::from_edges(3, std::vector<Edge>{{0, 1}, {0, 2}}), 4);
    const auto p = walk_step(g, Distribution::point(3, 0));
    EXPECT_DOUBLE_EQ(p[0], 0.75);
    EXPECT_DOUBLE_EQ(p[1], 0.125);
}

TEST(WalkStep, UniformIsStationaryAndMassIsConserved) {
    const Graph g = generate({Family::random_regular, 30, 3, 1, {}}, 4);
    const auto u = walk_step(g, Distribution::uniform(30));
    for (double w : u.weights) EXPECT_NEAR(w, 1.0 / 30.0, 1e-15);
    std::mt19937_64 rng{1};
    Distribution p{std::vector<double>(30)};
    for (double& w : p.weights) w = static_cast<double>(rng() % 100);
    const double mass = p.mass();
    EXPECT_NEAR(walk_step(g, p).mass(), mass, 1e-9);
    EXPECT_THROW(walk_step(g, Distribution::uniform(5)), std::invalid_argument);
}

TEST(WalkStep, MatchesDenseMatrix) {
    const Graph g = dumbbell(6, 7);
    const auto m = oracle::transition_matrix(g);
    std::mt19937_64 rng{2};
    std::vector<double> x(g.node_count());
    for (double& w : x) w = static_cast<double>(rng() % 7) / 7.0;
    const auto got = walk_step(g, Distribution{x});
    const auto want = oracle::multiply(m, x);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-15);
}

TEST(WalkPower, Examples) {
    const Graph g = two_nodes();
    const auto p = walk_power(g, NodeSet::singleton(g, 0), 5);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    const Graph d = dumbbell(8, 8);
    const auto start = NodeSet{d, {2, 5}};
    const auto zero = walk_power(d, start, 0);
    EXPECT_DOUBLE_EQ(zero[2], 0.5);
    EXPECT_DOUBLE_EQ(zero[5], 0.5);
    const auto ten = walk_power(d, NodeSet::singleton(d, 3), 10);
    double side = 0.0;
    for (Node v = 0; v < 8; ++v) side += ten[v];
    EXPECT_GE(side, 0.9);
}

TEST(Collision, ExamplesAndIdentity) {
    const Graph g = two_nodes();
    EXPECT_DOUBLE_EQ(collision_probability(g, 0, 0), 1.0);
    EXPECT_DOUBLE_EQ(collision_probability(g, 0, 3), 0.5);
    const Graph k4 = generate({Family::complete, 4, 3, 1, {}}, 1);
    const auto p = oracle::power_apply(oracle::transition_matrix(k4), {1, 0, 0, 0}, 3);
    const double want = oracle::norm(p) * oracle::norm(p);
    EXPECT_NEAR(collision_probability(k4, 0, 3), want, 1e-15);
    const double via_power = walk_power(k4, NodeSet::singleton(k4, 0), 3).norm();
    EXPECT_NEAR(collision_probability(k4, 0, 3), via_power * via_power, 1e-15);
}

TEST(Collision, MonteCarloOnK4) {
    const Graph k4 = generate({Family::complete, 4, 3, 1, {}}, 1);
    const double p = collision_probability(k4, 0, 3);
    Rng rng{77};
    const std::size_t pairs = 100000;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pairs; ++i) hits += lazy_walk_endpoint(k4, 0, 3, rng) == lazy_walk_endpoint(k4, 0, 3, rng);
    const double freq = static_cast<double>(hits) / pairs;
    EXPECT_NEAR(freq, p, 3.0 * std::sqrt(p * (1 - p) / pairs));
}

TEST(Stay, Examples) {
    const Graph g = two_nodes();
    EXPECT_DOUBLE_EQ(stay_probability(g, NodeSet::singleton(g, 0), 0, 3), 0.125);
    EXPECT_DOUBLE_EQ(stay_probability(g, NodeSet::singleton(g, 0), 0, 0), 1.0);
    EXPECT_THROW(stay_probability(g, NodeSet::singleton(g, 0), 1, 1), std::invalid_argument);
    const Graph d = dumbbell(8, 8);
    EXPECT_DOUBLE_EQ(stay_probability(d, left(d), 0, 1), 15.0 / 16.0);
}

TEST(Stay, ForwardAndBackwardRoutesAgreeWithDenseOracle) {
    const Graph g = generate({Family::random_regular, 24, 3, 1, {}}, 8);
    const NodeSet s{g, {0, 1, 2, 3, 5, 8, 13, 21}};
    const auto mask = s.mask(24);
    for (std::size_t t : {0u, 1u, 4u, 12u}) {
        const auto all = stay_probabilities(g, s, t);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Node v = s.members()[i];
            const double want = oracle::stay_mass(g, mask, v, t);
            EXPECT_NEAR(stay_probability(g, s, v, t), want, 1e-13);
            EXPECT_NEAR(all[i], want, 1e-13);
        }
    }
}

TEST(Stay, NonincreasingInTime) {
    const Graph d = dumbbell(6, 6);
    double prev = 1.0;
    for (std::size_t t = 0; t < 30; ++t) {
        const double p = stay_probability(d, left(d), 1, t);
        EXPECT_LE(p, prev + 1e-15);
        prev = p;
    }
}

TEST(DiffusionCore, DumbbellSideIsItsOwnCore) {
    const Graph d = dumbbell(8, 8);
    const NodeSet side = left(d);
    EXPECT_EQ(core_horizon(d, side, 1.0 / 40.0), 1u);
    const NodeSet core = diffusion_core(d, side, kCanonicalCore);
    EXPECT_EQ(core, side);
    EXPECT_GT(static_cast<double>(core.total_degree()) / side.total_degree(), 1.0 - (1.0 / 40.0) / (2 * 0.25));
}

TEST(DiffusionCore, TinyBetaKeepsEverythingAndClosedSetsAreRejected) {
    const Graph g = generate({Family::random_regular, 20, 3, 1, {}}, 2);
    const NodeSet s{g, {0, 1, 2, 3, 4, 5}};
    EXPECT_EQ(diffusion_core(g, s, {0.5, 1e-12}), s);
    const Graph t = Graph::from_edges(6, std::vector<Edge>{{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    EXPECT_THROW(diffusion_core(t, NodeSet{t, {0, 1, 2}}, kCanonicalCore), std::invalid_argument);
    EXPECT_THROW(diffusion_core(g, s, {0.0, 0.5}), std::invalid_argument);
    EXPECT_THROW(diffusion_core(g, s, {0.1, 1.0}), std::invalid_argument);
}

TEST(DiffusionCore, CoreSizeLowerBound) {
    std::mt19937_64 rng{3};
    const Graph g = generate({Family::random_regular, 60, 4, 1, {}}, 12);
    for (int k = 0; k < 30; ++k) {
        std::vector<Node> m;
        for (Node v = 0; v < 60; ++v)
            if (rng() % 3 == 0) m.push_back(v);
        const NodeSet s{g, m};
        if (s.empty() || cut_stats(g, s).cut_edges == 0) continue;
        for (CoreParams p : {CoreParams{0.1, 0.5}, CoreParams{1.0 / 40, 0.75}, CoreParams{0.3, 0.6}}) {
            const NodeSet core = diffusion_core(g, s, p);
            EXPECT_GT(static_cast<double>(core.total_degree()) / s.total_degree(),
                      1.0 - p.alpha / (2 * (1 - p.beta)));
        }
    }
}

TEST(NormFloors, SeededNormAndOneNormInequality) {
    std::mt19937_64 rng{4};
    const Graph g = dumbbell(6, 6);
    for (int k = 0; k < 100; ++k) {
        std::vector<Node> m;
        for (Node v = 0; v < 12; ++v)
            if (rng() % 2) m.push_back(v);
        if (m.empty()) continue;
        const NodeSet s{g, m};
        const std::size_t t = rng() % 40;
        auto x = unit_indicator(12, s);
        apply_walk_power(g, x, t);
        EXPECT_GE(norm2(x), std::sqrt(static_cast<double>(s.size()) / 12) - 1e-12);
        const auto w = walk_power(g, s, t);
        double l1 = 0;
        for (double wi : w.weights) l1 += std::abs(wi - 1.0 / 12);
        EXPECT_GE(w.norm() * w.norm(), (1 + l1 * l1) / 12 - 1e-12);
    }
}

TEST(MixingBound, VerifiedExpanderMeetsThresholdAtPrescribedLength) {
    // Exactly verified expansion; the walk length uses Phi = Phi(G).
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Graph g = generate({Family::random_regular, 16, 4, 1, {}}, seed);
        const double phi = expansion_bruteforce(g);
        ASSERT_GT(phi, 0.0);
        const auto t = static_cast<std::size_t>(std::ceil(16.0 * 16.0 / (phi * phi) * std::log(16.0)));
        for (Node v = 0; v < 16; ++v) {
            const double r = std::sqrt(collision_probability(g, v, t));
            EXPECT_LE(r, std::sqrt((1.0 / 16) * (1 + 1.0 / 16)));
        }
    }
}
