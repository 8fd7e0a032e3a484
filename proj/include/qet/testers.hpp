#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qet/esp.hpp"
#include "qet/graph.hpp"
#include "qet/qff.hpp"
#include "qet/rng.hpp"

namespace qet {

enum class TesterKind { gr, qff, seeded_qff, constant };

inline std::string to_string(TesterKind k) {
    switch (k) {
        case TesterKind::gr: return "gr";
        case TesterKind::qff: return "qff";
        case TesterKind::seeded_qff: return "seeded-qff";
        case TesterKind::constant: return "constant";
    }
    return "unknown";
}

inline TesterKind parse_tester(const std::string& s) {
    if (s == "gr") return TesterKind::gr;
    if (s == "qff") return TesterKind::qff;
    if (s == "seeded-qff") return TesterKind::seeded_qff;
    if (s == "constant") return TesterKind::constant;
    throw std::invalid_argument("unknown tester '" + s + "'");
}

// =============================================================================
// Profiles and configuration
// =============================================================================
//
// The paper profile uses the worst-case constants verbatim. They are far beyond
// desk scale (K ~ 2e4 iterations and B ~ 4.5e6 at n = 1024), so the desk
// profile runs fewer iterations and shrinks the walk length, the ESP horizon and
// the ESP budget by declared factors. The budget factor is what lets the budget
// stop bind before the ESP swallows the whole graph, which is the regime the
// seed-set analysis is about.

enum class Profile { paper, desk };

inline std::string to_string(Profile p) { return p == Profile::paper ? "paper" : "desk"; }

inline Profile parse_profile(const std::string& s) {
    if (s == "paper") return Profile::paper;
    if (s == "desk") return Profile::desk;
    throw std::invalid_argument("unknown profile '" + s + "'");
}

struct DeskProfile {
    std::size_t iterations = 40;  // K, also the GR start-node count
    double walk_scale = 1.0 / 32.0;
    double horizon_scale = 1.0 / 32.0;
    double budget_scale = 1.0 / 2000.0;
    double gr_walks_per_sqrt_n = 16.0;
    double gr_threshold_factor = 1.5;
};

inline constexpr DeskProfile kDeskProfile{};

struct Overrides {
    std::optional<std::size_t> iterations;  // K
    std::optional<std::size_t> walk_length;  // t
    std::optional<std::size_t> max_steps;   // T
    std::optional<std::uint64_t> budget;    // B
    std::optional<double> theta;
    std::optional<std::size_t> volume_target;  // M
    std::optional<double> scale;  // multiplies t, T and B after the profile
    std::optional<std::size_t> gr_walks;
    std::optional<double> gr_threshold_factor;

    /// Applies "key=value"; throws std::invalid_argument for unknown keys.
    void set(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("override must be key=value: '" + assignment + "'");
        const std::string key = assignment.substr(0, eq);
        const std::string value = assignment.substr(eq + 1);
        auto as_size = [&] { return static_cast<std::size_t>(std::stoull(value)); };
        if (key == "K") iterations = as_size();
        else if (key == "t") walk_length = as_size();
        else if (key == "T") max_steps = as_size();
        else if (key == "B") budget = std::stoull(value);
        else if (key == "theta") theta = std::stod(value);
        else if (key == "M") volume_target = as_size();
        else if (key == "scale" || key == "trialsScale") scale = std::stod(value);
        else if (key == "gr_walks") gr_walks = as_size();
        else if (key == "gr_threshold") gr_threshold_factor = std::stod(value);
        else throw std::invalid_argument("unknown override key '" + key + "'");
    }
};

struct TesterConfig {
    std::size_t n = 0;
    std::size_t d = 0;
    double phi = 0.5;       // expansion parameter
    double epsilon = 0.01;  // promise (distance) parameter
    Profile profile = Profile::paper;
    Backend backend = Backend::noisy;
    double rd_constant = 1.0;  // labels epsilon-far instances only; never read by the testers
    Overrides overrides;

    void validate() const {
        if (n < 2 || d < 1) throw std::invalid_argument("TesterConfig: need n >= 2 and d >= 1");
        if (!(phi > 0.0)) throw std::invalid_argument("TesterConfig: Phi must be positive");
        if (phi > static_cast<double>(d)) throw std::invalid_argument("TesterConfig: Phi cannot exceed d");
        if (!(epsilon > 0.0 && epsilon < 1.0 / 16.0))
            throw std::invalid_argument("TesterConfig: epsilon must lie in (0, 1/16)");
    }
};

/// Resolved tester parameters (after profile and overrides).
struct ResolvedParams {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t m = 0;
    double phi = 0.0;
    double epsilon = 0.0;
    std::size_t walk_length = 0;  // t
    double delta = 0.0;
    std::size_t iterations = 0;  // K
    double theta = 0.0;
    std::size_t volume_target = 0;  // M
    std::uint64_t budget = 0;      // B
    std::size_t max_steps = 0;     // T
    std::size_t gr_starts = 0;
    std::size_t gr_walks = 0;  // N
    double gr_threshold_factor = 0.0;

    /// eps'(|S|) = sqrt(|S|/n) (sqrt(1 + 1/256) - 1) / 4.
    double eps_prime(std::size_t set_size) const {
        return std::sqrt(static_cast<double>(set_size) / static_cast<double>(n)) *
               (std::sqrt(1.0 + 1.0 / 256.0) - 1.0) / 4.0;
    }

    /// Step-7 rejection threshold sqrt(|S| n^-1 (1 + n^-1)) + eps'(|S|).
    double norm_threshold(std::size_t set_size) const {
        const double nn = static_cast<double>(n);
        return std::sqrt(static_cast<double>(set_size) / nn * (1.0 + 1.0 / nn)) + eps_prime(set_size);
    }

    StoppingRule rule() const {
        StoppingRule r;
        r.max_steps = std::max<std::size_t>(1, max_steps);
        r.budget = budget;
        r.theta = theta;
        return r;
    }
};

namespace detail {

inline std::size_t scaled(std::size_t x, double factor) {
    return std::max<std::size_t>(1, ceil_units(static_cast<double>(x) * factor));
}

}  // namespace detail

inline ResolvedParams algorithm2_params(const TesterConfig& cfg) {
    cfg.validate();
    ResolvedParams p;
    const double n = static_cast<double>(cfg.n);
    const double d = static_cast<double>(cfg.d);
    p.n = cfg.n;
    p.d = cfg.d;
    p.m = std::max<std::size_t>(2, (cfg.n * cfg.d + 1) / 2);
    p.phi = cfg.phi;
    p.epsilon = cfg.epsilon;
    const double log_n = std::log(n);
    const double log_m = std::log(static_cast<double>(p.m));
    const double inv_phi2 = 1.0 / (cfg.phi * cfg.phi);
    p.walk_length = ceil_units(16.0 * d * d * inv_phi2 * log_n);
    p.delta = cfg.epsilon / 1000.0;
    p.iterations = ceil_units(200.0 / (cfg.epsilon * (1.0 - p.delta)));
    p.theta = cfg.phi / (2.0 * d);
    p.volume_target = ceil_units(std::cbrt(n) * d);
    p.budget = ceil_units(800.0 * std::sqrt(5.0) * static_cast<double>(p.volume_target) * d / cfg.phi * log_m);
    p.max_steps = ceil_units(320.0 * inv_phi2 * d * d * log_m);
    p.gr_starts = ceil_units(8.0 / cfg.epsilon);
    p.gr_walks = ceil_units(4.0 * std::sqrt(n));
    p.gr_threshold_factor = 1.0 + 1.0 / 512.0;

    if (cfg.profile == Profile::desk) {
        const DeskProfile& desk = kDeskProfile;
        p.iterations = desk.iterations;
        p.gr_starts = desk.iterations;
        p.walk_length = detail::scaled(p.walk_length, desk.walk_scale);
        p.max_steps = detail::scaled(p.max_steps, desk.horizon_scale);
        p.budget = detail::scaled(p.budget, desk.budget_scale);
        p.gr_walks = ceil_units(desk.gr_walks_per_sqrt_n * std::sqrt(n));
        p.gr_threshold_factor = desk.gr_threshold_factor;
    }

    const Overrides& o = cfg.overrides;
    if (o.scale) {
        if (!(*o.scale > 0.0)) throw std::invalid_argument("override scale must be positive");
        p.walk_length = detail::scaled(p.walk_length, *o.scale);
        p.max_steps = detail::scaled(p.max_steps, *o.scale);
        p.budget = detail::scaled(p.budget, *o.scale);
    }
    if (o.iterations) {
        p.iterations = *o.iterations;
        p.gr_starts = *o.iterations;
    }
    if (o.walk_length) p.walk_length = *o.walk_length;
    if (o.max_steps) p.max_steps = *o.max_steps;
    if (o.budget) p.budget = *o.budget;
    if (o.theta) p.theta = *o.theta;
    if (o.volume_target) p.volume_target = *o.volume_target;
    if (o.gr_walks) p.gr_walks = *o.gr_walks;
    if (o.gr_threshold_factor) p.gr_threshold_factor = *o.gr_threshold_factor;
    if (p.iterations == 0) throw std::invalid_argument("iteration count must be positive");
    if (!(p.theta >= 0.0 && p.theta <= 1.0)) throw std::invalid_argument("theta must lie in [0,1]");
    return p;
}

// =============================================================================
// Verdicts
// =============================================================================

enum class Decision { accept, reject };
enum class RejectReason { none, cut_witness, norm_threshold, collision_count };

inline std::string to_string(Decision d) { return d == Decision::accept ? "accept" : "reject"; }

inline std::string to_string(RejectReason r) {
    switch (r) {
        case RejectReason::none: return "none";
        case RejectReason::cut_witness: return "cut-witness";
        case RejectReason::norm_threshold: return "norm-threshold";
        case RejectReason::collision_count: return "collision-count";
    }
    return "unknown";
}

/// One loop iteration of a tester. Fields that do not apply stay zero.
struct IterationRecord {
    std::size_t index = 0;
    Node seed = 0;
    StopReason esp_stop = StopReason::none;
    std::size_t esp_steps = 0;
    std::uint64_t esp_cost = 0;
    std::size_t set_size = 0;
    std::size_t set_volume = 0;
    double set_expansion = 0.0;
    double estimate = 0.0;
    double eps_prime = 0.0;
    double threshold = 0.0;
    std::uint64_t collisions = 0;
};

struct Verdict {
    TesterKind tester = TesterKind::seeded_qff;
    Decision decision = Decision::accept;
    RejectReason reason = RejectReason::none;
    std::optional<NodeSet> witness;
    std::vector<IterationRecord> iterations;
    QueryLedger ledger;
    /// Ledger split: ESP classical cost, estimator quantum cost, QRAM cost.
    std::uint64_t esp_cost = 0;
    std::uint64_t estimator_cost = 0;
    std::uint64_t qram_cost = 0;
};

// =============================================================================
// Testers
// =============================================================================

namespace detail {

inline void check_instance(const Graph& g, const ResolvedParams& p) {
    if (!g.is_regular()) throw std::invalid_argument("tester needs a regularized graph");
    if (g.node_count() != p.n || g.degree_bound() != p.d)
        throw std::invalid_argument("tester config (n, d) does not match the graph");
}

inline void charge_estimate(Verdict& v, const NormEstimate& e, std::size_t set_size, std::size_t n) {
    v.ledger.quantum_queries += e.query_cost;
    v.ledger.qram_reflections += e.qram_reflections;
    v.ledger.qram_prep += qram_prep_cost(set_size, n);
    v.estimator_cost += e.query_cost;
    v.qram_cost += e.qram_reflections + qram_prep_cost(set_size, n);
}

}  // namespace detail

/// Quantum expansion tester with ESP-grown seed sets.
template <class Gen>
Verdict seeded_qff_tester(const Graph& g, const TesterConfig& cfg, Gen& rng) {
    const ResolvedParams p = algorithm2_params(cfg);
    detail::check_instance(g, p);
    Verdict out;
    out.tester = TesterKind::seeded_qff;
    EvolvingSetProcess process{g};
    const StoppingRule rule = p.rule();
    for (std::size_t i = 0; i < p.iterations; ++i) {
        IterationRecord rec;
        rec.index = i;
        rec.seed = static_cast<Node>(uniform_below(rng, p.n));
        ++out.ledger.uniform_node;

        const EspTranscript esp = run_esp(process, rec.seed, rule, rng);
        out.ledger.neighbor += esp.final_cost;
        out.esp_cost += esp.final_cost;
        const NodeSet& s = esp.final_set;
        rec.esp_stop = esp.reason;
        rec.esp_steps = esp.tau();
        rec.esp_cost = esp.final_cost;
        rec.set_size = s.size();
        rec.set_volume = s.total_degree();

        if (2 * s.size() <= p.n) {
            rec.set_expansion = set_expansion(g, s);
            if (rec.set_expansion <= p.phi / 2.0) {
                out.iterations.push_back(rec);
                out.decision = Decision::reject;
                out.reason = RejectReason::cut_witness;
                out.witness = s;
                return out;
            }
        }

        rec.eps_prime = p.eps_prime(s.size());
        const NormEstimate est = estimate_norm(g, s, p.walk_length, rec.eps_prime, p.delta, cfg.backend, rng);
        detail::charge_estimate(out, est, s.size(), p.n);
        rec.estimate = est.value;
        rec.threshold = p.norm_threshold(s.size());
        out.iterations.push_back(rec);
        if (est.value > rec.threshold) {
            out.decision = Decision::reject;
            out.reason = RejectReason::norm_threshold;
            return out;
        }
    }
    return out;
}

/// Unseeded predecessor: the norm test from single nodes.
template <class Gen>
Verdict qff_tester(const Graph& g, const TesterConfig& cfg, Gen& rng) {
    const ResolvedParams p = algorithm2_params(cfg);
    detail::check_instance(g, p);
    Verdict out;
    out.tester = TesterKind::qff;
    for (std::size_t i = 0; i < p.iterations; ++i) {
        IterationRecord rec;
        rec.index = i;
        rec.seed = static_cast<Node>(uniform_below(rng, p.n));
        ++out.ledger.uniform_node;
        const NodeSet s = NodeSet::singleton(g, rec.seed);
        rec.set_size = 1;
        rec.set_volume = s.total_degree();
        rec.eps_prime = p.eps_prime(1);
        const NormEstimate est = estimate_norm(g, s, p.walk_length, rec.eps_prime, p.delta, cfg.backend, rng);
        detail::charge_estimate(out, est, 1, p.n);
        rec.estimate = est.value;
        rec.threshold = p.norm_threshold(1);
        out.iterations.push_back(rec);
        if (est.value > rec.threshold) {
            out.decision = Decision::reject;
            out.reason = RejectReason::norm_threshold;
            return out;
        }
    }
    return out;
}

/// Endpoint of a t-step lazy walk; one draw per step picks "stay" or a slot.
template <class Gen>
Node lazy_walk_endpoint(const Graph& g, Node v, std::size_t t, Gen& rng) {
    const std::size_t d = g.degree_bound();
    for (std::size_t step = 0; step < t; ++step) {
        const auto r = uniform_below(rng, 2 * d);
        const auto nbrs = g.neighbors(v);
        if (r < nbrs.size()) v = nbrs[r];
    }
    return v;
}

/// Number of colliding pairs among the given endpoints.
inline std::uint64_t count_collisions(std::vector<Node> endpoints) {
    std::sort(endpoints.begin(), endpoints.end());
    std::uint64_t pairs = 0;
    std::size_t i = 0;
    while (i < endpoints.size()) {
        std::size_t j = i;
        while (j < endpoints.size() && endpoints[j] == endpoints[i]) ++j;
        const std::uint64_t c = j - i;
        pairs += c * (c - 1) / 2;
        i = j;
    }
    return pairs;
}

/// Classical collision-counting baseline: N lazy walks of length t from each
/// start node, reject when the colliding pairs exceed factor * binom(N,2) / n.
template <class Gen>
Verdict gr_tester(const Graph& g, const TesterConfig& cfg, Gen& rng) {
    const ResolvedParams p = algorithm2_params(cfg);
    detail::check_instance(g, p);
    Verdict out;
    out.tester = TesterKind::gr;
    const double pairs = static_cast<double>(p.gr_walks) * static_cast<double>(p.gr_walks - 1) / 2.0;
    const double threshold = p.gr_threshold_factor * pairs / static_cast<double>(p.n);
    std::vector<Node> endpoints(p.gr_walks);
    for (std::size_t i = 0; i < p.gr_starts; ++i) {
        IterationRecord rec;
        rec.index = i;
        rec.seed = static_cast<Node>(uniform_below(rng, p.n));
        ++out.ledger.uniform_node;
        for (auto& e : endpoints) e = lazy_walk_endpoint(g, rec.seed, p.walk_length, rng);
        out.ledger.neighbor += static_cast<std::uint64_t>(p.gr_walks) * p.walk_length;
        rec.collisions = count_collisions(endpoints);
        rec.threshold = threshold;
        out.iterations.push_back(rec);
        if (static_cast<double>(rec.collisions) > threshold) {
            out.decision = Decision::reject;
            out.reason = RejectReason::collision_count;
            return out;
        }
    }
    return out;
}

/// Calibration control for scaling fits: accepts after charging K uniform-node
/// queries, independent of n.
template <class Gen>
Verdict constant_tester(const Graph& g, const TesterConfig& cfg, Gen&) {
    const ResolvedParams p = algorithm2_params(cfg);
    detail::check_instance(g, p);
    Verdict out;
    out.tester = TesterKind::constant;
    out.ledger.uniform_node = p.iterations;
    return out;
}

template <class Gen>
Verdict run_tester(TesterKind kind, const Graph& g, const TesterConfig& cfg, Gen& rng) {
    switch (kind) {
        case TesterKind::gr: return gr_tester(g, cfg, rng);
        case TesterKind::qff: return qff_tester(g, cfg, rng);
        case TesterKind::seeded_qff: return seeded_qff_tester(g, cfg, rng);
        case TesterKind::constant: return constant_tester(g, cfg, rng);
    }
    throw std::invalid_argument("unhandled tester kind");
}

}  // namespace qet
