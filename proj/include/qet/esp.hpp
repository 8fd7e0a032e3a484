#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qet/graph.hpp"
#include "qet/rational.hpp"
#include "qet/rng.hpp"

namespace qet {

// =============================================================================
// Evolving set process
// =============================================================================
//
// From state S the next set is the level set {v : P(S,v) >= U} for U uniform
// in (0,1], where P(S,v) = |E(v,S)|/(2d) + [v in S]/2 is the one-step
// probability that the lazy walk from v lands in S. On a d-regular graph every
// P(S,v) is a multiple of 1/(2d): we keep the integer numerator
// count(v) + d*[v in S] and compare thresholds exactly.
//
// Only nodes with 0 < P(S,v) < 1 (the "frontier": inner and outer boundary)
// can change membership, so a kernel row is a chain of nested candidates
//   {} (U above every threshold), interior + top level, ..., S u dS
// with interval lengths as ordinary probabilities K(S,.). The volume-biased
// kernel reweights each candidate by d(S')/d(S); sum_S' K(S,S') d(S') = d(S)
// makes it stochastic.

enum class StopReason { none, conductance, horizon, budget };

inline std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::none: return "none";
        case StopReason::conductance: return "conductance";
        case StopReason::horizon: return "horizon";
        case StopReason::budget: return "budget";
    }
    return "unknown";
}

/// Stopping time tau(T, B, theta): first time phi(S_t) <= theta, t = T, or
/// cost_t > B.
struct StoppingRule {
    std::size_t max_steps = 1;                                       // T
    std::uint64_t budget = std::numeric_limits<std::uint64_t>::max();  // B
    double theta = 0.0;

    void validate() const {
        if (max_steps < 1) throw std::invalid_argument("StoppingRule: T must be >= 1");
        if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("StoppingRule: theta must lie in [0,1]");
    }
};

struct KernelCandidate {
    std::size_t threshold = 0;  // selected for U in (next threshold, threshold] / 2d
    std::size_t prefix = 0;  // frontier nodes included (see KernelRow::frontier)
    bool empty = false;      // the empty set, reached when U exceeds every threshold
    std::size_t size = 0;
    std::size_t volume = 0;
    Rational k;      // K(S, S')
    Rational k_hat;  // K^(S, S') = d(S')/d(S) K(S, S')
};

/// One row of the ESP kernel as a nested chain of candidates.
struct KernelRow {
    std::size_t degree = 0;       // d, thresholds are numerators over 2d
    std::size_t volume = 0;       // d(S)
    std::vector<Node> interior;   // P(S,v) = 1
    std::vector<Node> frontier;   // 0 < P(S,v) < 1, by decreasing threshold
    std::vector<std::size_t> numerators;  // aligned with frontier
    std::vector<KernelCandidate> candidates;

    NodeSet candidate_set(const Graph& g, std::size_t i) const {
        const auto& c = candidates.at(i);
        if (c.empty) return NodeSet{};
        std::vector<Node> members = interior;
        members.insert(members.end(), frontier.begin(), frontier.begin() + static_cast<std::ptrdiff_t>(c.prefix));
        return NodeSet{g, std::move(members)};
    }
};

namespace detail {

struct Level {
    std::size_t numerator;  // threshold * 2d
    std::size_t prefix;     // frontier nodes with numerator >= this level
    std::size_t size;       // |candidate|
    std::size_t volume;     // d(candidate)
};

/// Builds the nested level structure from frontier nodes already sorted by
/// decreasing numerator. The first entry is the empty candidate when the top
/// threshold is below one.
inline std::vector<Level> build_levels(std::span<const std::pair<std::size_t, Node>> sorted_frontier,
                                       std::size_t interior_size, std::size_t degree) {
    const std::size_t two_d = 2 * degree;
    std::vector<Level> levels;
    const std::size_t top = interior_size > 0 ? two_d
                            : sorted_frontier.empty() ? 0
                                                      : sorted_frontier.front().first;
    if (top < two_d) levels.push_back({two_d, 0, 0, 0});  // the empty set
    if (interior_size > 0) levels.push_back({two_d, 0, interior_size, interior_size * degree});
    std::size_t i = 0;
    while (i < sorted_frontier.size()) {
        const std::size_t a = sorted_frontier[i].first;
        while (i < sorted_frontier.size() && sorted_frontier[i].first == a) ++i;
        levels.push_back({a, i, interior_size + i, (interior_size + i) * degree});
    }
    return levels;
}

/// Interval length numerator (over 2d) of candidate j: the range of U values
/// selecting it. The empty candidate sits at numerator 2d.
inline std::size_t level_length(const std::vector<Level>& levels, std::size_t j) {
    const std::size_t next = j + 1 < levels.size() ? levels[j + 1].numerator : 0;
    return levels[j].numerator - next;
}

/// Exact categorical draw from K (unbiased) or K^ (biased) over the levels.
template <class Gen>
std::size_t sample_level(const std::vector<Level>& levels, std::size_t degree, std::size_t volume,
                         bool biased, Gen& rng) {
    const std::size_t two_d = 2 * degree;
    const std::uint64_t total = biased ? static_cast<std::uint64_t>(two_d) * volume : two_d;
    std::uint64_t r = uniform_below(rng, total);
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const std::uint64_t len = level_length(levels, j);
        const std::uint64_t w = biased ? len * levels[j].volume : len;
        if (r < w) return j;
        r -= w;
    }
    throw std::logic_error("ESP kernel weights do not sum to the expected total");
}

}  // namespace detail

/// The kernel row of S, computed from scratch in O(d(S) + F log F).
inline KernelRow kernel_row(const Graph& g, const NodeSet& s) {
    if (s.empty()) throw std::invalid_argument("kernel_row needs a nonempty set");
    if (!g.is_regular()) throw std::invalid_argument("kernel_row needs a regular graph");
    const std::size_t d = g.degree_bound();
    const auto in = s.mask(g.node_count());
    std::vector<std::size_t> count(g.node_count(), 0);
    std::vector<Node> touched;
    for (Node v : s.members()) {
        for (Node u : g.neighbors(v)) {
            if (count[u] == 0 && !in[u]) touched.push_back(u);
            ++count[u];
        }
    }
    KernelRow row;
    row.degree = d;
    row.volume = s.total_degree();
    std::vector<std::pair<std::size_t, Node>> frontier;
    for (Node v : s.members()) {
        const std::size_t a = count[v] + d;
        if (a == 2 * d) row.interior.push_back(v);
        else frontier.emplace_back(a, v);
    }
    for (Node u : touched) frontier.emplace_back(count[u], u);
    std::sort(frontier.begin(), frontier.end(),
              [](const auto& x, const auto& y) { return x.first != y.first ? x.first > y.first : x.second < y.second; });
    for (auto [a, v] : frontier) {
        row.frontier.push_back(v);
        row.numerators.push_back(a);
    }
    const auto levels = detail::build_levels(frontier, row.interior.size(), d);
    const auto two_d = static_cast<std::int64_t>(2 * d);
    for (std::size_t j = 0; j < levels.size(); ++j) {
        KernelCandidate c;
        c.empty = levels[j].size == 0;
        c.threshold = levels[j].numerator;
        c.prefix = levels[j].prefix;
        c.size = levels[j].size;
        c.volume = levels[j].volume;
        const auto len = static_cast<std::int64_t>(detail::level_length(levels, j));
        c.k = Rational{len, two_d};
        c.k_hat = c.k * Rational{static_cast<std::int64_t>(c.volume), static_cast<std::int64_t>(row.volume)};
        row.candidates.push_back(c);
    }
    return row;
}

// =============================================================================
// Single steps on an explicit state
// =============================================================================

struct EspState {
    NodeSet current;
    std::size_t step = 0;
    std::uint64_t cost = 0;
    bool absorbed = false;  // the unbiased process hit the empty set

    static EspState start(const Graph& g, Node v) {
        EspState s;
        s.current = NodeSet::singleton(g, v);
        s.cost = s.current.total_degree();
        return s;
    }
};

inline std::size_t symmetric_difference_volume(const Graph& g, const NodeSet& a, const NodeSet& b) {
    std::vector<Node> diff;
    std::set_symmetric_difference(a.members().begin(), a.members().end(), b.members().begin(),
                                  b.members().end(), std::back_inserter(diff));
    std::size_t vol = 0;
    for (Node v : diff) vol += g.degree(v);
    return vol;
}

/// One ESP transition sampled exactly from K (biased = false) or K^. Adds
/// d(S_i xor S_{i-1}) + |dS_{i-1}| to the cost.
template <class Gen>
EspState esp_step(const Graph& g, const EspState& state, Gen& rng, bool biased) {
    if (state.current.empty()) throw std::invalid_argument("esp_step from the empty set");
    const KernelRow row = kernel_row(g, state.current);
    std::vector<detail::Level> levels;
    for (const auto& c : row.candidates) levels.push_back({c.threshold, c.prefix, c.size, c.volume});
    const std::size_t j = detail::sample_level(levels, row.degree, row.volume, biased, rng);
    EspState next;
    next.current = row.candidate_set(g, j);
    next.step = state.step + 1;
    next.absorbed = next.current.empty();
    const auto boundary = cut_stats(g, state.current).boundary_nodes;
    next.cost = state.cost + symmetric_difference_volume(g, state.current, next.current) + boundary;
    return next;
}

// =============================================================================
// Incremental process
// =============================================================================

/// Evolving set process with incrementally maintained cut statistics. Per-step
/// work is proportional to the frontier size (times its log) plus the volume of
/// the nodes that change, which is what the cost model charges for. The dense
/// workspace is allocated once per graph and reset sparsely.
class EvolvingSetProcess {
public:
    explicit EvolvingSetProcess(const Graph& g)
        : g_{&g},
          d_{g.degree_bound()},
          in_(g.node_count(), 0),
          count_(g.node_count(), 0),
          member_pos_(g.node_count(), kNone),
          frontier_pos_(g.node_count(), kNone) {
        if (!g.is_regular()) throw std::invalid_argument("EvolvingSetProcess needs a regular graph");
    }

    void reset(Node v) {
        if (v >= g_->node_count()) throw std::invalid_argument("ESP start node out of range");
        for (Node u : touched_) {
            in_[u] = 0;
            count_[u] = 0;
            member_pos_[u] = kNone;
            frontier_pos_[u] = kNone;
        }
        touched_.clear();
        members_.clear();
        frontier_.clear();
        volume_ = cut_ = boundary_ = 0;
        step_ = 0;
        work_ = 0;
        add(v);
        cost_ = volume_;
    }

    std::size_t size() const { return members_.size(); }
    std::size_t volume() const { return volume_; }
    std::size_t cut_edges() const { return cut_; }
    std::size_t boundary_nodes() const { return boundary_; }
    std::size_t step() const { return step_; }
    std::uint64_t cost() const { return cost_; }
    std::uint64_t work() const { return work_; }
    bool contains(Node v) const { return in_[v] != 0; }
    bool empty() const { return members_.empty(); }

    double conductance() const {
        return volume_ == 0 ? 0.0 : static_cast<double>(cut_) / static_cast<double>(volume_);
    }

    /// Members in no particular order.
    std::span<const Node> members() const { return members_; }

    NodeSet current_set() const { return NodeSet{*g_, members_}; }

    /// One transition of the (biased or ordinary) process.
    template <class Gen>
    void step(Gen& rng, bool biased) {
        if (members_.empty()) throw std::invalid_argument("ESP step from the empty set");
        std::vector<std::pair<std::size_t, Node>> frontier;
        frontier.reserve(frontier_.size());
        std::size_t frontier_members = 0;
        for (Node v : frontier_) {
            frontier.emplace_back(numerator(v), v);
            if (in_[v]) ++frontier_members;
        }
        std::sort(frontier.begin(), frontier.end(),
                  [](const auto& x, const auto& y) { return x.first != y.first ? x.first > y.first : x.second < y.second; });
        work_ += frontier.size() * (1 + static_cast<std::uint64_t>(std::bit_width(frontier.size())));
        const std::size_t interior = members_.size() - frontier_members;
        const auto levels = detail::build_levels(frontier, interior, d_);
        const std::size_t j = detail::sample_level(levels, d_, volume_, biased, rng);

        const std::uint64_t boundary_before = boundary_;
        std::size_t changed_volume = 0;
        if (levels[j].size == 0) {
            // Absorbed in the empty set.
            const std::vector<Node> all = members_;
            for (Node v : all) {
                remove(v);
                changed_volume += d_;
            }
        } else {
            for (std::size_t i = 0; i < frontier.size(); ++i) {
                const Node v = frontier[i].second;
                const bool keep = i < levels[j].prefix;
                if (keep && !in_[v]) {
                    add(v);
                    changed_volume += d_;
                } else if (!keep && in_[v]) {
                    remove(v);
                    changed_volume += d_;
                }
            }
        }
        cost_ += changed_volume + boundary_before;
        ++step_;
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    std::size_t numerator(Node v) const { return count_[v] + (in_[v] ? d_ : 0); }

    void touch(Node v) {
        if (member_pos_[v] == kNone && frontier_pos_[v] == kNone && count_[v] == 0 && !in_[v])
            touched_.push_back(v);
    }

    void refresh_frontier(Node v) {
        const std::size_t a = numerator(v);
        const bool should = a > 0 && a < 2 * d_;
        const bool is = frontier_pos_[v] != kNone;
        if (should && !is) {
            frontier_pos_[v] = frontier_.size();
            frontier_.push_back(v);
        } else if (!should && is) {
            const std::size_t pos = frontier_pos_[v];
            frontier_[pos] = frontier_.back();
            frontier_pos_[frontier_[pos]] = pos;
            frontier_.pop_back();
            frontier_pos_[v] = kNone;
        }
    }

    void add(Node x) {
        touch(x);
        if (count_[x] > 0) --boundary_;
        in_[x] = 1;
        member_pos_[x] = members_.size();
        members_.push_back(x);
        volume_ += d_;
        for (Node u : g_->neighbors(x)) {
            ++work_;
            if (u == x) {
                ++count_[x];
                continue;
            }
            touch(u);
            if (in_[u]) {
                --cut_;
            } else {
                ++cut_;
                if (count_[u] == 0) ++boundary_;
            }
            ++count_[u];
            refresh_frontier(u);
        }
        refresh_frontier(x);
    }

    void remove(Node x) {
        in_[x] = 0;
        const std::size_t pos = member_pos_[x];
        members_[pos] = members_.back();
        member_pos_[members_[pos]] = pos;
        members_.pop_back();
        member_pos_[x] = kNone;
        volume_ -= d_;
        for (Node u : g_->neighbors(x)) {
            ++work_;
            if (u == x) {
                --count_[x];
                continue;
            }
            --count_[u];
            if (in_[u]) {
                ++cut_;
            } else {
                --cut_;
                if (count_[u] == 0) --boundary_;
            }
            refresh_frontier(u);
        }
        if (count_[x] > 0) ++boundary_;
        refresh_frontier(x);
    }

    const Graph* g_;
    std::size_t d_;
    std::vector<char> in_;
    std::vector<std::size_t> count_;  // slots of v pointing into S (loops only while v in S)
    std::vector<std::size_t> member_pos_;
    std::vector<std::size_t> frontier_pos_;
    std::vector<Node> members_;
    std::vector<Node> frontier_;
    std::vector<Node> touched_;
    std::size_t volume_ = 0;
    std::size_t cut_ = 0;
    std::size_t boundary_ = 0;
    std::size_t step_ = 0;
    std::uint64_t cost_ = 0;
    std::uint64_t work_ = 0;
};

// =============================================================================
// Stopped runs
// =============================================================================

struct EspStepRecord {
    std::size_t step = 0;
    std::size_t size = 0;
    std::size_t volume = 0;
    std::size_t cut_edges = 0;
    std::size_t boundary_nodes = 0;
    std::uint64_t cost = 0;

    double conductance() const {
        return volume == 0 ? 0.0 : static_cast<double>(cut_edges) / static_cast<double>(volume);
    }
};

/// Sample path summary. steps has tau + 1 entries (S_0 .. S_tau); path holds
/// the full sets only when requested.
struct EspTranscript {
    std::vector<EspStepRecord> steps;
    std::vector<NodeSet> path;
    NodeSet final_set;
    StopReason reason = StopReason::none;
    std::uint64_t final_cost = 0;
    std::uint64_t work = 0;

    std::size_t tau() const { return steps.empty() ? 0 : steps.size() - 1; }
};

struct EspRunOptions {
    bool keep_path = false;
    /// Called on S_0 and after every step, before the stop checks.
    std::function<void(const EvolvingSetProcess&)> observer;
};

namespace detail {

inline EspStepRecord snapshot(const EvolvingSetProcess& p) {
    return {p.step(), p.size(), p.volume(), p.cut_edges(), p.boundary_nodes(), p.cost()};
}

inline bool below_threshold(const EvolvingSetProcess& p, double theta) {
    // phi(S) <= theta, compared as cut <= theta * volume.
    return static_cast<double>(p.cut_edges()) <= theta * static_cast<double>(p.volume());
}

}  // namespace detail

/// Volume-biased ESP from {v} under tau(T, B, theta). phi(S_0) is checked
/// before stepping; after each step conductance, horizon and budget are
/// checked in that order.
template <class Gen>
EspTranscript run_esp(EvolvingSetProcess& process, Node v, const StoppingRule& rule, Gen& rng,
                      const EspRunOptions& options = {}) {
    rule.validate();
    process.reset(v);
    EspTranscript out;
    auto record = [&] {
        out.steps.push_back(detail::snapshot(process));
        if (options.keep_path) out.path.push_back(process.current_set());
        if (options.observer) options.observer(process);
    };
    record();
    if (detail::below_threshold(process, rule.theta)) {
        out.reason = StopReason::conductance;
    } else {
        while (true) {
            process.step(rng, /*biased=*/true);
            record();
            if (detail::below_threshold(process, rule.theta)) {
                out.reason = StopReason::conductance;
                break;
            }
            if (process.step() >= rule.max_steps) {
                out.reason = StopReason::horizon;
                break;
            }
            if (process.cost() > rule.budget) {
                out.reason = StopReason::budget;
                break;
            }
        }
    }
    out.final_set = options.keep_path ? out.path.back() : process.current_set();
    out.final_cost = process.cost();
    out.work = process.work();
    return out;
}

template <class Gen>
EspTranscript run_esp(const Graph& g, Node v, const StoppingRule& rule, Gen& rng,
                      const EspRunOptions& options = {}) {
    EvolvingSetProcess process{g};
    return run_esp(process, v, rule, rng, options);
}

// =============================================================================
// Seed-set growth
// =============================================================================

/// Parameters of the seed-set guarantee with constants alpha, beta:
/// T = ceil(4 alpha gamma^-2 ln m), B = ceil(5 alpha M sqrt(T ln m)), theta = gamma.
struct SeedSetParams {
    double gamma = 1.0;
    double volume_target = 0.0;  // M
    double alpha = 5.0;
    double beta = 2.5;

    StoppingRule rule(std::size_t m) const {
        if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("seed set: gamma must lie in (0,1]");
        if (volume_target < 0.0) throw std::invalid_argument("seed set: M must be nonnegative");
        if (!(alpha > 0.0 && beta > 0.0)) throw std::invalid_argument("seed set: alpha and beta must be positive");
        if (m < 2) throw std::invalid_argument("seed set: graph needs at least two edges");
        const double log_m = std::log(static_cast<double>(m));
        StoppingRule r;
        r.max_steps = static_cast<std::size_t>(std::ceil(4.0 * alpha * log_m / (gamma * gamma)));
        r.budget = static_cast<std::uint64_t>(std::ceil(5.0 * alpha * volume_target *
                                                        std::sqrt(static_cast<double>(r.max_steps) * log_m)));
        r.theta = gamma;
        return r;
    }

    /// Probability lower bound 1 - 2/alpha - 1/beta of the guarantee.
    double success_probability() const { return 1.0 - 2.0 / alpha - 1.0 / beta; }
    /// Overlap d(S_tau n S_d)/d(S_tau) >= 1 - beta/10 in the guarantee.
    double overlap_bound() const { return 1.0 - beta / 10.0; }
    /// Largest phi(S) for which the guarantee applies: gamma^2 / (480 alpha ln m).
    double premise_conductance(std::size_t m) const {
        return gamma * gamma / (480.0 * alpha * std::log(static_cast<double>(m)));
    }
};

template <class Gen>
EspTranscript grow_seed_set(const Graph& g, Node v, const SeedSetParams& params, Gen& rng,
                            const EspRunOptions& options = {}) {
    return run_esp(g, v, params.rule(g.edge_count()), rng, options);
}

}  // namespace qet
