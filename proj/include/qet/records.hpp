#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include <json.hpp>

#include "qet/esp.hpp"
#include "qet/graph.hpp"
#include "qet/testers.hpp"

namespace qet {

// Line-delimited JSON records. Every line carries schema_version; readers
// should reject versions they do not know.
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

inline Json to_json(const QueryLedger& l) {
    return Json{{"uniform_node", l.uniform_node},
                {"degree", l.degree},
                {"neighbor", l.neighbor},
                {"quantum_queries", l.quantum_queries},
                {"qram_prep", l.qram_prep},
                {"qram_reflections", l.qram_reflections},
                {"classical", l.classical()},
                {"qram", l.qram()},
                {"total", l.total()}};
}

inline Json to_json(const ResolvedParams& p) {
    return Json{{"n", p.n},
                {"d", p.d},
                {"m", p.m},
                {"phi", p.phi},
                {"eps", p.epsilon},
                {"t", p.walk_length},
                {"delta", p.delta},
                {"K", p.iterations},
                {"theta", p.theta},
                {"M", p.volume_target},
                {"B", p.budget},
                {"T", p.max_steps},
                {"gr_starts", p.gr_starts},
                {"gr_walks", p.gr_walks},
                {"gr_threshold_factor", p.gr_threshold_factor}};
}

inline Json to_json(const IterationRecord& r) {
    return Json{{"index", r.index},
                {"seed", r.seed},
                {"esp_stop", to_string(r.esp_stop)},
                {"esp_steps", r.esp_steps},
                {"esp_cost", r.esp_cost},
                {"set_size", r.set_size},
                {"set_volume", r.set_volume},
                {"set_expansion", r.set_expansion},
                {"estimate", r.estimate},
                {"eps_prime", r.eps_prime},
                {"threshold", r.threshold},
                {"collisions", r.collisions}};
}

struct TrialRecord {
    std::string experiment;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::uint64_t graph_fingerprint = 0;
    std::string profile;
    std::string backend;
    ResolvedParams params;
    Verdict verdict;
    double wall_ms = 0.0;
};

/// One record as a single JSON object. wall_ms is the only field that varies
/// between reruns and is written last.
inline Json to_json(const TrialRecord& r, bool include_iterations = true) {
    const Verdict& v = r.verdict;
    Json j{{"schema_version", kSchemaVersion},
           {"experiment", r.experiment},
           {"trial", r.trial},
           {"seed", r.seed},
           {"graph_fingerprint", r.graph_fingerprint},
           {"tester", to_string(v.tester)},
           {"profile", r.profile},
           {"backend", r.backend},
           {"config", to_json(r.params)},
           {"decision", to_string(v.decision)},
           {"reason", to_string(v.reason)}};
    if (v.witness) {
        j["witness"] = Json{{"size", v.witness->size()}, {"members", v.witness->members()}};
    } else {
        j["witness"] = nullptr;
    }
    j["iterations_run"] = v.iterations.size();
    if (include_iterations) {
        Json rows = Json::array();
        for (const auto& it : v.iterations) rows.push_back(to_json(it));
        j["iterations"] = std::move(rows);
    }
    j["ledger"] = to_json(v.ledger);
    j["cost_split"] = Json{{"esp", v.esp_cost}, {"estimator", v.estimator_cost}, {"qram", v.qram_cost}};
    j["wall_ms"] = r.wall_ms;
    return j;
}

/// ESP transcript rows: step index, set size, d(S), phi(S), cumulative cost.
inline void write_transcript(std::ostream& out, const EspTranscript& t) {
    for (const auto& s : t.steps) {
        out << Json{{"schema_version", kSchemaVersion},
                    {"step", s.step},
                    {"size", s.size},
                    {"volume", s.volume},
                    {"conductance", s.conductance()},
                    {"cost", s.cost}}
                   .dump()
            << '\n';
    }
    out << Json{{"schema_version", kSchemaVersion},
                {"stop", to_string(t.reason)},
                {"tau", t.tau()},
                {"final_cost", t.final_cost},
                {"work", t.work}}
               .dump()
        << '\n';
}

}  // namespace qet
