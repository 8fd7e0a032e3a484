// qet-lab: instance generation, tester experiments, property suites and
// scaling fits over the header-only library.
//
// Exit codes: 0 success, 1 property failure, 2 usage error, 3 I/O error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qet/esp.hpp"
#include "qet/generators.hpp"
#include "qet/graph.hpp"
#include "qet/records.hpp"
#include "qet/scaling.hpp"
#include "qet/testers.hpp"
#include "qet/verify.hpp"

namespace {

enum Exit { kOk = 0, kPropertyFailure = 1, kUsage = 2, kIo = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path);
        if (!file_) throw IoError("cannot open '" + path + "' for writing");
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw IoError("write failed");
    }

private:
    std::ofstream file_;
};

qet::Graph load_graph(const std::string& path, std::optional<std::size_t> pad_to = std::nullopt) {
    std::ifstream in{path};
    if (!in) throw IoError("cannot open graph file '" + path + "'");
    try {
        return qet::read_edge_list(in, pad_to);
    } catch (const std::invalid_argument& e) {
        throw IoError(path + ": " + e.what());
    }
}

/// Runs body(i) for i in [0, count) over up to `threads` workers.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock{failure_mutex};
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct TesterFlags {
    std::string tester = "seeded-qff";
    double phi = 0.5;
    double eps = 0.01;
    std::string profile = "desk";
    std::string backend = "noisy-model";
    double rd = 1.0;
    std::vector<std::string> overrides;
    std::size_t trials = 30;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string out;
    std::string experiment;
    bool iterations = true;

    void attach(CLI::App& app) {
        app.add_option("--tester", tester, "gr | qff | seeded-qff | constant")
            ->check(CLI::IsMember({"gr", "qff", "seeded-qff", "constant"}));
        app.add_option("--phi", phi, "expansion parameter Phi");
        app.add_option("--eps", eps, "promise parameter epsilon, in (0, 1/16)");
        app.add_option("--profile", profile, "paper | desk")->check(CLI::IsMember({"paper", "desk"}));
        app.add_option("--backend", backend, "exact | noisy-model")->check(CLI::IsMember({"exact", "noisy-model", "noisy"}));
        app.add_option("--rd", rd, "degree constant r_d (recorded only)");
        app.add_option("--override", overrides, "key=value; keys K t T B theta M scale gr_walks gr_threshold");
        app.add_option("--trials", trials, "independent tester runs")->check(CLI::PositiveNumber);
        app.add_option("--seed", seed, "master seed");
        app.add_option("--threads", threads, "worker threads across trials")->check(CLI::PositiveNumber);
        app.add_option("--out", out, "JSON-lines output path (default stdout)");
        app.add_option("--experiment", experiment, "experiment id written to every record");
        app.add_flag("!--no-iterations", iterations, "omit per-iteration rows from records");
    }

    qet::TesterConfig config(const qet::Graph& g) const {
        qet::TesterConfig c;
        c.n = g.node_count();
        c.d = g.degree_bound();
        c.phi = phi;
        c.epsilon = eps;
        c.profile = qet::parse_profile(profile);
        c.backend = qet::parse_backend(backend);
        c.rd_constant = rd;
        for (const auto& o : overrides) c.overrides.set(o);
        return c;
    }
};

struct TrialSummary {
    std::size_t accepts = 0;
    std::map<std::string, std::size_t> reasons;
    double total = 0.0, classical = 0.0, quantum = 0.0, qram = 0.0, esp = 0.0, estimator = 0.0;
};

/// Runs the trials, writes records in trial order and returns the summary.
TrialSummary run_trials(const qet::Graph& g, const TesterFlags& f, std::ostream* out) {
    const qet::TesterConfig cfg = f.config(g);
    const qet::ResolvedParams params = qet::algorithm2_params(cfg);
    const qet::TesterKind kind = qet::parse_tester(f.tester);
    std::vector<qet::TrialRecord> records(f.trials);
    parallel_for(f.trials, f.threads, [&](std::size_t i) {
        auto rng = qet::make_rng(f.seed, i, qet::Stream::tester);
        const auto start = std::chrono::steady_clock::now();
        qet::TrialRecord& r = records[i];
        r.verdict = qet::run_tester(kind, g, cfg, rng);
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        r.experiment = f.experiment.empty() ? f.tester : f.experiment;
        r.trial = i;
        r.seed = f.seed;
        r.graph_fingerprint = g.fingerprint();
        r.profile = qet::to_string(cfg.profile);
        r.backend = qet::to_string(cfg.backend);
        r.params = params;
    });
    TrialSummary s;
    for (const auto& r : records) {
        if (out) *out << qet::to_json(r, f.iterations).dump() << '\n';
        const auto& v = r.verdict;
        s.accepts += v.decision == qet::Decision::accept;
        ++s.reasons[qet::to_string(v.reason)];
        s.total += static_cast<double>(v.ledger.total());
        s.classical += static_cast<double>(v.ledger.classical());
        s.quantum += static_cast<double>(v.ledger.quantum_queries);
        s.qram += static_cast<double>(v.ledger.qram());
        s.esp += static_cast<double>(v.esp_cost);
        s.estimator += static_cast<double>(v.estimator_cost);
    }
    const double k = static_cast<double>(records.size());
    for (double* x : {&s.total, &s.classical, &s.quantum, &s.qram, &s.esp, &s.estimator}) *x /= k;
    return s;
}

int cmd_gen(const std::string& family, std::size_t n, std::size_t d, std::size_t bridges, std::uint64_t seed,
            const std::string& out_path) {
    qet::GraphSpec spec;
    spec.family = qet::parse_family(family);
    spec.n = n;
    spec.d = d;
    spec.bridges = bridges;
    const qet::Graph g = qet::generate(spec, seed);
    Output out{out_path};
    qet::write_edge_list(out.stream(), g);
    out.finish();
    std::ostream& log = out_path.empty() || out_path == "-" ? std::cerr : std::cout;
    log << "n " << g.node_count() << "\nm " << g.edge_count() << "\nd " << g.degree_bound() << '\n';
    if (spec.family == qet::Family::dumbbell || spec.family == qet::Family::regular_dumbbell) {
        std::vector<qet::Node> left(g.node_count() / 2);
        for (qet::Node v = 0; v < left.size(); ++v) left[v] = v;
        const auto c = qet::cut_stats(g, qet::NodeSet{g, left});
        log << "side_conductance " << c.cut_edges << '/' << c.volume << '\n';
    }
    if (g.node_count() <= qet::kBruteforceMaxNodes) {
        log << "expansion " << qet::expansion_bruteforce(g) << '\n';
        log << "conductance " << qet::conductance_bruteforce(g) << '\n';
    }
    return kOk;
}

int cmd_test(const std::string& graph_path, std::optional<std::size_t> pad_to, const TesterFlags& f) {
    const qet::Graph g = load_graph(graph_path, pad_to);
    Output out{f.out};
    const bool to_stdout = f.out.empty() || f.out == "-";
    const TrialSummary s = run_trials(g, f, &out.stream());
    out.finish();
    std::ostream& log = to_stdout ? std::cerr : std::cout;
    const double k = static_cast<double>(f.trials);
    log << std::setprecision(6) << "tester " << f.tester << " trials " << f.trials << '\n'
        << "accept_rate " << static_cast<double>(s.accepts) / k << '\n'
        << "reject_rate " << static_cast<double>(f.trials - s.accepts) / k << '\n';
    for (const auto& [reason, count] : s.reasons) log << "reason " << reason << ' ' << count << '\n';
    log << "mean_total_cost " << s.total << "\nmean_classical " << s.classical << "\nmean_quantum "
        << s.quantum << "\nmean_qram " << s.qram << '\n';
    return kOk;
}

int cmd_verify(const std::vector<std::string>& suites, const qet::VerifyOptions& opts) {
    std::vector<std::string> names;
    for (const auto& s : suites) {
        if (s == "all") {
            names = qet::suite_names();
            break;
        }
        names.push_back(s);
    }
    bool ok = true;
    for (const auto& name : names) {
        const auto report = qet::run_suite(name, opts);
        for (const auto& c : report.checks) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << name << ": " << c.name << "  measured=" << c.measured
                      << " bound=" << c.bound;
            if (!c.detail.empty()) std::cout << "  (" << c.detail << ')';
            std::cout << '\n';
        }
        ok = ok && report.passed();
    }
    return ok ? kOk : kPropertyFailure;
}

int cmd_scaling(const std::vector<std::size_t>& sizes, std::size_t d, const std::string& family, TesterFlags f) {
    if (sizes.size() < 4) throw std::invalid_argument("scaling needs at least four sizes");
    if (!std::is_sorted(sizes.begin(), sizes.end()) ||
        std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end())
        throw std::invalid_argument("scaling sizes must be strictly ascending");
    Output out{f.out};
    std::vector<double> xs, total, esp, estimator, classical;
    for (std::size_t n : sizes) {
        qet::GraphSpec spec;
        spec.family = qet::parse_family(family);
        spec.n = spec.family == qet::Family::regular_dumbbell || spec.family == qet::Family::dumbbell ? n / 2 : n;
        spec.d = d;
        const qet::Graph g = qet::generate(spec, qet::derive_seed(f.seed, n, qet::Stream::graph));
        const TrialSummary s = run_trials(g, f, nullptr);
        xs.push_back(static_cast<double>(g.node_count()));
        total.push_back(s.total);
        esp.push_back(s.esp);
        estimator.push_back(s.estimator);
        classical.push_back(s.classical);
        out.stream() << qet::Json{{"schema_version", qet::kSchemaVersion},
                                  {"tester", f.tester},
                                  {"n", g.node_count()},
                                  {"graph_fingerprint", g.fingerprint()},
                                  {"trials", f.trials},
                                  {"accept_rate", static_cast<double>(s.accepts) / static_cast<double>(f.trials)},
                                  {"mean_total", s.total},
                                  {"mean_classical", s.classical},
                                  {"mean_esp", s.esp},
                                  {"mean_estimator", s.estimator},
                                  {"config", qet::to_json(qet::algorithm2_params(f.config(g)))}}
                            .dump()
                     << '\n';
    }
    auto slope = [&](const std::vector<double>& y) -> std::optional<qet::LineFit> {
        if (std::any_of(y.begin(), y.end(), [](double v) { return !(v > 0.0); })) return std::nullopt;
        return qet::fit_loglog(xs, y);
    };
    const auto fit = slope(total);
    qet::Json summary{{"schema_version", qet::kSchemaVersion}, {"tester", f.tester}, {"fit", "loglog"}};
    auto put = [&](const char* key, const std::optional<qet::LineFit>& lf) {
        summary[key] = lf ? qet::Json(lf->slope) : qet::Json(nullptr);
    };
    put("slope_total", fit);
    put("slope_esp", slope(esp));
    put("slope_estimator", slope(estimator));
    put("slope_classical", slope(classical));
    summary["r_squared"] = fit ? qet::Json(fit->r_squared) : qet::Json(nullptr);
    out.stream() << summary.dump() << '\n';
    out.finish();
    std::ostream& log = f.out.empty() || f.out == "-" ? std::cerr : std::cout;
    log << "tester " << f.tester << " slope_total " << (fit ? fit->slope : 0.0) << '\n';
    for (const char* key : {"slope_esp", "slope_estimator", "slope_classical"})
        log << key << ' ' << (summary[key].is_null() ? std::string{"n/a"} : summary[key].dump()) << '\n';
    return kOk;
}

int cmd_esp(const std::string& graph_path, qet::Node v, std::size_t T, std::uint64_t B, double theta,
            std::uint64_t seed, const std::string& out_path) {
    const qet::Graph g = load_graph(graph_path);
    qet::StoppingRule rule;
    rule.max_steps = T;
    rule.budget = B;
    rule.theta = theta;
    auto rng = qet::make_rng(seed, 0, qet::Stream::esp);
    const auto transcript = qet::run_esp(g, v, rule, rng);
    Output out{out_path};
    qet::write_transcript(out.stream(), transcript);
    out.finish();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qet-lab: expansion-tester laboratory"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate an instance in edge-list format");
    std::string family = "random-regular", gen_out;
    std::size_t gen_n = 0, gen_d = 0, bridges = 1;
    std::uint64_t gen_seed = 1;
    gen->add_option("--family", family, "random-regular | dumbbell | regular-dumbbell | complete")->required();
    gen->add_option("--n", gen_n, "node count (half size for dumbbells)")->required();
    gen->add_option("--d", gen_d, "degree bound after padding (0 = natural)");
    gen->add_option("--bridges", bridges, "bridge edges for dumbbells");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output path (default stdout)");

    auto* test = app.add_subcommand("test", "run a tester repeatedly on one instance");
    std::string graph_path;
    TesterFlags test_flags;
    std::optional<std::size_t> pad_to;
    test->add_option("--graph", graph_path, "edge-list file")->required();
    test->add_option("--pad-to", pad_to, "pad every node to this many slots on load");
    test_flags.attach(*test);

    auto* verify = app.add_subcommand("verify", "run property suites");
    std::vector<std::string> suites{"all"};
    qet::VerifyOptions vopts;
    std::vector<std::string> known = qet::suite_names();
    known.push_back("all");
    verify->add_option("suite", suites, "suite names or 'all'")->check(CLI::IsMember(known));
    verify->add_option("--seed", vopts.seed, "master seed");
    verify->add_option("--esp-runs", vopts.esp_runs, "ESP runs per statistical case")->check(CLI::PositiveNumber);

    auto* scaling = app.add_subcommand("scaling", "fit log-log ledger slopes across n");
    std::vector<std::size_t> sizes{256, 512, 1024, 2048, 4096};
    std::size_t scale_d = 4;
    std::string scale_family = "random-regular";
    TesterFlags scale_flags;
    scale_flags.trials = 5;
    scaling->add_option("--n-list", sizes, "ascending node counts")->delimiter(',');
    scaling->add_option("--d", scale_d, "degree");
    scaling->add_option("--family", scale_family, "instance family");
    scale_flags.attach(*scaling);

    auto* esp = app.add_subcommand("esp", "run one volume-biased ESP and write its transcript");
    std::string esp_graph, esp_out;
    qet::Node esp_node = 0;
    std::size_t esp_T = 100;
    std::uint64_t esp_B = std::numeric_limits<std::uint64_t>::max();
    double esp_theta = 0.0;
    std::uint64_t esp_seed = 1;
    esp->add_option("--graph", esp_graph, "edge-list file")->required();
    esp->add_option("--node", esp_node, "start node");
    esp->add_option("--T", esp_T, "step horizon")->check(CLI::PositiveNumber);
    esp->add_option("--B", esp_B, "cost budget");
    esp->add_option("--theta", esp_theta, "conductance threshold")->check(CLI::Range(0.0, 1.0));
    esp->add_option("--seed", esp_seed, "seed");
    esp->add_option("--out", esp_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*gen) return cmd_gen(family, gen_n, gen_d, bridges, gen_seed, gen_out);
        if (*test) return cmd_test(graph_path, pad_to, test_flags);
        if (*verify) return cmd_verify(suites, vopts);
        if (*scaling) return cmd_scaling(sizes, scale_d, scale_family, scale_flags);
        if (*esp) return cmd_esp(esp_graph, esp_node, esp_T, esp_B, esp_theta, esp_seed, esp_out);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}
