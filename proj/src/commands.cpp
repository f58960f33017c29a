#include "pcsync/commands.hpp"

#include "pcsync/return_map.hpp"
#include "pcsync/scenarios.hpp"
#include "pcsync/sync_detect.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace pcsync {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading '" + path + "'");
    }
    return ss.str();
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& writer) {
    if (path.empty()) {
        writer(fallback);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    writer(out);
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

double json_gap(double gap) {
    return std::isfinite(gap) ? gap : -1.0;
}

ordered_json audit_json(const AuditReport& a) {
    ordered_json j;
    j["min_interfire_gap"] = json_gap(a.min_interfire_gap);
    j["lemma1_ok"] = a.lemma1_ok;
    j["max_pipeline_per_source"] = a.max_pipeline_per_source;
    j["pending_at_threshold"] = a.pending_at_threshold;
    j["lemma2_ok"] = a.lemma2_ok;
    j["events"] = a.events;
    return j;
}

ordered_json summary_object(const RunSummary& s) {
    ordered_json j;
    j["sync_ever"] = s.sync_ever;
    j["frames_emitted"] = s.frames_emitted;
    j["cluster_count_final"] = s.cluster_count_final;
    if (s.cluster_count_settled) {
        j["cluster_count_settled"] = *s.cluster_count_settled;
    } else {
        j["cluster_count_settled"] = nullptr;
    }
    j["min_interfire_gap"] = json_gap(s.min_interfire_gap);
    j["a2_value"] = s.a2_value;
    j["final_time"] = s.final_time;
    j["audit"] = audit_json(s.audit);
    return j;
}

}  // namespace

std::string summary_json(const RunSummary& summary) {
    return summary_object(summary).dump(2);
}

RunResult execute_run(const RunConfig& config, bool keep_fire_events) {
    RunResult result;
    auto state = NetworkState::init(config.params, initial_phases(config));
    const MatchTolerance cluster_tol{config.cluster_tol, std::max(config.cluster_tol, config.params.tol_time)};

    result.summary.sync_ever = is_completely_synchronized(state).synchronized;
    RunAuditor auditor(state.size(), config.params);
    auto on_step = [&](const StepReport& report, const NetworkState& s) {
        auditor.observe(report);
        if (!result.summary.sync_ever && is_completely_synchronized(s).synchronized) {
            result.summary.sync_ever = true;
        }
        if (keep_fire_events) {
            for (int i : report.fired) {
                result.fire_events.emplace_back(report.event_time, i);
            }
        }
    };

    if (config.strobe) {
        std::vector<int> cluster_history;
        result.frames = stroboscopic_run(
            state, config.strobe->ref, config.strobe->frames,
            [&](const StroboscopicFrame&, const NetworkState& s) {
                cluster_history.push_back(static_cast<int>(cluster_partition(s, cluster_tol).count()));
            },
            on_step);
        result.summary.frames_emitted = static_cast<int>(result.frames.size());
        result.summary.cluster_count_settled = settled_value(cluster_history, config.settle_window);
    } else if (config.horizon) {
        state.run_until_time(*config.horizon, on_step);
    } else {
        throw ValidationError("configuration has neither \"horizon\" nor \"strobe\"");
    }

    auditor.merge_fire_log(state.fire_log());
    result.summary.audit = auditor.report();
    result.summary.min_interfire_gap = result.summary.audit.min_interfire_gap;
    result.summary.cluster_count_final = static_cast<int>(cluster_partition(state, cluster_tol).count());
    result.summary.a2_value = config.assumptions.a2_value;
    result.summary.final_time = state.now();
    return result;
}

void write_strobe_csv(std::ostream& out, const std::vector<StroboscopicFrame>& frames, int n) {
    out << "k,t_k";
    for (int i = 0; i < n; ++i) {
        out << ",phi_" << i;
    }
    out << '\n';
    for (const auto& frame : frames) {
        out << frame.k << ',' << fmt17(frame.t_k);
        for (double p : frame.phases) {
            out << ',' << fmt17(p);
        }
        out << '\n';
    }
}

void write_strobe_svg(std::ostream& out, const std::vector<StroboscopicFrame>& frames, int n) {
    constexpr double kWidth = 800.0;
    constexpr double kHeight = 400.0;
    constexpr double kMargin = 40.0;
    const double k_max = frames.empty() ? 1.0 : std::max(1.0, static_cast<double>(frames.back().k));
    auto x_of = [&](int k) { return kMargin + (kWidth - 2 * kMargin) * (k - 1) / std::max(1.0, k_max - 1); };
    auto y_of = [&](double p) { return kHeight - kMargin - (kHeight - 2 * kMargin) * p; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << y_of(0) << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
        << y_of(0) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << y_of(0) << "\" x2=\"" << kMargin << "\" y2=\"" << y_of(1)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 8 << "\" font-size=\"12\">k</text>\n";
    out << "<text x=\"8\" y=\"" << kHeight / 2 << "\" font-size=\"12\">phase</text>\n";
    out << "<g fill=\"black\">\n";
    for (const auto& frame : frames) {
        for (int i = 0; i < n && i < static_cast<int>(frame.phases.size()); ++i) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"0.8\"/>\n", x_of(frame.k),
                          y_of(frame.phases[i]));
            out << buf;
        }
    }
    out << "</g>\n</svg>\n";
}

ReturnMapResult run_returnmap(const RunConfig& config, const ReturnMapConfig& rm) {
    const auto& params = config.params;
    const TwoCliqueState s0{rm.theta0, rm.p, rm.q};
    s0.validate();
    if (rm.p + rm.q != params.coupling.n) {
        throw ValidationError("returnmap sizes p + q must equal n");
    }
    const auto orbit = iterate_return_map(s0, rm.steps, params.curve, params.coupling, params.tol_phase);

    ReturnMapResult result;
    result.min_theta = rm.steps > 0 ? orbit.min_theta : s0.theta;
    result.reached_tolerance = orbit.reached_tolerance;
    result.rows.reserve(orbit.states.size());
    result.rows.push_back({0, orbit.states.front(), std::nullopt});
    for (int k = 1; k < static_cast<int>(orbit.states.size()); ++k) {
        OrbitRow row{k, orbit.states[k], std::nullopt};
        const auto& prev = orbit.states[k - 1];
        if (rm.oracle_every > 0 && k % rm.oracle_every == 0 && prev.theta > 0.0) {
            const auto oracle = two_clique_oracle_step(prev.theta, prev.p, prev.q, params);
            if (oracle.p != row.state.p || oracle.q != row.state.q) {
                throw StructuralError("engine and map disagree on clique orientation at step " + std::to_string(k));
            }
            row.oracle_delta = std::abs(oracle.theta - row.state.theta);
            result.max_oracle_delta = std::max(result.max_oracle_delta, *row.oracle_delta);
            ++result.oracle_samples;
        }
        result.rows.push_back(row);
    }
    return result;
}

void write_orbit_csv(std::ostream& out, const ReturnMapResult& result) {
    out << "step,theta,p,q,oracle_delta\n";
    for (const auto& row : result.rows) {
        out << row.step << ',' << fmt17(row.state.theta) << ',' << row.state.p << ',' << row.state.q << ',';
        if (row.oracle_delta) {
            out << fmt17(*row.oracle_delta);
        }
        out << '\n';
    }
}

namespace {

struct CliOptions {
    std::string config_path;
    bool strict = false;
    std::string output_path;
    std::string format;
    int trials = 1;
    int threads = 1;
    std::optional<double> theta0;
    std::optional<int> p;
    std::optional<int> q;
    std::optional<int> steps;
    std::optional<int> oracle_every;
};

RunConfig load(const CliOptions& opts, std::ostream& err) {
    RunConfig cfg = parse_config(read_file(opts.config_path), ParseOptions{opts.strict});
    if (!opts.output_path.empty()) {
        cfg.output.path = opts.output_path;
    }
    if (opts.format == "csv") {
        cfg.output.format = OutputConfig::Format::Csv;
    } else if (opts.format == "svg") {
        cfg.output.format = OutputConfig::Format::Svg;
    }
    for (const auto& w : cfg.warnings) {
        err << "warning: " << w << '\n';
    }
    return cfg;
}

int cmd_validate(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(opts, err);
    ordered_json j;
    j["n"] = cfg.params.coupling.n;
    j["epsilon"] = cfg.params.coupling.epsilon;
    j["tau"] = cfg.params.coupling.tau;
    j["a2_value"] = cfg.assumptions.a2_value;
    j["a2_holds"] = cfg.assumptions.a2_holds;
    j["margin"] = cfg.assumptions.margin;
    j["warnings"] = cfg.warnings;
    out << j.dump(2) << '\n';
    return exit_code::kOk;
}

int cmd_batch(const RunConfig& cfg, const CliOptions& opts, bool audit_mode, std::ostream& out) {
    if (!cfg.horizon) {
        throw ValidationError("--trials requires a horizon-mode configuration");
    }
    InitSampler sampler;
    if (cfg.init.mode == InitConfig::Mode::Explicit) {
        sampler = [phases = cfg.init.phases](std::uint64_t, int) { return phases; };
    } else {
        sampler = uniform_sampler(cfg.init.low, cfg.init.high);
    }
    DesyncOptions options;
    options.base_seed = cfg.seed;
    options.threads = opts.threads;
    options.cluster_tol = {cfg.cluster_tol, std::max(cfg.cluster_tol, cfg.params.tol_time)};
    const auto summary = desync_trial(cfg.params, sampler, *cfg.horizon, opts.trials, options);

    ordered_json j;
    j["trials"] = opts.trials;
    j["sync_detected_count"] = summary.sync_detected_count;
    j["min_spread"] = summary.min_spread;
    j["median_spread"] = summary.median_spread;
    ordered_json hist = ordered_json::object();
    for (const auto& [clusters, count] : summary.cluster_histogram) {
        hist[std::to_string(clusters)] = count;
    }
    j["cluster_histogram"] = hist;
    j["a2_value"] = cfg.assumptions.a2_value;
    bool audits_ok = true;
    ordered_json per_trial = ordered_json::array();
    for (const auto& t : summary.trials) {
        ordered_json row;
        row["seed"] = t.seed;
        row["sync_detected"] = t.sync_detected;
        row["terminal_spread"] = t.terminal_spread;
        row["final_clusters"] = t.final_clusters;
        row["audit"] = audit_json(t.audit);
        per_trial.push_back(row);
        audits_ok = audits_ok && t.audit.lemma1_ok && t.audit.lemma2_ok;
    }
    j["audits_ok"] = audits_ok;
    j["per_trial"] = per_trial;
    out << j.dump(2) << '\n';
    return audit_mode && !audits_ok ? exit_code::kAudit : exit_code::kOk;
}

int cmd_simulate(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(opts, err);
    if (opts.trials > 1) {
        return cmd_batch(cfg, opts, false, out);
    }
    const bool want_events = !cfg.output.path.empty();
    const RunResult result = execute_run(cfg, want_events);
    if (want_events) {
        emit(cfg.output.path, out, [&](std::ostream& os) {
            os << "t,oscillator\n";
            for (const auto& [t, i] : result.fire_events) {
                os << fmt17(t) << ',' << i << '\n';
            }
        });
    }
    out << summary_json(result.summary) << '\n';
    return exit_code::kOk;
}

int cmd_strobe(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(opts, err);
    if (!cfg.strobe) {
        throw ConfigError("strobe", "the strobe command needs a \"strobe\" block");
    }
    const RunResult result = execute_run(cfg);
    const int n = cfg.params.coupling.n;
    // With no output path the frames go to stdout and the summary to stderr.
    std::ostream& summary_stream = cfg.output.path.empty() ? err : out;
    emit(cfg.output.path, out, [&](std::ostream& os) {
        if (cfg.output.format == OutputConfig::Format::Svg) {
            write_strobe_svg(os, result.frames, n);
        } else {
            write_strobe_csv(os, result.frames, n);
        }
    });
    summary_stream << summary_json(result.summary) << '\n';
    return exit_code::kOk;
}

int cmd_audit(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(opts, err);
    if (opts.trials > 1) {
        return cmd_batch(cfg, opts, true, out);
    }
    const RunResult result = execute_run(cfg);
    out << summary_json(result.summary) << '\n';
    const auto& a = result.summary.audit;
    if (!a.lemma1_ok || !a.lemma2_ok) {
        err << "audit failed: lemma1_ok=" << a.lemma1_ok << " lemma2_ok=" << a.lemma2_ok << '\n';
        return exit_code::kAudit;
    }
    return exit_code::kOk;
}

int cmd_returnmap(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(opts, err);
    ReturnMapConfig rm = cfg.returnmap.value_or(ReturnMapConfig{});
    if (!cfg.returnmap && !(opts.theta0 && opts.p && opts.q)) {
        throw ConfigError("returnmap", "give a \"returnmap\" block or --theta0, --p and --q");
    }
    if (opts.theta0) rm.theta0 = *opts.theta0;
    if (opts.p) rm.p = *opts.p;
    if (opts.q) rm.q = *opts.q;
    if (opts.steps) rm.steps = *opts.steps;
    if (opts.oracle_every) rm.oracle_every = *opts.oracle_every;
    if (rm.p < 1 || rm.q < 1 || rm.p + rm.q != cfg.params.coupling.n) {
        throw ConfigError("returnmap.p", "clique sizes must be >= 1 and satisfy p + q = n");
    }
    if (!(rm.theta0 >= 0.0 && rm.theta0 < 1.0)) {
        throw ConfigError("returnmap.theta0", "phase gap must lie in [0, 1)");
    }
    if (!cfg.assumptions.a2_holds) {
        throw AssumptionViolation("the return map is only defined when f(2 tau) + N epsilon < 1");
    }

    const ReturnMapResult result = run_returnmap(cfg, rm);
    std::ostream& summary_stream = cfg.output.path.empty() ? err : out;
    emit(cfg.output.path, out, [&](std::ostream& os) { write_orbit_csv(os, result); });
    ordered_json j;
    j["steps"] = rm.steps;
    j["min_theta"] = result.min_theta;
    j["reached_tolerance"] = result.reached_tolerance;
    j["oracle_samples"] = result.oracle_samples;
    j["max_oracle_delta"] = result.max_oracle_delta;
    j["a2_value"] = cfg.assumptions.a2_value;
    summary_stream << j.dump(2) << '\n';
    return exit_code::kOk;
}

int cmd_fig3(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(opts, err);
    Fig3Trace trace;
    try {
        trace = fig3_trace(cfg.params);
    } catch (const InfeasibleScenario& e) {
        throw ConfigError("epsilon", e.what());
    }
    std::ostream& summary_stream = cfg.output.path.empty() ? err : out;
    emit(cfg.output.path, out, [&](std::ostream& os) {
        os << "t,phi_a,phi_b,pending_a,pending_b,phase_equal,synchronized,event_boundary\n";
        for (const auto& r : trace.rows) {
            os << fmt17(r.t) << ',' << fmt17(r.phi_a) << ',' << fmt17(r.phi_b) << ','
               << (r.pending_a ? fmt17(*r.pending_a) : "") << ',' << (r.pending_b ? fmt17(*r.pending_b) : "")
               << ',' << r.phase_equal << ',' << r.synchronized << ',' << r.event_boundary << '\n';
        }
    });
    ordered_json j;
    j["phi"] = trace.phi;
    j["tau"] = trace.tau;
    j["equal_window_holds"] = trace.equal_window_holds;
    j["split_after"] = trace.split_after;
    summary_stream << j.dump(2) << '\n';
    return trace.equal_window_holds && trace.split_after ? exit_code::kOk : exit_code::kAudit;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Event-driven simulator for delay-coupled pulse oscillator networks", "pcsync_cli"};
    app.require_subcommand(1);

    CliOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opts.config_path, "JSON run configuration")->required();
        sub->add_flag("--strict", opts.strict, "treat f(2 tau) + N epsilon >= 1 as an error");
        sub->add_option("-o,--output", opts.output_path, "output file (overrides output.path)");
        sub->add_option("--format", opts.format, "csv or svg (overrides output.format)")
            ->check(CLI::IsMember({"csv", "svg"}));
    };
    auto add_batch = [&](CLI::App* sub) {
        sub->add_option("--trials", opts.trials, "independent seeded trials (horizon mode)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--threads", opts.threads, "worker threads for --trials")->check(CLI::PositiveNumber);
    };

    auto* validate = app.add_subcommand("validate", "check a configuration and report f(2 tau) + N epsilon");
    auto* simulate = app.add_subcommand("simulate", "run to the configured horizon");
    auto* strobe = app.add_subcommand("strobe", "emit stroboscopic frames as CSV or SVG");
    auto* audit = app.add_subcommand("audit", "run with firing-gap and pipeline audits");
    auto* returnmap = app.add_subcommand("returnmap", "iterate the two-clique return map");
    auto* fig3 = app.add_subcommand("fig3", "trace the two-oscillator equal-phase counterexample");
    for (auto* sub : {validate, simulate, strobe, audit, returnmap, fig3}) {
        add_common(sub);
    }
    add_batch(simulate);
    add_batch(audit);
    returnmap->add_option("--theta0", opts.theta0, "initial phase gap");
    returnmap->add_option("--p", opts.p, "size of the trailing clique");
    returnmap->add_option("--q", opts.q, "size of the clique at threshold");
    returnmap->add_option("--steps", opts.steps, "map iterations");
    returnmap->add_option("--oracle-every", opts.oracle_every, "engine comparison stride (0 disables)");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("pcsync_cli");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) {
        argv.push_back(a.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kUsage;
    }

    try {
        if (*validate) return cmd_validate(opts, out, err);
        if (*simulate) return cmd_simulate(opts, out, err);
        if (*strobe) return cmd_strobe(opts, out, err);
        if (*audit) return cmd_audit(opts, out, err);
        if (*returnmap) return cmd_returnmap(opts, out, err);
        if (*fig3) return cmd_fig3(opts, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kUsage;
    } catch (const AssumptionViolation& e) {
        err << "assumption violated: " << e.what() << '\n';
        return exit_code::kAssumption;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_code::kIo;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_code::kUsage;
    } catch (const DomainError& e) {
        err << "numerical error: " << e.what() << '\n';
        return exit_code::kIo;
    } catch (const StructuralError& e) {
        err << "engine inconsistency: " << e.what() << '\n';
        return exit_code::kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kIo;
    }
    return exit_code::kUsage;
}

}  // namespace pcsync
