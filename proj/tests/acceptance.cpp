// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "pcsync/audit.hpp"
#include "pcsync/commands.hpp"
#include "pcsync/return_map.hpp"
#include "pcsync/scenarios.hpp"
#include "pcsync/strobe.hpp"
#include "pcsync/sync_detect.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>

using namespace pcsync;

namespace {

// Pinned tolerances and budgets.
constexpr double kA2Expected = 0.5789;
constexpr double kA2Tol = 1e-4;
constexpr double kCompositionTol = 1e-10;
constexpr double kExpansivityMargin = 1e-9;
constexpr double kFdStep = 1e-5;
constexpr double kMapOracleTol = 1e-9;
constexpr int kPropertySamples = 1000;
constexpr int kScanPoints = 1000;
constexpr int kDesyncTrials = 50;
constexpr double kDesyncHorizon = 100.0;
constexpr double kDesyncBudgetSeconds = 60.0;
constexpr int kSim1Seeds = 10;
constexpr int kStrobeFrames = 500;
constexpr int kSim2Seeds = 10;
constexpr int kSim2RequiredMultiCluster = 9;
constexpr double kSim2BudgetSeconds = 120.0;
constexpr int kAuditRuns = 100;
constexpr double kAuditHorizon = 30.0;
constexpr int kMapDraws = 100;
constexpr int kOrbitCount = 10;
constexpr int kOrbitSteps = 10000;
constexpr std::uint64_t kBaseSeed = 20240601;

ModelParams reference_params() {
    ModelParams p;
    p.coupling = {100, 0.001, 0.1};
    return p;
}

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s [%d] %s :: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion_1() {
    const auto p = reference_params();
    const auto a = validate_assumptions(p.curve, p.coupling);
    const bool pass = std::abs(a.a2_value - kA2Expected) <= kA2Tol && a.a2_holds;
    report(1, pass, "f(2 tau) + N eps for I=1.05, N=100, eps=0.001, tau=0.1",
           fmt("value=%.10f expected=%.4f+-%.0e holds=%d", a.a2_value, kA2Expected, kA2Tol, a.a2_holds));
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    DesyncOptions opts;
    opts.base_seed = kBaseSeed;
    const auto s = desync_trial(reference_params(), uniform_sampler(0.0, 1.0), kDesyncHorizon, kDesyncTrials, opts);
    const double elapsed = seconds_since(t0);
    const bool pass = s.sync_detected_count == 0 && elapsed < kDesyncBudgetSeconds;
    report(2, pass, "no complete synchronization in 50 random trials to t=100",
           fmt("synced=%d/%d min_spread=%.4g median_spread=%.4g time=%.2fs (budget %.0fs)", s.sync_detected_count,
               kDesyncTrials, s.min_spread, s.median_spread, elapsed, kDesyncBudgetSeconds));
}

void criterion_3() {
    const auto p = reference_params();
    bool ever_synced = false;
    double min_frame_spread = INFINITY;
    int frames_total = 0;
    for (int seed = 0; seed < kSim1Seeds; ++seed) {
        auto state = NetworkState::init(p, sample_uniform_phases(trial_seed(kBaseSeed + 1, seed), 100, 0.0, 0.01));
        ever_synced = ever_synced || is_completely_synchronized(state).synchronized;
        const auto frames = stroboscopic_run(
            state, 0, kStrobeFrames,
            [&](const StroboscopicFrame& f, const NetworkState&) {
                min_frame_spread = std::min(min_frame_spread, phase_spread(f.phases));
                ++frames_total;
            },
            [&](const StepReport&, const NetworkState& s) {
                ever_synced = ever_synced || is_completely_synchronized(s).synchronized;
            });
        (void)frames;
    }
    const bool pass = !ever_synced && min_frame_spread > p.tol_phase && frames_total == kSim1Seeds * kStrobeFrames;
    report(3, pass, "inits on (0, 0.01], 500 strobe frames: no sync, spread > tol_phase in every frame",
           fmt("seeds=%d frames=%d synced=%d min_frame_spread=%.6g tol_phase=%.0e", kSim1Seeds, frames_total,
               ever_synced, min_frame_spread, p.tol_phase));
}

void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    int multi = 0;
    std::string counts;
    for (int seed = 0; seed < kSim2Seeds; ++seed) {
        RunConfig cfg;
        cfg.params = reference_params();
        cfg.seed = trial_seed(kBaseSeed + 2, seed);
        cfg.init = {InitConfig::Mode::Uniform, 0.0, 1.0, {}};
        cfg.strobe = StrobeConfig{0, kStrobeFrames};
        cfg.assumptions = validate_assumptions(cfg.params.curve, cfg.params.coupling);
        const auto r = execute_run(cfg);
        const auto settled = r.summary.cluster_count_settled;
        if (settled && *settled >= 2) {
            ++multi;
        }
        counts += (counts.empty() ? "" : ",") + (settled ? std::to_string(*settled) : std::string("unsettled"));
    }
    const double elapsed = seconds_since(t0);
    const bool pass = multi >= kSim2RequiredMultiCluster && elapsed < kSim2BudgetSeconds;
    report(4, pass, "inits on (0, 1], 10 seeds: settled cluster count >= 2 in at least 9",
           fmt("multi_cluster=%d/%d settled_counts=[%s] window=50 cluster_tol=1e-6 time=%.2fs (budget %.0fs)", multi,
               kSim2Seeds, counts.c_str(), elapsed, kSim2BudgetSeconds));
}

void criterion_5() {
    std::mt19937_64 gen(kBaseSeed + 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int gap_bad = 0, pipeline_bad = 0;
    double min_ratio = INFINITY;
    int max_pipeline = 0;
    for (int run = 0; run < kAuditRuns; ++run) {
        ModelParams p;
        const double I = 1.01 + 2.0 * unit(gen);
        p.curve = CurveSpec::ms_exponential(I);
        const int n = 2 + static_cast<int>(gen() % 99);
        const double tau = 0.01 + 0.29 * unit(gen);
        const double room = 1.0 - f_eval(p.curve, 2 * tau);
        const double eps = room / n * (0.01 + 0.98 * unit(gen));
        p.coupling = {n, eps, tau};
        if (!validate_assumptions(p.curve, p.coupling).a2_holds) {
            report(5, false, "randomized audit runs", "generated parameters violate f(2 tau) + N eps < 1");
            return;
        }
        auto state = NetworkState::init(p, sample_uniform_phases(gen(), n, 0.0, 1.0));
        RunAuditor auditor(n, p);
        state.run_until_time(kAuditHorizon, [&](const StepReport& r, const NetworkState& s) {
            auditor.observe(r);
            const auto b = check_boundary(s);
            max_pipeline = std::max(max_pipeline, b.max_pipeline_per_source);
            if (b.max_pipeline_per_source > 1 || b.pending_at_threshold) {
                ++pipeline_bad;
            }
        });
        auditor.merge_fire_log(state.fire_log());
        const auto a = auditor.report();
        gap_bad += a.lemma1_ok ? 0 : 1;
        pipeline_bad += a.lemma2_ok ? 0 : 1;
        min_ratio = std::min(min_ratio, a.min_interfire_gap / (2 * tau));
    }
    report(5, gap_bad == 0 && pipeline_bad == 0, "firing-gap and pipeline audits over 100 randomized runs with f(2 tau) + N eps < 1",
           fmt("gap_violations=%d pipeline_violations=%d min(gap/2tau)=%.4f max_pipeline_per_source=%d", gap_bad,
               pipeline_bad, min_ratio, max_pipeline));
}

void criterion_6() {
    const auto p = reference_params();
    std::mt19937_64 gen(kBaseSeed + 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto count = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
    auto eps = [&] {
        static constexpr double kChoices[] = {0.0001, 0.001, 0.01, 0.05};
        return kChoices[gen() % 4];
    };
    auto F = [&](double theta, int m, double e) { return jump(p.curve, e, theta, m); };

    // Each property keeps drawing until kPropertySamples points satisfy its
    // precondition; a property that cannot collect enough points fails.
    struct Tally {
        int checked = 0;
        int violations = 0;
    };
    auto run = [&](const std::function<std::optional<bool>()>& draw) {
        Tally t;
        for (int k = 0; k < 50 * kPropertySamples && t.checked < kPropertySamples; ++k) {
            if (const auto ok = draw()) {
                ++t.checked;
                t.violations += *ok ? 0 : 1;
            }
        }
        return t;
    };

    const Tally mono_theta = run([&]() -> std::optional<bool> {
        double a = unit(gen), b = unit(gen);
        if (a == b) return std::nullopt;
        if (a > b) std::swap(a, b);
        const double e = eps();
        const int m = count(0, 100);
        if (!(F(a, m, e) < 1.0)) return std::nullopt;
        return F(a, m, e) < F(b, m, e);
    });
    const Tally mono_m = run([&]() -> std::optional<bool> {
        const double th = unit(gen);
        const double e = eps();
        const int m1 = count(0, 99);
        const int m2 = count(m1 + 1, 100);
        if (!(F(th, m1, e) < 1.0)) return std::nullopt;
        return F(th, m1, e) < F(th, m2, e);
    });
    const Tally expansive = run([&]() -> std::optional<bool> {
        const double th = kFdStep + (1.0 - 2 * kFdStep) * unit(gen);
        const double e = eps();
        const int m = count(1, 100);
        const double lo = F(th - kFdStep, m, e), hi = F(th + kFdStep, m, e);
        if (!(lo > 0.0 && hi < 1.0)) return std::nullopt;
        return (hi - lo) / (2 * kFdStep) > 1.0 + kExpansivityMargin;
    });
    const Tally superadd = run([&]() -> std::optional<bool> {
        const double th = unit(gen);
        const double d = unit(gen) * (1.0 - th);
        if (!(d > 0.0 && th + d <= 1.0)) return std::nullopt;
        const double e = eps();
        const int m = count(1, 100);
        if (!(F(th + d, m, e) < 1.0)) return std::nullopt;
        return F(th, m, e) + d < F(th + d, m, e);
    });
    double worst_comp = 0.0;
    const Tally compose = run([&]() -> std::optional<bool> {
        const double th = unit(gen);
        const double e = eps();
        const int m = count(0, 100), n = count(0, 100);
        const double diff = std::abs(F(F(th, m, e), n, e) - F(th, m + n, e));
        worst_comp = std::max(worst_comp, diff);
        return diff <= kCompositionTol;
    });
    const Tally chained = run([&]() -> std::optional<bool> {
        const double th = unit(gen);
        const double d1 = unit(gen) * (1.0 - th);
        const double d2 = unit(gen) * (1.0 - th - d1);
        if (!(th + d1 + d2 <= 1.0)) return std::nullopt;
        const double e = eps();
        const int m1 = count(1, 100), m2 = count(1, 100);
        const double rhs = F(th + d1 + d2, m1 + m2, e);
        if (!(rhs < 1.0)) return std::nullopt;
        return F(F(th, m1, e) + d1, m2, e) + d2 <= rhs;
    });

    const Tally all[] = {mono_theta, mono_m, expansive, superadd, compose, chained};
    bool pass = true;
    for (const auto& t : all) {
        pass = pass && t.checked >= kPropertySamples && t.violations == 0;
    }
    report(6, pass, "jump-map monotonicity, expansivity, superadditivity, composition, chained bound; >= 1000 points each",
           fmt("checked/violations mono_theta=%d/%d mono_m=%d/%d expansive=%d/%d superadditive=%d/%d "
               "composition=%d/%d (max diff %.2e, tol %.0e) chained=%d/%d",
               mono_theta.checked, mono_theta.violations, mono_m.checked, mono_m.violations, expansive.checked,
               expansive.violations, superadd.checked, superadd.violations, compose.checked, compose.violations,
               worst_comp, kCompositionTol, chained.checked, chained.violations));
}

void criterion_7() {
    const auto p = reference_params();
    const auto trace = fig3_trace(p);
    int window_rows = 0, window_bad = 0, after_rows = 0, after_bad = 0;
    for (const auto& row : trace.rows) {
        if (row.t > trace.tau + p.tol_time && row.t < trace.tau + trace.phi - p.tol_time) {
            ++window_rows;
            window_bad += (row.phase_equal && !row.synchronized) ? 0 : 1;
        } else if (row.t >= trace.tau + trace.phi - p.tol_time) {
            ++after_rows;
            after_bad += row.phase_equal ? 1 : 0;
        }
    }
    const bool pass = trace.equal_window_holds && trace.split_after && window_rows > 0 && window_bad == 0 &&
                      after_rows > 0 && after_bad == 0;
    report(7, pass, "two-oscillator construction: equal phases on (tau, tau+phi) yet not synchronized, split after",
           fmt("phi=%.12g window_rows=%d window_bad=%d after_rows=%d after_equal=%d", trace.phi, window_rows,
               window_bad, after_rows, after_bad));
}

void criterion_8() {
    const auto p = reference_params();
    std::mt19937_64 gen(kBaseSeed + 5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double worst = 0.0;
    int size_mismatch = 0, errors = 0;
    for (int k = 0; k < kMapDraws; ++k) {
        const double phi = 1e-4 + (0.999 - 1e-4) * unit(gen);
        const int pp = 1 + static_cast<int>(gen() % 99);
        try {
            const auto map = two_clique_map({phi, pp, 100 - pp}, p.curve, p.coupling);
            const auto eng = two_clique_oracle_step(phi, pp, 100 - pp, p);
            worst = std::max(worst, std::abs(map.theta - eng.theta));
            size_mismatch += (map.p == eng.p && map.q == eng.q) ? 0 : 1;
        } catch (const std::exception&) {
            ++errors;
        }
    }

    int nonpositive = 0;
    for (int m : {1, 25, 50, 75, 99}) {
        const int n = 100 - m;
        for (int k = 1; k <= kScanPoints; ++k) {
            const double low = p.coupling.tau * k / (kScanPoints + 1.0);
            const double high = p.coupling.tau + (1.0 - p.coupling.tau) * (k - 1) / static_cast<double>(kScanPoints);
            nonpositive += map_branch(MapBranch::G1, low, m, n, p.curve, p.coupling) > 0.0 ? 0 : 1;
            nonpositive += map_branch(MapBranch::G2, low, m, n, p.curve, p.coupling) > 0.0 ? 0 : 1;
            nonpositive += map_branch(MapBranch::G3, high, m, n, p.curve, p.coupling) > 0.0 ? 0 : 1;
            nonpositive += map_branch(MapBranch::G4, high, m, n, p.curve, p.coupling) > 0.0 ? 0 : 1;
        }
    }

    int collapsed = 0;
    double orbit_min = INFINITY;
    for (int k = 0; k < kOrbitCount; ++k) {
        const int pp = k == 0 ? 50 : 1 + static_cast<int>(gen() % 99);
        const TwoCliqueState s0{1e-3 + 0.99 * unit(gen), pp, 100 - pp};
        const auto orbit = iterate_return_map(s0, kOrbitSteps, p.curve, p.coupling, p.tol_phase);
        collapsed += orbit.reached_tolerance ? 1 : 0;
        orbit_min = std::min(orbit_min, orbit.min_theta);
    }

    const bool pass = worst <= kMapOracleTol && size_mismatch == 0 && errors == 0 && nonpositive == 0 &&
                      collapsed == 0 && orbit_min > p.tol_phase;
    report(8, pass, "return map vs engine, branch positivity, 10^4-step orbits",
           fmt("draws=%d max|map-engine|=%.3e (tol %.0e) size_mismatch=%d errors=%d nonpositive=%d/%d "
               "orbits=%d collapsed=%d min_theta=%.6g",
               kMapDraws, worst, kMapOracleTol, size_mismatch, errors, nonpositive, 4 * 5 * kScanPoints, kOrbitCount,
               collapsed, orbit_min));
}

void criterion_9() {
    RunConfig cfg;
    cfg.params = reference_params();
    cfg.seed = kBaseSeed + 6;
    cfg.init = {InitConfig::Mode::Uniform, 0.0, 1.0, {}};
    cfg.strobe = StrobeConfig{0, kStrobeFrames};
    cfg.assumptions = validate_assumptions(cfg.params.curve, cfg.params.coupling);
    std::ostringstream a, b;
    write_strobe_csv(a, execute_run(cfg).frames, 100);
    write_strobe_csv(b, execute_run(cfg).frames, 100);
    const bool pass = a.str() == b.str() && !a.str().empty();
    report(9, pass, "identical config and seed give byte-identical strobe CSV",
           fmt("bytes=%zu identical=%d", a.str().size(), a.str() == b.str()));
}

}  // namespace

int main() {
    const std::function<void()> criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                              criterion_6, criterion_7, criterion_8, criterion_9};
    int id = 1;
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            report(id, false, "criterion raised an exception", e.what());
        }
        ++id;
    }
    std::printf("%s: %d of 9 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
