#include "pcsync/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace pcsync {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) noexcept {
    return splitmix64(base_seed ^ splitmix64(trial));
}

double uniform_open_closed(std::mt19937_64& gen, double low, double high) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
    const double value = high - (high - low) * unit;
    return value > low ? value : high;
}

std::vector<double> sample_uniform_phases(std::uint64_t seed, int n, double low, double high) {
    if (!(low >= 0.0 && high <= 1.0 && low < high)) {
        throw ValidationError("uniform range must satisfy 0 <= low < high <= 1");
    }
    std::mt19937_64 gen(seed);
    std::vector<double> phases(static_cast<std::size_t>(n));
    for (auto& p : phases) {
        p = uniform_open_closed(gen, low, high);
    }
    return phases;
}

InitSampler uniform_sampler(double low, double high) {
    return [low, high](std::uint64_t seed, int n) { return sample_uniform_phases(seed, n, low, high); };
}

Fig3Scenario fig3_construct(const ModelParams& params) {
    ModelParams two = params;
    two.coupling.n = 2;
    two.validate();
    const double tau = two.coupling.tau;
    if (!(tau < 1.0)) {
        throw InfeasibleScenario("construction needs tau < 1");
    }
    const double f_tau = f_eval(two.curve, tau);
    if (!(two.coupling.epsilon < f_tau)) {
        std::ostringstream msg;
        msg << "construction needs epsilon < f(tau) = " << f_tau;
        throw InfeasibleScenario(msg.str());
    }
    const double phi = tau - f_inv(two.curve, f_tau - two.coupling.epsilon);
    if (!(phi > 0.0 && phi < tau)) {
        throw InfeasibleScenario("constructed gap falls outside (0, tau)");
    }
    const std::vector<double> phases{1.0 - phi, 1.0};
    return {NetworkState::init(two, phases), phi};
}

namespace {

Fig3Row fig3_row(const NetworkState& state, bool event_boundary) {
    Fig3Row row;
    row.t = state.now();
    row.phi_a = state.phase(0);
    row.phi_b = state.phase(1);
    const auto offsets = state.pending_offsets_by_source();
    if (!offsets[0].empty()) {
        row.pending_a = offsets[0].front();
    }
    if (!offsets[1].empty()) {
        row.pending_b = offsets[1].front();
    }
    row.phase_equal = std::abs(row.phi_a - row.phi_b) <= state.params().tol_phase;
    row.synchronized = is_completely_synchronized(state).synchronized;
    row.event_boundary = event_boundary;
    return row;
}

}  // namespace

Fig3Trace fig3_trace(const ModelParams& params) {
    auto scenario = fig3_construct(params);
    auto& state = scenario.state;
    const double tol = state.params().tol_time;

    Fig3Trace trace;
    trace.phi = scenario.phi;
    trace.tau = state.params().coupling.tau;
    const double split_time = trace.tau + trace.phi;

    trace.rows.push_back(fig3_row(state, false));
    bool past_split = false;
    while (!past_split) {
        state.step();
        trace.rows.push_back(fig3_row(state, true));
        past_split = state.now() >= split_time - tol;
        const double mid = 0.5 * (state.now() + state.next_event_time());
        state.run_until_time(mid);
        trace.rows.push_back(fig3_row(state, false));
    }

    bool window_seen = false;
    trace.equal_window_holds = true;
    trace.split_after = true;
    for (const auto& row : trace.rows) {
        if (row.t >= trace.tau - tol && row.t < split_time - tol) {
            window_seen = true;
            trace.equal_window_holds = trace.equal_window_holds && row.phase_equal && !row.synchronized;
        } else if (row.t >= split_time - tol) {
            trace.split_after = trace.split_after && !row.phase_equal;
        }
    }
    trace.equal_window_holds = trace.equal_window_holds && window_seen;
    return trace;
}

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
    const int workers = std::clamp(threads, 1, std::max(count, 1));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

namespace {

TrialResult run_trial(const ModelParams& params, const InitSampler& sampler, double horizon, std::uint64_t seed,
                      MatchTolerance cluster_tol) {
    TrialResult result;
    result.seed = seed;
    const auto phases = sampler(seed, params.coupling.n);
    auto state = NetworkState::init(params, phases);

    if (is_completely_synchronized(state).synchronized) {
        result.sync_detected = true;
        result.first_sync_time = state.now();
    }
    RunAuditor auditor(state.size(), params);
    state.run_until_time(horizon, [&](const StepReport& report, const NetworkState& s) {
        auditor.observe(report);
        if (!result.sync_detected && is_completely_synchronized(s).synchronized) {
            result.sync_detected = true;
            result.first_sync_time = s.now();
        }
    });
    auditor.merge_fire_log(state.fire_log());
    result.audit = auditor.report();
    result.events = result.audit.events;
    result.terminal_spread = phase_spread(state.phases());
    result.final_clusters = static_cast<int>(cluster_partition(state, cluster_tol).count());
    return result;
}

}  // namespace

DesyncSummary desync_trial(const ModelParams& params, const InitSampler& sampler, double horizon, int trials,
                           const DesyncOptions& options) {
    params.validate();
    if (trials < 1) {
        throw ValidationError("trial count must be >= 1");
    }
    DesyncSummary summary;
    summary.trials.resize(static_cast<std::size_t>(trials));
    parallel_for(trials, options.threads, [&](int i) {
        summary.trials[i] = run_trial(params, sampler, horizon,
                                      trial_seed(options.base_seed, static_cast<std::uint64_t>(i)),
                                      options.cluster_tol);
    });

    std::vector<double> spreads;
    for (const auto& t : summary.trials) {
        summary.sync_detected_count += t.sync_detected ? 1 : 0;
        ++summary.cluster_histogram[t.final_clusters];
        spreads.push_back(t.terminal_spread);
    }
    std::sort(spreads.begin(), spreads.end());
    summary.min_spread = spreads.front();
    const std::size_t mid = spreads.size() / 2;
    summary.median_spread = spreads.size() % 2 == 1 ? spreads[mid] : 0.5 * (spreads[mid - 1] + spreads[mid]);
    return summary;
}

}  // namespace pcsync
