#pragma once

#include "pcsync/audit.hpp"
#include "pcsync/event_engine.hpp"
#include "pcsync/sync_detect.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace pcsync {

// Seeding: std::mt19937_64 (its output sequence is fixed by the C++ standard),
// with per-trial seeds derived through splitmix64. Uniform draws use the top
// 53 bits of each output, so results do not depend on the standard library's
// distribution implementations.

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) noexcept;

/// Uniform on (low, high]; the upper end is reachable, the lower end is not.
[[nodiscard]] double uniform_open_closed(std::mt19937_64& gen, double low, double high);

[[nodiscard]] std::vector<double> sample_uniform_phases(std::uint64_t seed, int n, double low, double high);

using InitSampler = std::function<std::vector<double>(std::uint64_t seed, int n)>;

[[nodiscard]] InitSampler uniform_sampler(double low, double high);

class InfeasibleScenario : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two oscillators that become phase-equal at t = tau while one of them still
/// has a spike in flight, so equal phases do not mean synchronization.
struct Fig3Scenario {
    NetworkState state;
    double phi = 0.0;  // A starts at 1 - phi, B at threshold
};

/// phi = tau - f^-1(f(tau) - epsilon), i.e. f(tau - phi) + epsilon = f(tau).
/// The oscillator count in `params` is replaced by 2.
[[nodiscard]] Fig3Scenario fig3_construct(const ModelParams& params);

struct Fig3Row {
    double t = 0.0;
    double phi_a = 0.0;
    double phi_b = 0.0;
    std::optional<double> pending_a;  // offset of A's in-flight spike
    std::optional<double> pending_b;
    bool phase_equal = false;
    bool synchronized = false;
    bool event_boundary = false;  // false: a sample between two events
};

struct Fig3Trace {
    double phi = 0.0;
    double tau = 0.0;
    std::vector<Fig3Row> rows;
    // Every row with t in [tau, tau + phi) has equal phases and is not synchronized.
    bool equal_window_holds = false;
    // Rows at and just after tau + phi have unequal phases.
    bool split_after = false;
};

/// Runs the two-oscillator construction through the arrival at tau + phi,
/// recording every event boundary and one sample between consecutive events.
[[nodiscard]] Fig3Trace fig3_trace(const ModelParams& params);

struct TrialResult {
    std::uint64_t seed = 0;
    bool sync_detected = false;
    double first_sync_time = -1.0;
    double terminal_spread = 0.0;
    int final_clusters = 0;
    std::size_t events = 0;
    AuditReport audit;
};

struct DesyncSummary {
    int sync_detected_count = 0;
    double min_spread = 0.0;
    double median_spread = 0.0;
    std::map<int, int> cluster_histogram;  // cluster count -> number of trials
    std::vector<TrialResult> trials;       // ordered by trial index
};

struct DesyncOptions {
    std::uint64_t base_seed = 1;
    int threads = 1;
    MatchTolerance cluster_tol{1e-6, 1e-6};
};

/// Runs `trials` independent simulations to `horizon`, checking for complete
/// synchronization at t = 0 and after every event.
[[nodiscard]] DesyncSummary desync_trial(const ModelParams& params, const InitSampler& sampler, double horizon,
                                         int trials, const DesyncOptions& options = {});

/// Runs `count` jobs indexed 0..count-1 on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

}  // namespace pcsync
