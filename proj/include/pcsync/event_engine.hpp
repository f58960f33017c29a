#pragma once

#include "pcsync/phase_model.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace pcsync {

struct ModelParams {
    CurveSpec curve = CurveSpec::ms_exponential(1.05);
    CouplingParams coupling;
    // Events closer than this are processed as one simultaneous event.
    double tol_time = 1e-9;
    // A phase at or above 1 - tol_phase counts as threshold.
    double tol_phase = 1e-12;

    void validate() const;
};

/// A spike in flight: emitted at arrival_time - tau by `source`, delivered to
/// every other oscillator at arrival_time.
struct PendingSpike {
    double arrival_time = 0.0;
    int source = 0;

    friend bool operator==(const PendingSpike&, const PendingSpike&) = default;
};

/// Per-oscillator firing times. keep_last == 0 retains everything; otherwise
/// only the most recent keep_last times are kept, while the total count and
/// the smallest gap between consecutive firings are tracked over the whole run.
class FireLog {
public:
    FireLog() = default;
    FireLog(std::size_t oscillators, std::size_t keep_last);

    void record(int oscillator, double time);

    [[nodiscard]] const std::deque<double>& times(int oscillator) const { return times_.at(oscillator); }
    [[nodiscard]] std::size_t total_count(int oscillator) const { return totals_.at(oscillator); }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] std::size_t keep_last() const noexcept { return keep_last_; }

    /// Smallest gap between consecutive firings of any single oscillator;
    /// +infinity if no oscillator fired twice.
    [[nodiscard]] double min_gap() const noexcept { return min_gap_; }

private:
    std::vector<std::deque<double>> times_;
    std::vector<std::size_t> totals_;
    std::size_t keep_last_ = 0;
    double min_gap_ = std::numeric_limits<double>::infinity();
};

/// What one grouped event did.
struct StepReport {
    double event_time = 0.0;
    // Spike count m_j delivered to each receiver (own spikes excluded).
    // Empty when no spike arrived at this event.
    std::vector<int> arrivals_per_receiver;
    std::vector<PendingSpike> arrived;
    std::vector<int> fired;
    std::vector<PendingSpike> spikes_scheduled;

    [[nodiscard]] bool did_fire(int oscillator) const;
};

enum class InjectCheck {
    None,
    // Each source's phase must equal tau - (arrival_time - now): it fired when
    // the spike was emitted and has drifted freely since.
    DriftConsistent,
};

/// Clock, phases, in-flight spikes and firing history of an all-to-all
/// network with delayed excitatory pulse coupling.
class NetworkState {
public:
    using StepCallback = std::function<void(const StepReport&, const NetworkState&)>;

    /// Starts at t = 0 with an empty pipeline. Each phase must lie in (0, 1].
    static NetworkState init(const ModelParams& params, std::span<const double> initial_phases,
                             std::size_t fire_log_keep_last = 0);

    void inject_pending(std::span<const PendingSpike> spikes, InjectCheck check = InjectCheck::None);

    [[nodiscard]] double next_event_time() const;

    /// Processes one grouped event: drift, arrivals, threshold detection,
    /// resets and scheduling.
    StepReport step();

    /// Steps through every event at or before `horizon`, then drifts to it.
    std::vector<StepReport> run_until_time(double horizon);
    void run_until_time(double horizon, const StepCallback& on_step);

    /// Advances until oscillator `ref` has fired `k` more times and returns those times.
    std::vector<double> run_until_ref_fires(int ref, int k);
    std::vector<double> run_until_ref_fires(int ref, int k, const StepCallback& on_step);

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] double now() const noexcept { return now_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(phases_.size()); }
    [[nodiscard]] std::span<const double> phases() const noexcept { return phases_; }
    [[nodiscard]] double phase(int i) const { return phases_.at(i); }
    [[nodiscard]] const std::deque<PendingSpike>& pipeline() const noexcept { return pipeline_; }
    [[nodiscard]] const FireLog& fire_log() const noexcept { return fire_log_; }

    /// arrival_time - now of every pending spike, grouped by source and sorted.
    [[nodiscard]] std::vector<std::vector<double>> pending_offsets_by_source() const;

private:
    NetworkState(const ModelParams& params, std::vector<double> phases, std::size_t keep_last);

    void drift_to(double t);

    ModelParams params_;
    double now_ = 0.0;
    std::vector<double> phases_;
    std::deque<PendingSpike> pipeline_;  // sorted by arrival_time
    FireLog fire_log_;
};

}  // namespace pcsync
