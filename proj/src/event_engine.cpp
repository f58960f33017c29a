#include "pcsync/event_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pcsync {

void ModelParams::validate() const {
    coupling.validate();
    if (!(tol_time >= 0.0) || !(tol_time < coupling.tau / 100.0)) {
        throw ValidationError("tol_time must lie in [0, tau/100)");
    }
    if (!(tol_phase >= 0.0) || !(tol_phase < 1e-3)) {
        throw ValidationError("tol_phase must lie in [0, 1e-3)");
    }
}

FireLog::FireLog(std::size_t oscillators, std::size_t keep_last)
    : times_(oscillators), totals_(oscillators, 0), keep_last_(keep_last) {}

void FireLog::record(int oscillator, double time) {
    auto& log = times_.at(oscillator);
    if (!log.empty()) {
        min_gap_ = std::min(min_gap_, time - log.back());
    }
    log.push_back(time);
    ++totals_[oscillator];
    if (keep_last_ > 0 && log.size() > keep_last_) {
        log.pop_front();
    }
}

bool StepReport::did_fire(int oscillator) const {
    return std::find(fired.begin(), fired.end(), oscillator) != fired.end();
}

NetworkState::NetworkState(const ModelParams& params, std::vector<double> phases, std::size_t keep_last)
    : params_(params), phases_(std::move(phases)), fire_log_(phases_.size(), keep_last) {}

NetworkState NetworkState::init(const ModelParams& params, std::span<const double> initial_phases,
                                std::size_t fire_log_keep_last) {
    params.validate();
    if (initial_phases.size() != static_cast<std::size_t>(params.coupling.n)) {
        std::ostringstream msg;
        msg << "expected " << params.coupling.n << " initial phases, got " << initial_phases.size();
        throw ValidationError(msg.str());
    }
    for (std::size_t i = 0; i < initial_phases.size(); ++i) {
        const double p = initial_phases[i];
        if (!(p > 0.0 && p <= 1.0)) {
            std::ostringstream msg;
            msg << "initial phase " << i << " = " << p << " outside (0, 1]";
            throw ValidationError(msg.str());
        }
    }
    return NetworkState(params, std::vector<double>(initial_phases.begin(), initial_phases.end()),
                        fire_log_keep_last);
}

void NetworkState::inject_pending(std::span<const PendingSpike> spikes, InjectCheck check) {
    const double tau = params_.coupling.tau;
    for (const auto& spike : spikes) {
        if (spike.source < 0 || spike.source >= size()) {
            throw ValidationError("pending spike source out of range");
        }
        const double offset = spike.arrival_time - now_;
        if (!(offset > 0.0 && offset <= tau + params_.tol_time)) {
            std::ostringstream msg;
            msg << "pending spike offset " << offset << " outside (0, tau]";
            throw ValidationError(msg.str());
        }
        if (check == InjectCheck::DriftConsistent &&
            std::abs(phases_[spike.source] - (tau - offset)) > params_.tol_time) {
            std::ostringstream msg;
            msg << "oscillator " << spike.source << " has phase " << phases_[spike.source]
                << " but its pending offset implies " << tau - offset;
            throw ValidationError(msg.str());
        }
    }
    for (const auto& spike : spikes) {
        auto pos = std::upper_bound(pipeline_.begin(), pipeline_.end(), spike,
                                    [](const PendingSpike& a, const PendingSpike& b) {
                                        return a.arrival_time < b.arrival_time;
                                    });
        pipeline_.insert(pos, spike);
    }
}

double NetworkState::next_event_time() const {
    if (phases_.empty()) {
        throw std::logic_error("network has no oscillators");
    }
    const double max_phase = *std::max_element(phases_.begin(), phases_.end());
    double t = now_ + std::max(0.0, 1.0 - max_phase);
    if (!pipeline_.empty()) {
        t = std::min(t, pipeline_.front().arrival_time);
    }
    return t;
}

void NetworkState::drift_to(double t) {
    const double dt = t - now_;
    for (auto& p : phases_) {
        p += dt;
    }
    now_ = t;
}

StepReport NetworkState::step() {
    const double event_time = next_event_time();
    const int n = size();
    const double tau = params_.coupling.tau;

    drift_to(event_time);
    // Threshold crossings within tol_time of the event belong to it.
    for (auto& p : phases_) {
        if (p >= 1.0 - params_.tol_time) {
            p = 1.0;
        }
    }

    StepReport report;
    report.event_time = event_time;

    while (!pipeline_.empty() && pipeline_.front().arrival_time <= event_time + params_.tol_time) {
        report.arrived.push_back(pipeline_.front());
        pipeline_.pop_front();
    }
    if (!report.arrived.empty()) {
        std::vector<int> own(n, 0);
        for (const auto& spike : report.arrived) {
            ++own[spike.source];
        }
        const int total = static_cast<int>(report.arrived.size());
        report.arrivals_per_receiver.resize(n);
        for (int j = 0; j < n; ++j) {
            const int m = total - own[j];
            report.arrivals_per_receiver[j] = m;
            phases_[j] = jump(params_.curve, params_.coupling.epsilon, phases_[j], m);
        }
    }

    for (int i = 0; i < n; ++i) {
        if (phases_[i] >= 1.0 - params_.tol_phase) {
            report.fired.push_back(i);
        }
    }
    // Spikes emitted now arrive at event_time + tau, no earlier than anything pending.
    for (int i : report.fired) {
        fire_log_.record(i, event_time);
        phases_[i] = 0.0;
        const PendingSpike spike{event_time + tau, i};
        pipeline_.push_back(spike);
        report.spikes_scheduled.push_back(spike);
    }
    return report;
}

void NetworkState::run_until_time(double horizon, const StepCallback& on_step) {
    if (!(horizon >= now_)) {
        throw ValidationError("horizon lies before the current time");
    }
    while (next_event_time() <= horizon) {
        const StepReport report = step();
        if (on_step) {
            on_step(report, *this);
        }
    }
    drift_to(horizon);
}

std::vector<StepReport> NetworkState::run_until_time(double horizon) {
    std::vector<StepReport> reports;
    run_until_time(horizon, [&](const StepReport& r, const NetworkState&) { reports.push_back(r); });
    return reports;
}

std::vector<double> NetworkState::run_until_ref_fires(int ref, int k, const StepCallback& on_step) {
    if (ref < 0 || ref >= size()) {
        throw ValidationError("reference oscillator out of range");
    }
    if (k < 1) {
        throw ValidationError("firing count k must be >= 1");
    }
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(k));
    while (static_cast<int>(times.size()) < k) {
        const StepReport report = step();
        if (report.did_fire(ref)) {
            times.push_back(report.event_time);
        }
        if (on_step) {
            on_step(report, *this);
        }
    }
    return times;
}

std::vector<double> NetworkState::run_until_ref_fires(int ref, int k) {
    return run_until_ref_fires(ref, k, StepCallback{});
}

std::vector<std::vector<double>> NetworkState::pending_offsets_by_source() const {
    std::vector<std::vector<double>> offsets(phases_.size());
    for (const auto& spike : pipeline_) {
        offsets[spike.source].push_back(spike.arrival_time - now_);
    }
    for (auto& o : offsets) {
        std::sort(o.begin(), o.end());
    }
    return offsets;
}

}  // namespace pcsync
