#include "pcsync/audit.hpp"

#include <algorithm>
#include <cmath>

namespace pcsync {

RunAuditor::RunAuditor(int oscillators, const ModelParams& params)
    : params_(params),
      last_fire_(static_cast<std::size_t>(oscillators), std::numeric_limits<double>::quiet_NaN()),
      in_flight_(static_cast<std::size_t>(oscillators)) {}

void RunAuditor::observe(const StepReport& report) {
    const double t = report.event_time;
    const double tol = params_.tol_time;
    ++acc_.events;

    for (int i : report.fired) {
        auto& flight = in_flight_[i];
        if (!flight.empty() && flight.back() >= t - tol) {
            ++acc_.pending_at_threshold;
        }
        if (!std::isnan(last_fire_[i])) {
            acc_.min_interfire_gap = std::min(acc_.min_interfire_gap, t - last_fire_[i]);
        }
        last_fire_[i] = t;
    }
    for (auto& flight : in_flight_) {
        while (!flight.empty() && flight.front() <= t + tol) {
            flight.pop_front();
        }
    }
    for (const auto& spike : report.spikes_scheduled) {
        in_flight_[spike.source].push_back(spike.arrival_time);
    }
    for (int i : report.fired) {
        acc_.max_pipeline_per_source =
            std::max(acc_.max_pipeline_per_source, static_cast<int>(in_flight_[i].size()));
    }
}

void RunAuditor::merge_fire_log(const FireLog& log) {
    acc_.min_interfire_gap = std::min(acc_.min_interfire_gap, log.min_gap());
}

AuditReport RunAuditor::report() const {
    AuditReport out = acc_;
    out.lemma1_ok = out.min_interfire_gap > 2.0 * params_.coupling.tau;
    out.lemma2_ok = out.max_pipeline_per_source <= 1 && out.pending_at_threshold == 0;
    return out;
}

AuditReport audit_run(std::span<const StepReport> reports, const FireLog& fire_log, const ModelParams& params) {
    RunAuditor auditor(static_cast<int>(fire_log.size()), params);
    for (const auto& r : reports) {
        auditor.observe(r);
    }
    auditor.merge_fire_log(fire_log);
    return auditor.report();
}

BoundaryCheck check_boundary(const NetworkState& state) {
    BoundaryCheck check;
    const double tau = state.params().coupling.tau;
    const auto offsets = state.pending_offsets_by_source();
    for (int i = 0; i < state.size(); ++i) {
        const auto& o = offsets[i];
        check.max_pipeline_per_source = std::max(check.max_pipeline_per_source, static_cast<int>(o.size()));
        if (!o.empty() && state.phase(i) >= 1.0 - state.params().tol_phase) {
            check.pending_at_threshold = true;
        }
        for (double eta : o) {
            if (!(eta > 0.0 && eta <= tau + state.params().tol_time)) {
                check.offsets_in_range = false;
            }
        }
        if (!(state.phase(i) >= 0.0 && state.phase(i) <= 1.0)) {
            check.phases_in_range = false;
        }
    }
    return check;
}

}  // namespace pcsync
