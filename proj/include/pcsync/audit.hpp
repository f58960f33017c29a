#pragma once

#include "pcsync/event_engine.hpp"

#include <deque>
#include <limits>
#include <span>
#include <vector>

namespace pcsync {

struct AuditReport {
    double min_interfire_gap = std::numeric_limits<double>::infinity();
    bool lemma1_ok = true;  // min_interfire_gap > 2 tau
    int max_pipeline_per_source = 0;
    int pending_at_threshold = 0;  // firings while the firer still had a spike in flight
    bool lemma2_ok = true;         // max_pipeline_per_source <= 1 and no pending-at-threshold
    std::size_t events = 0;
};

/// Incremental form of audit_run: feed reports in event order.
///
/// Firing gap: consecutive firings of one oscillator are more than 2 tau apart.
/// Pipeline: a source never has two spikes in flight, and never fires while
/// one of its spikes is still pending (including one arriving at that instant).
class RunAuditor {
public:
    RunAuditor(int oscillators, const ModelParams& params);

    void observe(const StepReport& report);
    /// Folds in a fire log whose history may predate the observed reports.
    void merge_fire_log(const FireLog& log);

    [[nodiscard]] AuditReport report() const;

private:
    ModelParams params_;
    std::vector<double> last_fire_;
    std::vector<std::deque<double>> in_flight_;
    AuditReport acc_;
};

[[nodiscard]] AuditReport audit_run(std::span<const StepReport> reports, const FireLog& fire_log,
                                    const ModelParams& params);

/// Direct inspection of a state at an event boundary.
struct BoundaryCheck {
    int max_pipeline_per_source = 0;
    bool pending_at_threshold = false;
    bool offsets_in_range = true;  // every offset in (0, tau]
    bool phases_in_range = true;   // every phase in [0, 1]
};

[[nodiscard]] BoundaryCheck check_boundary(const NetworkState& state);

}  // namespace pcsync
