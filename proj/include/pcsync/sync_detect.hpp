#pragma once

#include "pcsync/event_engine.hpp"

#include <vector>

namespace pcsync {

struct MatchTolerance {
    double phase = 1e-12;
    double time = 1e-9;

    static MatchTolerance from(const ModelParams& params) { return {params.tol_phase, params.tol_time}; }
};

struct SyncVerdict {
    bool synchronized = false;
    double phase_spread = 0.0;  // max - min phase
    bool pipeline_mismatch = false;
};

/// Complete synchronization at an event boundary: every phase equal and every
/// oscillator carrying the same set of in-flight spike offsets. Equal phases
/// alone are not enough while spikes are still in the pipeline.
[[nodiscard]] SyncVerdict is_completely_synchronized(const NetworkState& state, MatchTolerance tol);
[[nodiscard]] SyncVerdict is_completely_synchronized(const NetworkState& state);

struct ClusterPartition {
    std::vector<std::vector<int>> clusters;
    std::vector<double> representative_phase;

    [[nodiscard]] std::size_t count() const noexcept { return clusters.size(); }
    [[nodiscard]] std::size_t largest() const noexcept;
};

/// Groups oscillators with equal phase and equal pending-offset multisets.
/// Clusters are ordered by their smallest member index.
[[nodiscard]] ClusterPartition cluster_partition(const NetworkState& state, MatchTolerance tol);

[[nodiscard]] double phase_spread(std::span<const double> phases);

/// True iff `a` and `b` have the same size and agree elementwise within tol.
/// Both must be sorted.
[[nodiscard]] bool offsets_match(const std::vector<double>& a, const std::vector<double>& b, double tol);

}  // namespace pcsync
