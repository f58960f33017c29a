#include "pcsync/sync_detect.hpp"

#include <algorithm>
#include <cmath>

namespace pcsync {

double phase_spread(std::span<const double> phases) {
    if (phases.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(phases.begin(), phases.end());
    return *hi - *lo;
}

bool offsets_match(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol) {
            return false;
        }
    }
    return true;
}

SyncVerdict is_completely_synchronized(const NetworkState& state, MatchTolerance tol) {
    SyncVerdict verdict;
    verdict.phase_spread = phase_spread(state.phases());

    const auto offsets = state.pending_offsets_by_source();
    for (std::size_t i = 1; i < offsets.size(); ++i) {
        if (!offsets_match(offsets[0], offsets[i], tol.time)) {
            verdict.pipeline_mismatch = true;
            break;
        }
    }
    verdict.synchronized = verdict.phase_spread <= tol.phase && !verdict.pipeline_mismatch;
    return verdict;
}

SyncVerdict is_completely_synchronized(const NetworkState& state) {
    return is_completely_synchronized(state, MatchTolerance::from(state.params()));
}

std::size_t ClusterPartition::largest() const noexcept {
    std::size_t best = 0;
    for (const auto& c : clusters) {
        best = std::max(best, c.size());
    }
    return best;
}

ClusterPartition cluster_partition(const NetworkState& state, MatchTolerance tol) {
    const auto phases = state.phases();
    const auto offsets = state.pending_offsets_by_source();

    ClusterPartition partition;
    for (int i = 0; i < state.size(); ++i) {
        bool placed = false;
        for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
            const int rep = partition.clusters[c].front();
            if (std::abs(phases[i] - phases[rep]) <= tol.phase &&
                offsets_match(offsets[i], offsets[rep], tol.time)) {
                partition.clusters[c].push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            partition.clusters.push_back({i});
            partition.representative_phase.push_back(phases[i]);
        }
    }
    return partition;
}

}  // namespace pcsync
