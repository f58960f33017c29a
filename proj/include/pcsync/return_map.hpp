#pragma once

#include "pcsync/event_engine.hpp"

#include <stdexcept>
#include <vector>

namespace pcsync {

/// Two internally synchronized cliques with empty pipelines: a clique of size
/// q sits at threshold while a clique of size p trails it at phase 1 - theta.
struct TwoCliqueState {
    double theta = 0.0;
    int p = 1;
    int q = 1;

    void validate() const;
};

/// The four branches of the two-clique return map for fixed clique sizes (m, n):
///   G1(theta) = F_m(F_{n-1}(tau) + theta) - F_{m-1}(F_n(tau - theta) + theta)   0 <= theta < tau
///   G2(theta) = F_n(F_{m-1}(tau) + theta) - F_{n-1}(F_m(tau - theta) + theta)   0 <= theta < tau
///   G3(theta) = F_n(1 - theta + tau) - F_{n-1}(tau)                             tau <= theta < 1
///   G4(theta) = F_m(1 - theta + tau) - F_{m-1}(tau)                             tau <= theta < 1
enum class MapBranch { G1, G2, G3, G4 };

[[nodiscard]] double map_branch(MapBranch branch, double theta, int m, int n, const CurveSpec& curve,
                                const CouplingParams& coupling);

/// One cycle of the return map. theta < tau keeps (p, q); theta >= tau swaps them.
[[nodiscard]] TwoCliqueState two_clique_map(const TwoCliqueState& s, const CurveSpec& curve,
                                            const CouplingParams& coupling);

struct ReturnMapOrbit {
    std::vector<TwoCliqueState> states;  // states[0] is the start
    double min_theta = 0.0;              // over states[1..]
    bool reached_tolerance = false;      // some iterate fell to or below tol
};

[[nodiscard]] ReturnMapOrbit iterate_return_map(const TwoCliqueState& s0, int steps, const CurveSpec& curve,
                                                const CouplingParams& coupling, double tol_phase = 1e-12);

/// Raised when a full simulation leaves the two-clique configuration family.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Brute-force counterpart of two_clique_map: builds the trailing/threshold
/// clique configuration in the event engine and simulates until one clique
/// next reaches threshold with nothing left in flight.
[[nodiscard]] TwoCliqueState two_clique_oracle_step(double phi, int p, int q, const ModelParams& params);

/// Closed form for the other shape: a clique of size m at phase phi in
/// (0, tau) whose spikes are still in flight with offset tau - phi, and a
/// clique of size n at threshold. Returns the two-clique state at the next
/// firing of the first clique.
[[nodiscard]] TwoCliqueState pending_clique_map(double phi, int m, int n, const CurveSpec& curve,
                                                const CouplingParams& coupling);

/// Engine counterpart of pending_clique_map, built with inject_pending.
[[nodiscard]] TwoCliqueState pending_clique_oracle_step(double phi, int m, int n, const ModelParams& params);

}  // namespace pcsync
