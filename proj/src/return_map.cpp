#include "pcsync/return_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pcsync {

namespace {

constexpr int kMaxOracleEvents = 64;

void require_a2(const CurveSpec& curve, const CouplingParams& coupling) {
    const auto report = validate_assumptions(curve, coupling);
    if (!report.a2_holds) {
        std::ostringstream msg;
        msg << "two-clique map requires f(2 tau) + N epsilon < 1, got " << report.a2_value;
        throw ValidationError(msg.str());
    }
}

void require_clique_sizes(int p, int q, int n) {
    if (p < 1 || q < 1 || p + q != n) {
        std::ostringstream msg;
        msg << "clique sizes (" << p << ", " << q << ") must be >= 1 and sum to N = " << n;
        throw ValidationError(msg.str());
    }
}

bool clique_coherent(const NetworkState& state, int begin, int end) {
    const double ref = state.phase(begin);
    for (int i = begin + 1; i < end; ++i) {
        if (std::abs(state.phase(i) - ref) > state.params().tol_phase) {
            return false;
        }
    }
    return true;
}

bool fired_exactly(const StepReport& report, int begin, int end) {
    if (static_cast<int>(report.fired.size()) != end - begin) {
        return false;
    }
    return std::all_of(report.fired.begin(), report.fired.end(), [&](int i) { return i >= begin && i < end; });
}

// Oscillators [0, a) form clique A, [a, N) clique B. Steps until one clique
// fires as a whole with no spike left in flight from before the event.
TwoCliqueState run_to_threshold_shape(NetworkState& state, int a) {
    const int n = state.size();
    for (int event = 0; event < kMaxOracleEvents; ++event) {
        const StepReport report = state.step();
        if (!clique_coherent(state, 0, a) || !clique_coherent(state, a, n)) {
            std::ostringstream msg;
            msg << "clique broke apart at t = " << report.event_time;
            throw StructuralError(msg.str());
        }
        if (report.fired.empty() || state.pipeline().size() != report.fired.size()) {
            continue;
        }
        if (fired_exactly(report, 0, a)) {
            return {1.0 - state.phase(a), n - a, a};
        }
        if (fired_exactly(report, a, n)) {
            return {1.0 - state.phase(0), a, n - a};
        }
        std::ostringstream msg;
        msg << "cliques fired together at t = " << report.event_time;
        throw StructuralError(msg.str());
    }
    throw StructuralError("no return to a two-clique configuration within the event budget");
}

ModelParams with_size(ModelParams params, int n) {
    params.coupling.n = n;
    return params;
}

}  // namespace

void TwoCliqueState::validate() const {
    if (p < 1 || q < 1) {
        throw ValidationError("clique sizes must be >= 1");
    }
    if (!(theta >= 0.0 && theta < 1.0)) {
        std::ostringstream msg;
        msg << "phase gap " << theta << " outside [0, 1)";
        throw DomainError(msg.str());
    }
}

double map_branch(MapBranch branch, double theta, int m, int n, const CurveSpec& curve,
                  const CouplingParams& coupling) {
    const double tau = coupling.tau;
    const double eps = coupling.epsilon;
    auto F = [&](int k, double x) { return jump(curve, eps, x, k); };

    switch (branch) {
    case MapBranch::G1:
        return F(m, F(n - 1, tau) + theta) - F(m - 1, F(n, tau - theta) + theta);
    case MapBranch::G2:
        return F(n, F(m - 1, tau) + theta) - F(n - 1, F(m, tau - theta) + theta);
    case MapBranch::G3:
        return F(n, 1.0 - theta + tau) - F(n - 1, tau);
    case MapBranch::G4:
        return F(m, 1.0 - theta + tau) - F(m - 1, tau);
    }
    return 0.0;
}

TwoCliqueState two_clique_map(const TwoCliqueState& s, const CurveSpec& curve, const CouplingParams& coupling) {
    s.validate();
    require_clique_sizes(s.p, s.q, coupling.n);
    require_a2(curve, coupling);

    if (s.theta == 0.0) {
        // G1(0) = 0 exactly; evaluating it leaves a rounding residue of either sign.
        return s;
    }
    // With (m, n) = (p, q), G1 and G3 are the branches for the current
    // orientation; G2 and G4 only arise as G1 and G3 with the sizes swapped.
    if (s.theta < coupling.tau) {
        return {map_branch(MapBranch::G1, s.theta, s.p, s.q, curve, coupling), s.p, s.q};
    }
    return {map_branch(MapBranch::G3, s.theta, s.p, s.q, curve, coupling), s.q, s.p};
}

ReturnMapOrbit iterate_return_map(const TwoCliqueState& s0, int steps, const CurveSpec& curve,
                                  const CouplingParams& coupling, double tol_phase) {
    if (steps < 0) {
        throw ValidationError("step count must be non-negative");
    }
    ReturnMapOrbit orbit;
    orbit.states.reserve(static_cast<std::size_t>(steps) + 1);
    orbit.states.push_back(s0);
    orbit.min_theta = std::numeric_limits<double>::infinity();
    TwoCliqueState s = s0;
    for (int k = 0; k < steps; ++k) {
        s = two_clique_map(s, curve, coupling);
        orbit.states.push_back(s);
        orbit.min_theta = std::min(orbit.min_theta, s.theta);
        if (s.theta <= tol_phase) {
            orbit.reached_tolerance = true;
        }
    }
    return orbit;
}

TwoCliqueState two_clique_oracle_step(double phi, int p, int q, const ModelParams& params) {
    require_clique_sizes(p, q, params.coupling.n);
    require_a2(params.curve, params.coupling);
    if (!(phi > 0.0 && phi < 1.0)) {
        throw DomainError("phase gap must lie in (0, 1)");
    }
    std::vector<double> phases(static_cast<std::size_t>(p + q), 1.0);
    std::fill_n(phases.begin(), p, 1.0 - phi);
    auto state = NetworkState::init(with_size(params, p + q), phases);

    // The initial event is the threshold clique firing; the map measures the next one.
    const StepReport first = state.step();
    if (!fired_exactly(first, p, p + q)) {
        throw StructuralError("initial event did not fire exactly the threshold clique");
    }
    return run_to_threshold_shape(state, p);
}

TwoCliqueState pending_clique_map(double phi, int m, int n, const CurveSpec& curve,
                                  const CouplingParams& coupling) {
    require_clique_sizes(m, n, coupling.n);
    require_a2(curve, coupling);
    const double tau = coupling.tau;
    if (!(phi > 0.0 && phi < tau)) {
        throw DomainError("pending-clique phase must lie in (0, tau)");
    }
    auto F = [&](int k, double x) { return jump(curve, coupling.epsilon, x, k); };
    const double leading = F(n, F(m - 1, tau) + phi);
    const double trailing = F(n - 1, F(m, tau - phi) + phi);
    return {leading - trailing, n, m};
}

TwoCliqueState pending_clique_oracle_step(double phi, int m, int n, const ModelParams& params) {
    require_clique_sizes(m, n, params.coupling.n);
    require_a2(params.curve, params.coupling);
    const double tau = params.coupling.tau;
    if (!(phi > 0.0 && phi < tau)) {
        throw DomainError("pending-clique phase must lie in (0, tau)");
    }
    std::vector<double> phases(static_cast<std::size_t>(m + n), 1.0);
    std::fill_n(phases.begin(), m, phi);
    auto state = NetworkState::init(with_size(params, m + n), phases);

    std::vector<PendingSpike> spikes;
    for (int i = 0; i < m; ++i) {
        spikes.push_back({state.now() + (tau - phi), i});
    }
    state.inject_pending(spikes, InjectCheck::DriftConsistent);

    const StepReport first = state.step();
    if (!fired_exactly(first, m, m + n)) {
        throw StructuralError("initial event did not fire exactly the threshold clique");
    }
    return run_to_threshold_shape(state, m);
}

}  // namespace pcsync
