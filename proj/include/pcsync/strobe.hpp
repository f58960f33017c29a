#pragma once

#include "pcsync/event_engine.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace pcsync {

/// All phases at the k-th firing of the reference oscillator, sampled at the
/// firing instant itself (before the resets), so phases[ref] == 1.
struct StroboscopicFrame {
    int k = 0;
    double t_k = 0.0;
    std::vector<double> phases;
};

using FrameCallback = std::function<void(const StroboscopicFrame&, const NetworkState&)>;

/// Runs until the reference has fired `frames` more times. `on_frame` sees each
/// frame together with the state just after that event; `on_step` sees every event.
std::vector<StroboscopicFrame> stroboscopic_run(NetworkState& state, int ref, int frames,
                                                const FrameCallback& on_frame = {},
                                                const NetworkState::StepCallback& on_step = {});

/// The common value of the last `window` entries, or nullopt if they differ
/// or fewer than `window` entries exist.
[[nodiscard]] std::optional<int> settled_value(const std::vector<int>& history, std::size_t window);

}  // namespace pcsync
