#include "pcsync/strobe.hpp"

#include <algorithm>

namespace pcsync {

std::vector<StroboscopicFrame> stroboscopic_run(NetworkState& state, int ref, int frames,
                                                const FrameCallback& on_frame,
                                                const NetworkState::StepCallback& on_step) {
    if (frames < 1) {
        throw ValidationError("frame count must be >= 1");
    }
    std::vector<StroboscopicFrame> out;
    out.reserve(static_cast<std::size_t>(frames));
    state.run_until_ref_fires(ref, frames, [&](const StepReport& report, const NetworkState& s) {
        if (on_step) {
            on_step(report, s);
        }
        if (!report.did_fire(ref)) {
            return;
        }
        StroboscopicFrame frame;
        frame.k = static_cast<int>(out.size()) + 1;
        frame.t_k = report.event_time;
        frame.phases.assign(s.phases().begin(), s.phases().end());
        // Firers were reset to 0 by the step; at the instant itself they sit at threshold.
        for (int i : report.fired) {
            frame.phases[i] = 1.0;
        }
        if (on_frame) {
            on_frame(frame, s);
        }
        out.push_back(std::move(frame));
    });
    return out;
}

std::optional<int> settled_value(const std::vector<int>& history, std::size_t window) {
    if (window == 0 || history.size() < window) {
        return std::nullopt;
    }
    const auto tail = history.end() - static_cast<std::ptrdiff_t>(window);
    const int value = *tail;
    if (std::all_of(tail, history.end(), [&](int v) { return v == value; })) {
        return value;
    }
    return std::nullopt;
}

}  // namespace pcsync
