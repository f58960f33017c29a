#pragma once

#include "pcsync/audit.hpp"
#include "pcsync/config.hpp"
#include "pcsync/return_map.hpp"
#include "pcsync/strobe.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pcsync {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kAssumption = 2;
inline constexpr int kIo = 3;
inline constexpr int kAudit = 4;
}  // namespace exit_code

/// Failure to read or write a file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunSummary {
    bool sync_ever = false;
    int frames_emitted = 0;
    int cluster_count_final = 0;
    std::optional<int> cluster_count_settled;  // set when the last settle_window frames agree
    double min_interfire_gap = 0.0;
    double a2_value = 0.0;
    double final_time = 0.0;
    AuditReport audit;
};

struct RunResult {
    RunSummary summary;
    std::vector<StroboscopicFrame> frames;
    std::vector<std::pair<double, int>> fire_events;  // (time, oscillator), in event order
};

/// Runs the configured horizon or strobe mode with audits and sync tracking.
[[nodiscard]] RunResult execute_run(const RunConfig& config, bool keep_fire_events = false);

void write_strobe_csv(std::ostream& out, const std::vector<StroboscopicFrame>& frames, int n);
void write_strobe_svg(std::ostream& out, const std::vector<StroboscopicFrame>& frames, int n);

struct OrbitRow {
    int step = 0;
    TwoCliqueState state;
    std::optional<double> oracle_delta;
};

struct ReturnMapResult {
    std::vector<OrbitRow> rows;
    double min_theta = 0.0;
    bool reached_tolerance = false;
    double max_oracle_delta = 0.0;
    int oracle_samples = 0;
};

/// Iterates the two-clique map and, every `oracle_every` steps, checks the
/// step against the full event engine.
[[nodiscard]] ReturnMapResult run_returnmap(const RunConfig& config, const ReturnMapConfig& rm);

void write_orbit_csv(std::ostream& out, const ReturnMapResult& result);

[[nodiscard]] std::string summary_json(const RunSummary& summary);

/// Entry point of the command-line tool; returns the process exit code.
/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcsync
