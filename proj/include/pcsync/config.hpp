#pragma once

#include "pcsync/event_engine.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcsync {

/// Malformed or out-of-range configuration; `field()` is a JSON path such as "init.low".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// f(2 tau) + N epsilon >= 1 under strict mode.
class AssumptionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InitConfig {
    enum class Mode { Uniform, Explicit };
    Mode mode = Mode::Uniform;
    double low = 0.0;
    double high = 1.0;
    std::vector<double> phases;
};

struct StrobeConfig {
    int ref = 0;
    int frames = 500;
};

struct OutputConfig {
    enum class Format { Csv, Svg };
    Format format = Format::Csv;
    std::string path;  // empty: standard output
};

struct ReturnMapConfig {
    double theta0 = 0.0;
    int p = 1;
    int q = 1;
    int steps = 10000;
    int oracle_every = 100;  // 0 disables the engine comparison
};

struct RunConfig {
    ModelParams params;
    std::uint64_t seed = 0;
    InitConfig init;
    std::optional<double> horizon;
    std::optional<StrobeConfig> strobe;
    std::optional<ReturnMapConfig> returnmap;
    double cluster_tol = 1e-6;
    std::size_t settle_window = 50;
    OutputConfig output;
    bool strict = false;
    AssumptionReport assumptions;
    std::vector<std::string> warnings;
};

struct ParseOptions {
    bool strict = false;  // OR-ed with the document's own "strict" flag
};

/// Parses and validates a JSON run configuration.
///
/// Required: n, epsilon, tau, curve{family, i}, seed, init{mode, ...} and
/// exactly one of horizon | strobe{ref, frames}. A document carrying a
/// returnmap{theta0, p, q, steps} block may omit both run modes.
/// Optional: tolerances{time, phase, cluster, settle_window}, output{format,
/// path}, strict.
[[nodiscard]] RunConfig parse_config(const std::string& text, ParseOptions options = {});

[[nodiscard]] std::vector<double> initial_phases(const RunConfig& config);

}  // namespace pcsync
