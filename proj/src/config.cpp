#include "pcsync/config.hpp"

#include "pcsync/scenarios.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>

namespace pcsync {

namespace {

using nlohmann::json;

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

const json& require(const json& obj, const std::string& parent, const std::string& key) {
    if (!obj.contains(key)) {
        throw ConfigError(join(parent, key), "required field is missing");
    }
    return obj.at(key);
}

void require_object(const json& value, const std::string& path) {
    if (!value.is_object()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }
}

void reject_unknown(const json& obj, const std::string& parent, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(join(parent, key), "unknown field");
        }
    }
}

double get_number(const json& obj, const std::string& parent, const std::string& key) {
    const json& v = require(obj, parent, key);
    if (!v.is_number()) {
        throw ConfigError(join(parent, key), "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError(join(parent, key), "expected a finite number");
    }
    return d;
}

long long get_integer(const json& obj, const std::string& parent, const std::string& key) {
    const json& v = require(obj, parent, key);
    if (!v.is_number_integer()) {
        throw ConfigError(join(parent, key), "expected an integer");
    }
    return v.get<long long>();
}

int get_int_in(const json& obj, const std::string& parent, const std::string& key, long long lo, long long hi) {
    const long long v = get_integer(obj, parent, key);
    if (v < lo || v > hi) {
        std::ostringstream msg;
        msg << "must lie in [" << lo << ", " << hi << "], got " << v;
        throw ConfigError(join(parent, key), msg.str());
    }
    return static_cast<int>(v);
}

std::string get_string(const json& obj, const std::string& parent, const std::string& key) {
    const json& v = require(obj, parent, key);
    if (!v.is_string()) {
        throw ConfigError(join(parent, key), "expected a string");
    }
    return v.get<std::string>();
}

void parse_init(const json& doc, RunConfig& cfg) {
    const json& init = require(doc, "", "init");
    require_object(init, "init");
    const std::string mode = get_string(init, "init", "mode");
    const int n = cfg.params.coupling.n;
    if (mode == "uniform") {
        reject_unknown(init, "init", {"mode", "low", "high"});
        cfg.init.mode = InitConfig::Mode::Uniform;
        cfg.init.low = get_number(init, "init", "low");
        cfg.init.high = get_number(init, "init", "high");
        if (cfg.init.low < 0.0) {
            throw ConfigError("init.low", "range (low, high] must lie within (0, 1]");
        }
        if (cfg.init.high > 1.0 || !(cfg.init.high > cfg.init.low)) {
            throw ConfigError("init.high", "range (low, high] must lie within (0, 1] with high > low");
        }
    } else if (mode == "explicit") {
        reject_unknown(init, "init", {"mode", "phases"});
        cfg.init.mode = InitConfig::Mode::Explicit;
        const json& phases = require(init, "init", "phases");
        if (!phases.is_array()) {
            throw ConfigError("init.phases", "expected an array");
        }
        if (static_cast<int>(phases.size()) != n) {
            std::ostringstream msg;
            msg << "expected " << n << " phases, got " << phases.size();
            throw ConfigError("init.phases", msg.str());
        }
        for (std::size_t i = 0; i < phases.size(); ++i) {
            const std::string path = "init.phases[" + std::to_string(i) + "]";
            if (!phases[i].is_number()) {
                throw ConfigError(path, "expected a number");
            }
            const double p = phases[i].get<double>();
            if (!(p > 0.0 && p <= 1.0)) {
                throw ConfigError(path, "initial phase must lie in (0, 1]");
            }
            cfg.init.phases.push_back(p);
        }
    } else {
        throw ConfigError("init.mode", "expected \"uniform\" or \"explicit\", got \"" + mode + "\"");
    }
}

void parse_tolerances(const json& doc, RunConfig& cfg) {
    if (!doc.contains("tolerances")) {
        return;
    }
    const json& tol = doc.at("tolerances");
    require_object(tol, "tolerances");
    reject_unknown(tol, "tolerances", {"time", "phase", "cluster", "settle_window"});
    if (tol.contains("time")) {
        cfg.params.tol_time = get_number(tol, "tolerances", "time");
        if (!(cfg.params.tol_time >= 0.0 && cfg.params.tol_time < cfg.params.coupling.tau / 100.0)) {
            throw ConfigError("tolerances.time", "must lie in [0, tau/100)");
        }
    }
    if (tol.contains("phase")) {
        cfg.params.tol_phase = get_number(tol, "tolerances", "phase");
        if (!(cfg.params.tol_phase >= 0.0 && cfg.params.tol_phase < 1e-3)) {
            throw ConfigError("tolerances.phase", "must lie in [0, 1e-3)");
        }
    }
    if (tol.contains("cluster")) {
        cfg.cluster_tol = get_number(tol, "tolerances", "cluster");
        if (!(cfg.cluster_tol >= 0.0 && cfg.cluster_tol < 0.5)) {
            throw ConfigError("tolerances.cluster", "must lie in [0, 0.5)");
        }
    }
    if (tol.contains("settle_window")) {
        cfg.settle_window = static_cast<std::size_t>(get_int_in(tol, "tolerances", "settle_window", 1, 1'000'000));
    }
}

void parse_run_mode(const json& doc, RunConfig& cfg) {
    if (doc.contains("horizon")) {
        const double h = get_number(doc, "", "horizon");
        if (!(h > 0.0)) {
            throw ConfigError("horizon", "must be > 0");
        }
        cfg.horizon = h;
    }
    if (doc.contains("strobe")) {
        const json& s = doc.at("strobe");
        require_object(s, "strobe");
        reject_unknown(s, "strobe", {"ref", "frames"});
        StrobeConfig strobe;
        strobe.ref = get_int_in(s, "strobe", "ref", 0, cfg.params.coupling.n - 1);
        strobe.frames = get_int_in(s, "strobe", "frames", 1, 100'000'000);
        cfg.strobe = strobe;
    }
    if (doc.contains("returnmap")) {
        const json& r = doc.at("returnmap");
        require_object(r, "returnmap");
        reject_unknown(r, "returnmap", {"theta0", "p", "q", "steps", "oracle_every"});
        ReturnMapConfig rm;
        rm.theta0 = get_number(r, "returnmap", "theta0");
        rm.p = get_int_in(r, "returnmap", "p", 1, cfg.params.coupling.n - 1);
        rm.q = get_int_in(r, "returnmap", "q", 1, cfg.params.coupling.n - 1);
        rm.steps = get_int_in(r, "returnmap", "steps", 0, 100'000'000);
        if (r.contains("oracle_every")) {
            rm.oracle_every = get_int_in(r, "returnmap", "oracle_every", 0, 100'000'000);
        }
        cfg.returnmap = rm;
    }
    if (cfg.horizon && cfg.strobe) {
        throw ConfigError("horizon", "give exactly one of \"horizon\" or \"strobe\"");
    }
    if (!cfg.horizon && !cfg.strobe && !cfg.returnmap) {
        throw ConfigError("horizon", "required field is missing (or give \"strobe\")");
    }
}

void parse_output(const json& doc, RunConfig& cfg) {
    if (!doc.contains("output")) {
        return;
    }
    const json& out = doc.at("output");
    require_object(out, "output");
    reject_unknown(out, "output", {"format", "path"});
    if (out.contains("format")) {
        const std::string format = get_string(out, "output", "format");
        if (format == "csv") {
            cfg.output.format = OutputConfig::Format::Csv;
        } else if (format == "svg") {
            cfg.output.format = OutputConfig::Format::Svg;
        } else {
            throw ConfigError("output.format", "expected \"csv\" or \"svg\"");
        }
    }
    if (out.contains("path")) {
        cfg.output.path = get_string(out, "output", "path");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text, ParseOptions options) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    require_object(doc, "");
    reject_unknown(doc, "", {"n", "epsilon", "tau", "curve", "seed", "init", "horizon", "strobe", "returnmap",
                             "tolerances", "output", "strict"});

    RunConfig cfg;
    cfg.params.coupling.n = get_int_in(doc, "", "n", 2, 10'000'000);
    cfg.params.coupling.epsilon = get_number(doc, "", "epsilon");
    if (cfg.params.coupling.epsilon < 0.0) {
        throw ConfigError("epsilon", "must be >= 0");
    }
    cfg.params.coupling.tau = get_number(doc, "", "tau");
    if (!(cfg.params.coupling.tau > 0.0)) {
        throw ConfigError("tau", "must be > 0");
    }

    const json& curve = require(doc, "", "curve");
    require_object(curve, "curve");
    reject_unknown(curve, "curve", {"family", "i"});
    const std::string family = get_string(curve, "curve", "family");
    if (family != CurveSpec::family_name(CurveFamily::MsExponential)) {
        throw ConfigError("curve.family", "unsupported curve family \"" + family + "\"");
    }
    const double dissipation = get_number(curve, "curve", "i");
    if (!(dissipation > 1.0)) {
        throw ConfigError("curve.i", "must be > 1");
    }
    cfg.params.curve = CurveSpec::ms_exponential(dissipation);

    const json& seed = require(doc, "", "seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
        throw ConfigError("seed", "expected a non-negative 64-bit integer");
    }
    cfg.seed = seed.get<std::uint64_t>();

    parse_init(doc, cfg);
    parse_tolerances(doc, cfg);
    parse_run_mode(doc, cfg);
    parse_output(doc, cfg);

    if (doc.contains("strict")) {
        if (!doc.at("strict").is_boolean()) {
            throw ConfigError("strict", "expected a boolean");
        }
        cfg.strict = doc.at("strict").get<bool>();
    }
    cfg.strict = cfg.strict || options.strict;

    cfg.assumptions = validate_assumptions(cfg.params.curve, cfg.params.coupling);
    if (!cfg.assumptions.a2_holds) {
        std::ostringstream msg;
        msg << "f(2 tau) + N epsilon = " << cfg.assumptions.a2_value
            << " >= 1; the firing-gap and single-pending-spike guarantees no longer apply";
        if (cfg.strict) {
            throw AssumptionViolation(msg.str());
        }
        cfg.warnings.push_back(msg.str());
    }
    return cfg;
}

std::vector<double> initial_phases(const RunConfig& config) {
    if (config.init.mode == InitConfig::Mode::Explicit) {
        return config.init.phases;
    }
    return sample_uniform_phases(config.seed, config.params.coupling.n, config.init.low, config.init.high);
}

}  // namespace pcsync
