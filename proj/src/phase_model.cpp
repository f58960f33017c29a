#include "pcsync/phase_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pcsync {

namespace {

constexpr double kClampSlack = 1e-12;

void require_unit_interval(double value, const char* what) {
    if (!(value >= 0.0 && value <= 1.0)) {
        std::ostringstream msg;
        msg << what << " = " << value << " outside [0, 1]";
        throw DomainError(msg.str());
    }
}

}  // namespace

CurveSpec::CurveSpec(CurveFamily family, double dissipation)
    : family_(family), dissipation_(dissipation), log_ratio_(0.0) {
    switch (family_) {
    case CurveFamily::MsExponential:
        if (!(dissipation > 1.0) || !std::isfinite(dissipation)) {
            std::ostringstream msg;
            msg << "dissipation I must be a finite value > 1, got " << dissipation;
            throw ValidationError(msg.str());
        }
        log_ratio_ = std::log((dissipation - 1.0) / dissipation);
        break;
    }
}

CurveSpec CurveSpec::ms_exponential(double dissipation) {
    return CurveSpec(CurveFamily::MsExponential, dissipation);
}

std::string CurveSpec::family_name(CurveFamily family) {
    switch (family) {
    case CurveFamily::MsExponential:
        return "ms_exponential";
    }
    return "unknown";
}

void CouplingParams::validate() const {
    if (n < 2) {
        throw ValidationError("oscillator count n must be >= 2, got " + std::to_string(n));
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ValidationError("transmission delay tau must be > 0");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ValidationError("coupling strength epsilon must be >= 0");
    }
}

double f_eval(const CurveSpec& curve, double phi) {
    require_unit_interval(phi, "phase");
    switch (curve.family_) {
    case CurveFamily::MsExponential:
        // I * (1 - r^phi) written with expm1 to keep precision near phi = 0.
        return -curve.dissipation_ * std::expm1(curve.log_ratio_ * phi);
    }
    return 0.0;
}

double f_inv(const CurveSpec& curve, double x) {
    if (x < 0.0 && x >= -kClampSlack) {
        x = 0.0;
    } else if (x > 1.0 && x <= 1.0 + kClampSlack) {
        x = 1.0;
    }
    require_unit_interval(x, "state");
    switch (curve.family_) {
    case CurveFamily::MsExponential:
        return std::clamp(std::log1p(-x / curve.dissipation_) / curve.log_ratio_, 0.0, 1.0);
    }
    return 0.0;
}

double curve_slope(const CurveSpec& curve, double phi) {
    require_unit_interval(phi, "phase");
    switch (curve.family_) {
    case CurveFamily::MsExponential:
        return -curve.dissipation_ * curve.log_ratio_ * std::exp(curve.log_ratio_ * phi);
    }
    return 0.0;
}

double jump(const CurveSpec& curve, double epsilon, double theta, int m) {
    require_unit_interval(theta, "phase");
    if (m < 0) {
        throw DomainError("spike count must be non-negative");
    }
    if (m == 0) {
        return theta;
    }
    const double lifted = f_eval(curve, theta) + static_cast<double>(m) * epsilon;
    if (lifted >= 1.0) {
        return 1.0;
    }
    return f_inv(curve, lifted);
}

AssumptionReport validate_assumptions(const CurveSpec& curve, const CouplingParams& params) {
    params.validate();
    // f is clamped at argument 1, where it equals 1 exactly.
    const double f_two_tau = 2.0 * params.tau >= 1.0 ? 1.0 : f_eval(curve, 2.0 * params.tau);
    AssumptionReport report;
    report.a2_value = f_two_tau + static_cast<double>(params.n) * params.epsilon;
    report.a2_holds = report.a2_value < 1.0;
    report.margin = 1.0 - report.a2_value;
    return report;
}

}  // namespace pcsync
