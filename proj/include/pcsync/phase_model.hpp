#pragma once

#include <stdexcept>
#include <string>

namespace pcsync {

/// Thrown when a phase or state argument lies outside [0, 1].
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when a parameter set or initial condition is malformed.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class CurveFamily {
    /// f(phi) = I * (1 - ((I-1)/I)^phi), with dissipation I > 1.
    MsExponential,
};

/// Concave phase-to-state curve x = f(phi) on [0, 1] with f(0) = 0, f(1) = 1.
///
/// New families are added by extending CurveFamily and the dispatch in
/// phase_model.cpp; the dynamics and audits only rely on f being smooth,
/// strictly increasing and strictly concave.
class CurveSpec {
public:
    static CurveSpec ms_exponential(double dissipation);

    [[nodiscard]] CurveFamily family() const noexcept { return family_; }
    [[nodiscard]] double dissipation() const noexcept { return dissipation_; }

    [[nodiscard]] static std::string family_name(CurveFamily family);

private:
    CurveSpec(CurveFamily family, double dissipation);

    CurveFamily family_;
    double dissipation_;
    // ln((I-1)/I), cached; negative.
    double log_ratio_;

    friend double f_eval(const CurveSpec&, double);
    friend double f_inv(const CurveSpec&, double);
    friend double curve_slope(const CurveSpec&, double);
};

struct CouplingParams {
    int n = 2;
    double epsilon = 0.0;
    double tau = 0.1;

    /// Throws ValidationError unless n >= 2, tau > 0, epsilon >= 0.
    void validate() const;
};

struct AssumptionReport {
    double a2_value = 0.0;  // f(2 tau) + N epsilon
    bool a2_holds = false;
    double margin = 0.0;  // 1 - a2_value
};

[[nodiscard]] double f_eval(const CurveSpec& curve, double phi);

/// Inputs within 1e-12 outside [0, 1] are clamped; anything further is a DomainError.
[[nodiscard]] double f_inv(const CurveSpec& curve, double x);

[[nodiscard]] double curve_slope(const CurveSpec& curve, double phi);

/// The jump map F_m(theta) = f^-1(min(1, f(theta) + m * epsilon)).
///
/// Returns theta unchanged for m == 0 and exactly 1.0 whenever the pulse
/// pushes the state to or past threshold.
[[nodiscard]] double jump(const CurveSpec& curve, double epsilon, double theta, int m);

[[nodiscard]] AssumptionReport validate_assumptions(const CurveSpec& curve,
                                                    const CouplingParams& params);

}  // namespace pcsync
