#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace larmor {

/// Closed time interval [lo, hi]; either end may be infinite.
struct Interval {
    double lo;
    double hi;

    bool contains(double t) const noexcept { return t >= lo && t <= hi; }
};

enum class ZeroKind { SignChange, Tangency };

/// A time at which the Larmor frequency vanishes.
struct FrequencyZero {
    double t;
    ZeroKind kind;
};

class FrequencyProfile;

/// omega(t) = omega0 * (-t/tau)^k on [-tau, tau].
struct PowerLaw {
    double omega0;
    double tau;
    int k;
};

/// omega(t) = (omega_f e^{kappa t} + omega_i) / (e^{kappa t} + 1).
struct Tanh {
    double omega_i;
    double omega_f;
    double kappa;
};

struct Constant {
    double omega;
};

/// One piece of a Piecewise profile: on [start, end] the frequency is
/// profile(t - offset).
struct Segment {
    double start;
    double end;
    double offset;
    std::shared_ptr<const FrequencyProfile> profile;
};

struct Piecewise {
    std::vector<Segment> segments;
};

/// Natural cubic spline through (t, omega) knots.
struct Sampled {
    std::vector<double> t;
    std::vector<double> omega;
    std::vector<double> second;  // spline second derivatives at the knots
};

/// Time-dependent Larmor frequency. Immutable after construction.
class FrequencyProfile {
  public:
    using Variant = std::variant<PowerLaw, Tanh, Constant, Piecewise, Sampled>;

    static FrequencyProfile power_law(double omega0, double tau, int k);
    static FrequencyProfile tanh(double omega_i, double omega_f, double kappa);
    static FrequencyProfile constant(double omega);
    /// Segments must be contiguous and the assembled frequency continuous.
    static FrequencyProfile piecewise(std::vector<Segment> segments);
    /// Knots must be strictly increasing, at least two of them.
    static FrequencyProfile sampled(std::vector<double> t, std::vector<double> omega);

    /// Gives `profile` restricted to [start, end] and shifted by `offset`.
    static Segment segment(double start, double end, FrequencyProfile profile, double offset = 0.0);

    double value(double t) const;
    double derivative(double t) const;
    Interval domain() const;

    /// Zeros inside the domain, sorted in time.
    std::vector<FrequencyZero> zeros() const;

    /// Points where the profile is only piecewise smooth (segment junctions, spline knots).
    std::vector<double> breakpoints() const;

    /// Largest |omega| over the domain, estimated by sampling for non-parametric variants.
    double max_abs() const;

    const Variant& variant() const noexcept { return v_; }
    std::string type_name() const;

  private:
    explicit FrequencyProfile(Variant v) : v_(std::move(v)) {}

    Variant v_;
};

// Free-function spellings of the profile operations.
double eval(const FrequencyProfile& profile, double t);
double eval_derivative(const FrequencyProfile& profile, double t);
std::vector<FrequencyZero> zeros(const FrequencyProfile& profile);

enum class PhaseKind {
    Unsigned,  ///< integral of |omega|
    Signed     ///< integral of omega
};

/// Integral of |omega| (or omega) from a to b; b < a gives the negated integral.
double phase_integral(const FrequencyProfile& profile, double a, double b,
                      PhaseKind kind = PhaseKind::Unsigned);

}  // namespace larmor
