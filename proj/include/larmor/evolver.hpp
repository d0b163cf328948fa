#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "larmor/errors.hpp"
#include "larmor/profiles.hpp"

namespace larmor {

using complex = std::complex<double>;

/// Auxiliary oscillator eps(t) solving eps'' + omega(t)^2 eps = 0, with the two
/// accumulated phases phi = int |omega| (zero at the first frequency zero) and
/// phi_tilde = int omega (zero at the initial time).
struct OscillatorState {
    double t = 0.0;
    complex eps;
    complex deps;
    double phi = 0.0;
    double phi_tilde = 0.0;

    /// |deps eps* - deps* eps - 2i|.
    double wronskian_residual() const;
};

struct CrossingEvent {
    double t;
    double Phi;  ///< int_{t_0}^{t_k} |omega|; zero for the first crossing
    ZeroKind kind;
};

struct IntegrationOptions {
    double tol = 1e-12;
    /// Largest phase |omega| h advanced per step. Bounds the dense-output error.
    double max_phase_step = 0.25;
    std::size_t max_steps = 20'000'000;
};

/// Raised when the step size underflows; carries the last accepted state.
class IntegrationError : public Error {
  public:
    IntegrationError(const std::string& what, OscillatorState last_good)
        : Error(what), last_good_(last_good) {}
    const OscillatorState& last_good() const noexcept { return last_good_; }

  private:
    OscillatorState last_good_;
};

class Trajectory {
  public:
    Trajectory(FrequencyProfile profile, std::vector<OscillatorState> samples,
               std::vector<CrossingEvent> crossings);

    const FrequencyProfile& profile() const noexcept { return profile_; }
    const std::vector<OscillatorState>& samples() const noexcept { return samples_; }
    /// |omega'|/omega^2 at each sample; +inf where omega vanishes.
    const std::vector<double>& adiabaticity_samples() const noexcept { return adiabaticity_; }
    const std::vector<CrossingEvent>& crossings() const noexcept { return crossings_; }
    double max_wronskian_residual() const noexcept { return max_residual_; }

    double t_begin() const noexcept { return samples_.front().t; }
    double t_end() const noexcept { return samples_.back().t; }
    const OscillatorState& front() const noexcept { return samples_.front(); }
    const OscillatorState& back() const noexcept { return samples_.back(); }

    /// Dense output: quintic Hermite on eps, deps and both phases.
    OscillatorState state_at(double t) const;

  private:
    FrequencyProfile profile_;
    std::vector<OscillatorState> samples_;
    std::vector<double> adiabaticity_;
    std::vector<CrossingEvent> crossings_;
    double max_residual_ = 0.0;
};

/// Positive-frequency initial conditions eps = omega^{-1/2}, deps = i omega^{1/2} at t_i.
OscillatorState initial_state(const FrequencyProfile& profile, double t_i);

/// Integrates from initial_state(profile, t_i) to t_f > t_i.
Trajectory integrate(const FrequencyProfile& profile, double t_i, double t_f,
                     const IntegrationOptions& options = {});

/// Integrates an arbitrary starting state to t_end, forwards or backwards in time,
/// and returns only the final state.
OscillatorState propagate_state(const FrequencyProfile& profile, const OscillatorState& start,
                                double t_end, const IntegrationOptions& options = {});

/// Integrates an arbitrary starting state forward to t_end > start.t.
Trajectory integrate_from(const FrequencyProfile& profile, const OscillatorState& start, double t_end,
                          const IntegrationOptions& options = {});

OscillatorState state_at(const Trajectory& trajectory, double t);

/// |omega'(t)| / omega(t)^2. Throws SingularPointError where omega vanishes.
double adiabaticity(const FrequencyProfile& profile, double t);
double adiabaticity(const Trajectory& trajectory, double t);

}  // namespace larmor
