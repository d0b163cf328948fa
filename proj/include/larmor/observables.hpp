#pragma once

#include <array>
#include <utility>

#include <Eigen/Core>

#include "larmor/adiabatic.hpp"
#include "larmor/spectra.hpp"

namespace larmor {

/// Magnetic moments are expressed in Bohr magnetons throughout.
inline constexpr double mu_B = 1.0;

using Matrix4 = Eigen::Matrix4d;

/// Symmetrised second moments over (x, y, p_x, p_y). First moments vanish for every state here.
struct CovarianceState {
    Matrix4 Q = Matrix4::Zero();

    /// det of the (x,p_x) and (y,p_y) blocks; each must be >= (hbar/2)^2.
    std::pair<double, double> uncertainty_determinants() const;
    /// Symmetric, positive semidefinite and Robertson-compliant within `tol`.
    bool is_physical(double tol = 1e-10) const;
};

/// Isotropic invariant-state parameters; Fock states have G± = 1 + 2 n_r + |m| ∓ m.
struct InvariantStateParams {
    double G_plus = 1.0;
    double G_minus = 1.0;

    static InvariantStateParams from_fock(const FockLabel& label);
    void validate() const;
    double gamma() const { return 0.5 * (G_plus + G_minus); }
    double angular() const { return 0.5 * (G_minus - G_plus); }
};

/// <M> = mu_B [m - omega |eps|^2 (2 n_r + |m| + 1)]
double fock_moment_mean(const FockLabel& label, double omega, double eps_abs_sq);
/// sigma_M = [mu_B omega |eps|^2]^2 [2 n_r (n_r + |m| + 1) + |m| + 1]
double fock_moment_variance(const FockLabel& label, double omega, double eps_abs_sq);

/// w = |u+|^2 + |u-|^2 + 2 Re[u+ u-* e^{2 i phi}]
double w_of_t(const BogoliubovPair& pair, double phi);
std::pair<double, double> w_bounds(const BogoliubovPair& pair);

CovarianceState initial_covariance(const FockLabel& label, double omega_i);
CovarianceState initial_covariance(const InvariantStateParams& params, double omega_i);

/// Phase-space propagator Lambda(t; t_i) built from eps, deps and the rotation by phi_tilde.
Matrix4 propagator(const OscillatorState& state, double omega_i);

/// Lambda Q0 Lambda^T.
CovarianceState propagate(const CovarianceState& q0, const OscillatorState& state, double omega_i);

/// <H> = (p_x^2 + p_y^2)/2 + omega^2 (x^2 + y^2)/2 - omega (x p_y - y p_x)
double energy_from_covariance(const CovarianceState& q, double omega);

/// Closed form (hbar gamma / 2)(|deps|^2 + omega^2 |eps|^2) - hbar omega m.
double energy_eps(const FockLabel& label, const OscillatorState& state, double omega);
double energy_eps(const InvariantStateParams& params, const OscillatorState& state, double omega);

/// Kinetic angular momentum from second moments, in mu_B: (x p_y - y p_x) - omega (x^2 + y^2).
double moment_from_covariance(const CovarianceState& q, double omega);

struct InvariantAsymptotics {
    double energy;             ///< E_f
    double moment_amplitude;   ///< Delta M
    double moment_average;     ///< time-averaged M
};

InvariantAsymptotics invariant_state_asymptotics(const InvariantStateParams& params, const BogoliubovPair& pair,
                                                 double omega_f);

/// M(t) = (mu_B/2) [G- - G+ - omega |eps|^2 (G+ + G-)]
double moment_evolution(const InvariantStateParams& params, const OscillatorState& state, double omega);

struct WignerSample {
    double density;
    double purity;
};

/// Gaussian invariant-state Wigner function at point (x, y, p_x, p_y) and its purity 1/(G+ G-).
WignerSample wigner_and_purity(const InvariantStateParams& params, double omega, const std::array<double, 4>& point);

struct GuidingCenterMoments {
    double relative;  ///< <x_r^2> = <y_r^2>
    double center;    ///< <x_c^2> = <y_c^2>
};

GuidingCenterMoments guiding_center_moments(const InvariantStateParams& params, double omega);

struct MomentOscillation {
    double minimum;
    double maximum;
    double amplitude;  ///< (max - min)/2
    double average;    ///< trapezoidal mean over an integer number of half-periods
    double t_start;
    double t_stop;
};

/// Scans M(t) over `half_periods` oscillations of phase pi (period pi/|omega|) starting at
/// t_start; the window end is located on the trajectory's phi.
MomentOscillation measure_moment_oscillation(const Trajectory& trajectory, const InvariantStateParams& params,
                                             double t_start, int half_periods, int samples_per_half_period = 64);

}  // namespace larmor
