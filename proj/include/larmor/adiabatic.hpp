#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "larmor/evolver.hpp"

namespace larmor {

/// Amplitudes of the positive- and negative-phase WKB branches,
/// eps ~ |omega|^{-1/2} (u+ e^{i phi} + u- e^{-i phi}).
struct BogoliubovPair {
    complex u_plus{1.0, 0.0};
    complex u_minus{0.0, 0.0};

    /// | |u+|^2 - |u-|^2 - 1 |
    double identity_residual() const;
    /// identity_residual scaled by |u+|^2 + |u-|^2; the meaningful figure for long chains.
    double relative_identity_residual() const;
};

struct ExtractOptions {
    /// Average the pair over the trailing local period instead of reporting the raw value.
    /// The averaged pair obeys the identity only to O(adiabaticity^2).
    bool average = false;
    int window_samples = 32;
    double max_adiabaticity = 0.1;
};

struct Extraction {
    BogoliubovPair pair;
    /// Peak-to-peak spread of u- over the trailing local period, plus the trajectory's
    /// Wronskian residual as a floor for integration error.
    double error_estimate;
    double adiabaticity;
    /// Trapezoidal mean of the raw |u-|^2 over the same trailing period; the local
    /// oscillation drops out to second order.
    double mean_u_minus_sq;
};

/// Local inversion of the WKB form at one state. The overall phase is normalised so that the
/// solution before the first zero reads |omega|^{-1/2} e^{i phi}.
BogoliubovPair local_pair(const Trajectory& trajectory, const OscillatorState& state);

Extraction extract(const Trajectory& trajectory, double t, const ExtractOptions& options = {});

/// Re-expresses a pair in the plane-wave convention of constant-frequency asymptotes,
/// eps ~ |omega|^{-1/2} e^{i |omega| t} before and u+ e^{i |omega| t} + u- e^{-i |omega| t} after,
/// given the offsets delta = phi(t) - |omega| t on each side.
BogoliubovPair plane_wave_pair(const BogoliubovPair& pair, double delta_i, double delta_f);
/// Same, reading the offsets from the trajectory at t_begin and at t_late.
BogoliubovPair plane_wave_pair(const BogoliubovPair& pair, const Trajectory& trajectory, double t_late);

/// Adiabatic-limit coefficients for omega = omega0 (-t/tau)^k:
/// u+ = 1/sin(pi/(2(k+1))), u- = i cot(pi/(2(k+1))).
BogoliubovPair analytic_powerlaw(int k);

/// |u-|^2 for the tanh profile in the adiabatic regime.
double analytic_tanh(double omega_i, double omega_f, double kappa);
/// Whether |omega_i - omega_f| is large against kappa/2 (factor 10 margin).
bool tanh_adiabatic_regime(double omega_i, double omega_f, double kappa);
/// Complex coefficients for the antisymmetric tanh profile omega_f = -omega_i = -omega0.
BogoliubovPair analytic_tanh_symmetric(double omega0, double kappa);

/// Chains single-crossing pairs. Entry k carries the pair for crossing k and
/// Phi_k = int_{t_0}^{t_k} |omega|; Phi_0 must be 0 and the list strictly increasing.
BogoliubovPair compose(const std::vector<std::pair<BogoliubovPair, double>>& crossings);

/// Cumulative composition of one repeated crossing over a phase schedule.
std::vector<BogoliubovPair> sweep_compose(const BogoliubovPair& crossing, std::size_t n,
                                          const std::vector<double>& phi_list);

/// Bounds on |U-^{(1)}|^2 after two crossings.
std::pair<double, double> double_passage_bounds(const BogoliubovPair& first, const BogoliubovPair& second);

/// Smallest Phi > min_phi with Re[u+ e^{i Phi}] = 0, which makes two identical passages cancel.
double cancellation_phase(const BogoliubovPair& crossing, double min_phi = 0.0);

/// Phi schedule starting at 0 with gaps min_gap + 2 pi U, U uniform in [0,1), from a seeded
/// 64-bit Mersenne Twister. Reproducible across platforms.
std::vector<double> random_phase_schedule(std::size_t n, std::uint64_t seed,
                                          double min_gap = 2.0 * std::numbers::pi);

}  // namespace larmor
