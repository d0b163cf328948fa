#pragma once

#include <cstdint>
#include <vector>

#include "larmor/adiabatic.hpp"

namespace larmor {

/// Fock state label: radial quantum number n_r >= 0 and canonical angular momentum m.
struct FockLabel {
    int n_r = 0;
    int m = 0;
};

inline constexpr double hbar = 1.0;

/// Populations |C_{nq}^{(m)}|^2 of instantaneous Fock states |q, m> after the crossing(s).
struct SpectralDistribution {
    FockLabel initial;
    double u_minus_abs = 0.0;
    std::vector<double> probabilities;  ///< index q
    /// Sign of the Jacobi factor for each q; its changes mark the lobes of the distribution.
    std::vector<int> jacobi_signs;
    double tail_bound = 0.0;  ///< 1 - sum(probabilities), clamped at 0

    std::size_t q_max() const { return probabilities.empty() ? 0 : probabilities.size() - 1; }
};

/// ln |C_{nq}^{(m)}|^2; -inf for exactly vanishing weights.
double log_transition_probability(int n, int q, int m, double u_minus_abs);

/// |C_{nq}^{(m)}|^2 as a function of |u-| only (|u+|^2 = 1 + |u-|^2).
double transition_probability(int n, int q, int m, double u_minus_abs);

struct DistributionOptions {
    double tail_tol = 1e-12;
    std::size_t q_cap = 1'000'000;
};

SpectralDistribution distribution(const FockLabel& initial, double u_minus_abs,
                                  const DistributionOptions& options = {});

/// <q> = n_r (1 + 2|u-|^2) + |u-|^2 (|m| + 1)
double mean_q(const FockLabel& initial, double u_minus_sq);

/// hbar |omega| (2 n_r + |m| + 1)(|u+|^2 + |u-|^2) - hbar omega m
double mean_energy_adiabatic(const FockLabel& initial, const BogoliubovPair& pair, double omega);

/// Energy variance for an initial n_r = 0 state: 4 (hbar omega)^2 (1 + |m|) |u+ u-|^2
double energy_variance_ground(int m, const BogoliubovPair& pair, double omega);

/// Instantaneous Fock energy hbar |omega| (1 + |m| - sign(omega) m + 2q).
double fock_energy(int q, int m, double omega);

struct DistributionMoments {
    double mean;
    double variance;
    /// False when the tail bound exceeds 1e-9 and the moments are not certified.
    bool certified;
};

DistributionMoments distribution_moments(const SpectralDistribution& dist);

/// Mean and variance of the instantaneous energy over a distribution.
DistributionMoments distribution_energy_moments(const SpectralDistribution& dist, double omega);

}  // namespace larmor
