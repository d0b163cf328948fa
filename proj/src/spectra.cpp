#include "larmor/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "larmor/specfun.hpp"

namespace larmor {
namespace {

// Neumaier compensated summation.
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

struct LogWeight {
    double log_value;
    int jacobi_sign;
};

LogWeight log_weight(int n, int q, int m, double u_minus_abs) {
    if (n < 0 || q < 0) throw PreconditionError("radial quantum numbers must be non-negative");
    if (!(u_minus_abs >= 0.0)) throw PreconditionError("|u-| must be non-negative");
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (u_minus_abs == 0.0) return {q == n ? 0.0 : neg_inf, 1};

    const long am = std::labs(m);
    const long d = std::labs(static_cast<long>(q) - n);
    const long lo = std::min(n, q), hi = std::max(n, q);
    const double u2 = u_minus_abs * u_minus_abs;
    const double prefactor = specfun::log_factorial_ratio({{1, hi + am}, {1, lo}, {-1, lo + am}, {-1, hi}}) +
                             static_cast<double>(d) * std::log(u2) -
                             static_cast<double>(d + am + 1) * std::log1p(u2);
    const auto jac = specfun::jacobi_scaled(static_cast<int>(lo), static_cast<double>(d),
                                            static_cast<double>(am), (1.0 - u2) / (1.0 + u2));
    if (jac.mantissa == 0.0) return {neg_inf, 0};
    return {prefactor + 2.0 * jac.log_abs(), jac.sign()};
}

}  // namespace

double log_transition_probability(int n, int q, int m, double u_minus_abs) {
    return log_weight(n, q, m, u_minus_abs).log_value;
}

double transition_probability(int n, int q, int m, double u_minus_abs) {
    return std::exp(log_transition_probability(n, q, m, u_minus_abs));
}

SpectralDistribution distribution(const FockLabel& initial, double u_minus_abs, const DistributionOptions& options) {
    if (!(options.tail_tol > 0.0 && options.tail_tol <= 1e-3))
        throw PreconditionError("tail tolerance must lie in (0, 1e-3]");
    if (initial.n_r < 0) throw PreconditionError("n_r must be non-negative");

    SpectralDistribution dist;
    dist.initial = initial;
    dist.u_minus_abs = u_minus_abs;
    CompensatedSum total;
    for (std::size_t q = 0;; ++q) {
        if (q > options.q_cap) {
            std::ostringstream os;
            os << "distribution did not reach tail tolerance " << options.tail_tol << " within q_cap=" << options.q_cap
               << " (sum=" << total.value() << ")";
            throw TruncationError(os.str());
        }
        const auto w = log_weight(initial.n_r, static_cast<int>(q), initial.m, u_minus_abs);
        const double p = std::exp(w.log_value);
        dist.probabilities.push_back(p);
        dist.jacobi_signs.push_back(w.jacobi_sign);
        total.add(p);
        if (total.value() >= 1.0 - options.tail_tol) break;
    }
    dist.tail_bound = std::max(0.0, 1.0 - total.value());
    return dist;
}

double mean_q(const FockLabel& initial, double u_minus_sq) {
    return initial.n_r * (1.0 + 2.0 * u_minus_sq) + u_minus_sq * (std::abs(initial.m) + 1.0);
}

double mean_energy_adiabatic(const FockLabel& initial, const BogoliubovPair& pair, double omega) {
    if (omega == 0.0) throw PreconditionError("mean_energy_adiabatic requires omega != 0");
    const double gamma = 2.0 * initial.n_r + std::abs(initial.m) + 1.0;
    return hbar * std::abs(omega) * gamma * (std::norm(pair.u_plus) + std::norm(pair.u_minus)) -
           hbar * omega * initial.m;
}

double energy_variance_ground(int m, const BogoliubovPair& pair, double omega) {
    const double e = hbar * omega;
    return 4.0 * e * e * (1.0 + std::abs(m)) * std::norm(pair.u_plus * pair.u_minus);
}

double fock_energy(int q, int m, double omega) {
    const double sgn = (omega > 0) - (omega < 0);
    return hbar * std::abs(omega) * (1.0 + std::abs(m) - sgn * m + 2.0 * q);
}

DistributionMoments distribution_moments(const SpectralDistribution& dist) {
    CompensatedSum mass, first;
    for (std::size_t q = 0; q < dist.probabilities.size(); ++q) {
        mass.add(dist.probabilities[q]);
        first.add(static_cast<double>(q) * dist.probabilities[q]);
    }
    const double norm = mass.value();
    const double mean = first.value() / norm;
    CompensatedSum second;
    for (std::size_t q = 0; q < dist.probabilities.size(); ++q) {
        const double d = static_cast<double>(q) - mean;
        second.add(d * d * dist.probabilities[q]);
    }
    return {mean, second.value() / norm, dist.tail_bound < 1e-9};
}

DistributionMoments distribution_energy_moments(const SpectralDistribution& dist, double omega) {
    const auto q = distribution_moments(dist);
    const int m = dist.initial.m;
    const double sgn = (omega > 0) - (omega < 0);
    const double scale = hbar * std::abs(omega);
    return {scale * (1.0 + std::abs(m) - sgn * m + 2.0 * q.mean), 4.0 * scale * scale * q.variance, q.certified};
}

}  // namespace larmor
