#include "larmor/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace larmor {
namespace {

double gamma_of(const FockLabel& label) { return 2.0 * label.n_r + std::abs(label.m) + 1.0; }

CovarianceState block_covariance(double gamma, double m, double omega_i) {
    if (!(omega_i > 0.0)) throw PreconditionError("initial covariance requires omega_i > 0");
    CovarianceState c;
    const double h = 0.5 * hbar;
    c.Q(0, 0) = c.Q(1, 1) = h * gamma / omega_i;
    c.Q(2, 2) = c.Q(3, 3) = h * gamma * omega_i;
    // <x p_y> = -<y p_x> = hbar m / 2
    c.Q(0, 3) = c.Q(3, 0) = h * m;
    c.Q(1, 2) = c.Q(2, 1) = -h * m;
    return c;
}

}  // namespace

std::pair<double, double> CovarianceState::uncertainty_determinants() const {
    const double dx = Q(0, 0) * Q(2, 2) - Q(0, 2) * Q(0, 2);
    const double dy = Q(1, 1) * Q(3, 3) - Q(1, 3) * Q(1, 3);
    return {dx, dy};
}

bool CovarianceState::is_physical(double tol) const {
    const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
    Eigen::SelfAdjointEigenSolver<Matrix4> es(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * scale) return false;
    const auto [dx, dy] = uncertainty_determinants();
    const double bound = 0.25 * hbar * hbar;
    return dx >= bound * (1.0 - tol) && dy >= bound * (1.0 - tol);
}

InvariantStateParams InvariantStateParams::from_fock(const FockLabel& label) {
    const double base = 1.0 + 2.0 * label.n_r + std::abs(label.m);
    return {base - label.m, base + label.m};
}

void InvariantStateParams::validate() const {
    if (!(G_plus >= 1.0) || !(G_minus >= 1.0)) throw PreconditionError("invariant-state parameters require G± >= 1");
}

double fock_moment_mean(const FockLabel& label, double omega, double eps_abs_sq) {
    if (!(eps_abs_sq > 0.0)) throw PreconditionError("|eps|^2 must be positive");
    return mu_B * (label.m - omega * eps_abs_sq * gamma_of(label));
}

double fock_moment_variance(const FockLabel& label, double omega, double eps_abs_sq) {
    if (!(eps_abs_sq > 0.0)) throw PreconditionError("|eps|^2 must be positive");
    const double s = mu_B * omega * eps_abs_sq;
    const double am = std::abs(label.m);
    return s * s * (2.0 * label.n_r * (label.n_r + am + 1.0) + am + 1.0);
}

double w_of_t(const BogoliubovPair& pair, double phi) {
    return std::norm(pair.u_plus) + std::norm(pair.u_minus) +
           2.0 * (pair.u_plus * std::conj(pair.u_minus) * std::polar(1.0, 2.0 * phi)).real();
}

std::pair<double, double> w_bounds(const BogoliubovPair& pair) {
    const double a = std::abs(pair.u_minus);
    const double r = std::sqrt(1.0 + a * a) + a;
    return {1.0 / (r * r), r * r};
}

CovarianceState initial_covariance(const FockLabel& label, double omega_i) {
    return block_covariance(gamma_of(label), label.m, omega_i);
}

CovarianceState initial_covariance(const InvariantStateParams& params, double omega_i) {
    params.validate();
    return block_covariance(params.gamma(), params.angular(), omega_i);
}

Matrix4 propagator(const OscillatorState& state, double omega_i) {
    if (!(omega_i > 0.0)) throw PreconditionError("propagator requires omega_i > 0");
    const double c = std::cos(state.phi_tilde), s = std::sin(state.phi_tilde);
    Eigen::Matrix2d r;
    r << c, s, -s, c;
    Matrix4 lam;
    lam.block<2, 2>(0, 0) = state.eps.real() * r;
    lam.block<2, 2>(0, 2) = state.eps.imag() / omega_i * r;
    lam.block<2, 2>(2, 0) = state.deps.real() * r;
    lam.block<2, 2>(2, 2) = state.deps.imag() / omega_i * r;
    return std::sqrt(omega_i) * lam;
}

CovarianceState propagate(const CovarianceState& q0, const OscillatorState& state, double omega_i) {
    const Matrix4 lam = propagator(state, omega_i);
    return CovarianceState{lam * q0.Q * lam.transpose()};
}

double energy_from_covariance(const CovarianceState& q, double omega) {
    const auto& Q = q.Q;
    return 0.5 * (Q(2, 2) + Q(3, 3)) + 0.5 * omega * omega * (Q(0, 0) + Q(1, 1)) - omega * (Q(0, 3) - Q(1, 2));
}

double energy_eps(const FockLabel& label, const OscillatorState& state, double omega) {
    return 0.5 * hbar * gamma_of(label) * (std::norm(state.deps) + omega * omega * std::norm(state.eps)) -
           label.m * hbar * omega;
}

double energy_eps(const InvariantStateParams& params, const OscillatorState& state, double omega) {
    params.validate();
    return 0.25 * hbar * (params.G_plus + params.G_minus) * (std::norm(state.deps) + omega * omega * std::norm(state.eps)) +
           0.5 * hbar * omega * (params.G_plus - params.G_minus);
}

double moment_from_covariance(const CovarianceState& q, double omega) {
    const auto& Q = q.Q;
    return mu_B * ((Q(0, 3) - Q(1, 2)) - omega * (Q(0, 0) + Q(1, 1))) / hbar;
}

InvariantAsymptotics invariant_state_asymptotics(const InvariantStateParams& params, const BogoliubovPair& pair,
                                                 double omega_f) {
    if (omega_f == 0.0) throw PreconditionError("asymptotic values require omega_f != 0");
    params.validate();
    const double gs = params.G_plus + params.G_minus;
    const double amp = 1.0 + 2.0 * std::norm(pair.u_minus);
    const double sgn = omega_f > 0 ? 1.0 : -1.0;
    InvariantAsymptotics out;
    out.energy = 0.5 * hbar * (std::abs(omega_f) * gs * amp + omega_f * (params.G_plus - params.G_minus));
    out.moment_amplitude = mu_B * std::abs(pair.u_plus * pair.u_minus) * gs;
    out.moment_average = 0.5 * mu_B * (params.G_minus - params.G_plus - sgn * gs * amp);
    return out;
}

double moment_evolution(const InvariantStateParams& params, const OscillatorState& state, double omega) {
    return 0.5 * mu_B *
           (params.G_minus - params.G_plus - omega * std::norm(state.eps) * (params.G_plus + params.G_minus));
}

WignerSample wigner_and_purity(const InvariantStateParams& params, double omega, const std::array<double, 4>& point) {
    params.validate();
    if (!(omega > 0.0)) throw PreconditionError("Wigner function requires omega > 0");
    const auto [x, y, px, py] = point;
    const double gp = params.G_plus, gm = params.G_minus;
    const double quad = (gp + gm) * (omega * omega * (x * x + y * y) + px * px + py * py) +
                        2.0 * (gp - gm) * omega * (x * py - y * px);
    return {4.0 / (gp * gm) * std::exp(-quad / (2.0 * hbar * omega * gp * gm)), 1.0 / (gp * gm)};
}

GuidingCenterMoments guiding_center_moments(const InvariantStateParams& params, double omega) {
    params.validate();
    if (!(omega > 0.0)) throw PreconditionError("guiding-center moments require omega > 0");
    return {hbar * params.G_plus / (4.0 * omega), hbar * params.G_minus / (4.0 * omega)};
}

MomentOscillation measure_moment_oscillation(const Trajectory& trajectory, const InvariantStateParams& params,
                                             double t_start, int half_periods, int samples_per_half_period) {
    if (half_periods < 1 || samples_per_half_period < 4)
        throw PreconditionError("oscillation scan needs at least one period and four samples per period");
    const double phi0 = trajectory.state_at(t_start).phi;
    const double phi_target = phi0 + half_periods * std::numbers::pi;
    if (trajectory.back().phi < phi_target) {
        std::ostringstream os;
        os << "trajectory too short for " << half_periods << " oscillation periods after t=" << t_start;
        throw PreconditionError(os.str());
    }
    double lo = t_start, hi = trajectory.t_end();
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (trajectory.state_at(mid).phi < phi_target ? lo : hi) = mid;
    }
    const double t_stop = 0.5 * (lo + hi);

    const int n = half_periods * samples_per_half_period;
    const double h = (t_stop - t_start) / n;
    MomentOscillation out{};
    out.minimum = std::numeric_limits<double>::infinity();
    out.maximum = -std::numeric_limits<double>::infinity();
    double integral = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double t = (j == n) ? t_stop : t_start + j * h;
        const auto s = trajectory.state_at(t);
        const double m = moment_evolution(params, s, trajectory.profile().value(t));
        out.minimum = std::min(out.minimum, m);
        out.maximum = std::max(out.maximum, m);
        integral += (j == 0 || j == n) ? 0.5 * m : m;
    }
    out.amplitude = 0.5 * (out.maximum - out.minimum);
    out.average = integral / n;
    out.t_start = t_start;
    out.t_stop = t_stop;
    return out;
}

}  // namespace larmor
