#include "larmor/adiabatic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace larmor {

double BogoliubovPair::identity_residual() const {
    return std::abs(std::norm(u_plus) - std::norm(u_minus) - 1.0);
}

double BogoliubovPair::relative_identity_residual() const {
    return identity_residual() / (std::norm(u_plus) + std::norm(u_minus));
}

BogoliubovPair local_pair(const Trajectory& trajectory, const OscillatorState& state) {
    const double w = std::abs(trajectory.profile().value(state.t));
    if (w == 0.0) throw SingularPointError("coefficient extraction at a frequency zero");
    const double sw = std::sqrt(w);
    const complex a = sw * state.eps;
    const complex b = state.deps / sw;
    const complex i{0.0, 1.0};
    // Rotate away the phase phi(t_i) carried by the initial conditions.
    const complex ref = std::polar(1.0, trajectory.front().phi);
    BogoliubovPair p;
    p.u_plus = 0.5 * std::polar(1.0, -state.phi) * (a - i * b) * ref;
    p.u_minus = 0.5 * std::polar(1.0, state.phi) * (a + i * b) * ref;
    return p;
}

Extraction extract(const Trajectory& trajectory, double t, const ExtractOptions& options) {
    const double mu = adiabaticity(trajectory, t);
    if (mu > options.max_adiabaticity) {
        std::ostringstream os;
        os << "adiabaticity " << mu << " at t=" << t << " exceeds " << options.max_adiabaticity;
        throw UnreliableExtractionError(os.str());
    }
    const double w = std::abs(trajectory.profile().value(t));
    const BogoliubovPair here = local_pair(trajectory, trajectory.state_at(t));

    const double period = 2.0 * std::numbers::pi / w;
    const double t0 = std::max(trajectory.t_begin(), t - period);
    const int n = std::max(options.window_samples, 2);
    std::vector<BogoliubovPair> window;
    window.reserve(n);
    for (int j = 0; j < n; ++j) {
        const double tj = t0 + (t - t0) * j / (n - 1);
        if (trajectory.profile().value(tj) == 0.0) continue;
        window.push_back(local_pair(trajectory, trajectory.state_at(tj)));
    }
    double spread = 0.0;
    for (std::size_t a = 0; a < window.size(); ++a)
        for (std::size_t b = a + 1; b < window.size(); ++b)
            spread = std::max(spread, std::abs(window[a].u_minus - window[b].u_minus));
    double mean_sq = std::norm(here.u_minus);
    if (window.size() > 1) {
        double acc = 0.0;
        for (std::size_t j = 0; j < window.size(); ++j)
            acc += (j == 0 || j + 1 == window.size() ? 0.5 : 1.0) * std::norm(window[j].u_minus);
        mean_sq = acc / static_cast<double>(window.size() - 1);
    }

    Extraction out{here, spread + trajectory.max_wronskian_residual(), mu, mean_sq};
    if (options.average && !window.empty()) {
        BogoliubovPair mean{{0.0, 0.0}, {0.0, 0.0}};
        for (const auto& p : window) {
            mean.u_plus += p.u_plus;
            mean.u_minus += p.u_minus;
        }
        mean.u_plus /= static_cast<double>(window.size());
        mean.u_minus /= static_cast<double>(window.size());
        out.pair = mean;
    }
    return out;
}

BogoliubovPair plane_wave_pair(const BogoliubovPair& pair, double delta_i, double delta_f) {
    return {pair.u_plus * std::polar(1.0, delta_f - delta_i), pair.u_minus * std::polar(1.0, -(delta_f + delta_i))};
}

BogoliubovPair plane_wave_pair(const BogoliubovPair& pair, const Trajectory& trajectory, double t_late) {
    const auto& first = trajectory.front();
    const auto late = trajectory.state_at(t_late);
    const double di = first.phi - std::abs(trajectory.profile().value(first.t)) * first.t;
    const double df = late.phi - std::abs(trajectory.profile().value(t_late)) * t_late;
    return plane_wave_pair(pair, di, df);
}

BogoliubovPair analytic_powerlaw(int k) {
    if (k < 0) throw PreconditionError("power-law exponent k must be non-negative");
    const double x = std::numbers::pi / (2.0 * (k + 1));
    return {{1.0 / std::sin(x), 0.0}, {0.0, std::cos(x) / std::sin(x)}};
}

double analytic_tanh(double omega_i, double omega_f, double kappa) {
    if (!(kappa > 0.0)) throw PreconditionError("kappa must be positive");
    const double wi = omega_i / kappa, wf = omega_f / kappa;
    return std::exp(2.0 * std::numbers::pi * (std::abs(wi - wf) - wi - std::abs(wf)));
}

bool tanh_adiabatic_regime(double omega_i, double omega_f, double kappa) {
    return std::abs(omega_i - omega_f) >= 10.0 * 0.5 * kappa;
}

BogoliubovPair analytic_tanh_symmetric(double omega0, double kappa) {
    if (!(kappa > 0.0)) throw PreconditionError("kappa must be positive");
    const double w0 = omega0 / kappa;
    return {std::polar(std::numbers::sqrt2, -4.0 * w0 * std::numbers::ln2), {0.0, 1.0}};
}

BogoliubovPair compose(const std::vector<std::pair<BogoliubovPair, double>>& crossings) {
    if (crossings.empty()) throw PreconditionError("compose needs at least one crossing");
    if (crossings.front().second != 0.0) throw PreconditionError("compose: Phi_0 must be zero");
    BogoliubovPair total = crossings.front().first;
    for (std::size_t k = 1; k < crossings.size(); ++k) {
        const auto& [u, phi] = crossings[k];
        if (!(phi > crossings[k - 1].second))
            throw PreconditionError("compose: Phi schedule must be strictly increasing");
        const complex rot = std::polar(1.0, 2.0 * phi);
        BogoliubovPair next;
        next.u_plus = total.u_plus * u.u_plus + total.u_minus * std::conj(u.u_minus) * std::conj(rot);
        next.u_minus = total.u_minus * std::conj(u.u_plus) + total.u_plus * u.u_minus * rot;
        total = next;
    }
    return total;
}

std::vector<BogoliubovPair> sweep_compose(const BogoliubovPair& crossing, std::size_t n,
                                          const std::vector<double>& phi_list) {
    if (n != phi_list.size()) throw PreconditionError("sweep_compose: N must equal the Phi schedule length");
    if (n == 0) return {};
    std::vector<std::pair<BogoliubovPair, double>> chain;
    chain.reserve(n);
    std::vector<BogoliubovPair> out;
    out.reserve(n);
    // Incremental: composing the prefix again each step would be quadratic.
    chain.push_back({crossing, phi_list[0]});
    BogoliubovPair total = compose(chain);
    out.push_back(total);
    for (std::size_t k = 1; k < n; ++k) {
        if (!(phi_list[k] > phi_list[k - 1]))
            throw PreconditionError("sweep_compose: Phi schedule must be strictly increasing");
        total = compose({{total, 0.0}, {crossing, phi_list[k]}});
        out.push_back(total);
    }
    return out;
}

std::pair<double, double> double_passage_bounds(const BogoliubovPair& first, const BogoliubovPair& second) {
    const double a = std::abs(first.u_plus * second.u_minus);
    const double b = std::abs(second.u_plus * first.u_minus);
    return {(a - b) * (a - b), (a + b) * (a + b)};
}

double cancellation_phase(const BogoliubovPair& crossing, double min_phi) {
    const double pi = std::numbers::pi;
    double phi = pi / 2.0 - std::arg(crossing.u_plus);
    phi += pi * std::floor((min_phi - phi) / pi + 1.0);
    while (phi <= min_phi) phi += pi;
    return phi;
}

std::vector<double> random_phase_schedule(std::size_t n, std::uint64_t seed, double min_gap) {
    std::mt19937_64 gen(seed);
    std::vector<double> out;
    out.reserve(n);
    double phi = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            // 53 high bits -> [0,1); std::uniform_real_distribution is not portable across libraries.
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            phi += min_gap + 2.0 * std::numbers::pi * u;
        }
        out.push_back(phi);
    }
    return out;
}

}  // namespace larmor
