#include "larmor/evolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace larmor {
namespace {

namespace odeint = boost::numeric::odeint;

// (Re eps, Im eps, Re deps, Im deps, phi, phi_tilde)
using State = std::array<double, 6>;

struct OscillatorRhs {
    const FrequencyProfile& profile;

    void operator()(const State& x, State& dx, double t) const {
        const double w = profile.value(t);
        const double w2 = w * w;
        dx[0] = x[2];
        dx[1] = x[3];
        dx[2] = -w2 * x[0];
        dx[3] = -w2 * x[1];
        dx[4] = std::abs(w);
        dx[5] = w;
    }
};

State pack(const OscillatorState& s) {
    return {s.eps.real(), s.eps.imag(), s.deps.real(), s.deps.imag(), s.phi, s.phi_tilde};
}

OscillatorState unpack(const State& x, double t) {
    return OscillatorState{t, {x[0], x[1]}, {x[2], x[3]}, x[4], x[5]};
}

// Drives the embedded Fehlberg 7(8) pair from `start` to `t_end`, stopping exactly on every
// frequency zero and profile breakpoint. `on_step` sees each accepted state.
void run_integration(const FrequencyProfile& profile, const OscillatorState& start, double t_end,
                     const IntegrationOptions& opt, const std::function<void(const OscillatorState&)>& on_step) {
    if (!(opt.tol >= 1e-14 && opt.tol <= 1e-6))
        throw PreconditionError("integration tolerance must lie in [1e-14, 1e-6]");
    const Interval d = profile.domain();
    if (!d.contains(start.t) || !d.contains(t_end)) throw DomainError("integration interval outside profile domain");
    if (start.t == t_end) return;

    const double dir = t_end > start.t ? 1.0 : -1.0;
    const double lo = std::min(start.t, t_end), hi = std::max(start.t, t_end);

    std::vector<double> stops;
    for (const auto& z : profile.zeros())
        if (z.t > lo && z.t < hi) stops.push_back(z.t);
    for (double b : profile.breakpoints())
        if (b > lo && b < hi) stops.push_back(b);
    stops.push_back(t_end);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    if (dir < 0) std::reverse(stops.begin(), stops.end());

    auto stepper = odeint::make_controlled(opt.tol, opt.tol, odeint::runge_kutta_fehlberg78<State>());
    const OscillatorRhs rhs{profile};

    State x = pack(start);
    double t = start.t;
    const double w0 = std::abs(profile.value(t));
    double dt_suggest = dir * std::min(opt.max_phase_step / std::max(w0, 1e-300), (hi - lo) / 16.0);
    std::size_t steps = 0;

    for (double target : stops) {
        while (dir * (target - t) > 0.0) {
            if (++steps > opt.max_steps)
                throw IntegrationError("integration exceeded the step budget", unpack(x, t));
            const double w = std::abs(profile.value(t));
            double limit = std::abs(target - t);
            if (w > 0.0) limit = std::min(limit, opt.max_phase_step / w);
            double dt = dir * std::min(std::abs(dt_suggest), limit);
            bool clipped = std::abs(dt) < std::abs(dt_suggest);
            // Avoid leaving a sliver before the target.
            if (std::abs(target - (t + dt)) < 1e-3 * std::abs(dt)) {
                dt = target - t;
                clipped = true;
            }
            const double min_dt = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
            if (std::abs(dt) < min_dt) {
                std::ostringstream os;
                os << "step size underflow at t=" << t;
                throw IntegrationError(os.str(), unpack(x, t));
            }
            const double t_before = t;
            const double dt_tried = dt;
            const auto res = stepper.try_step(rhs, x, t, dt);
            if (res == odeint::success) {
                if (std::abs(target - t) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(target)) ||
                    dt_tried == target - t_before)
                    t = target;
                if (!clipped) dt_suggest = dt;
                on_step(unpack(x, t));
            } else {
                dt_suggest = dt;
            }
        }
    }
}

template <class T>
T quintic(double s, double h, T f0, T d0, T dd0, T f1, T d1, T dd1) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    const double h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    const double h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    const double h3 = 0.5 * (s3 - 2.0 * s4 + s5);
    const double h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    const double h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    return f0 * h0 + d0 * (h * h1) + dd0 * (h * h * h2) + dd1 * (h * h * h3) + d1 * (h * h4) + f1 * h5;
}

}  // namespace

double OscillatorState::wronskian_residual() const {
    // deps eps* - c.c. = 2i Im(deps eps*)
    return 2.0 * std::abs((deps * std::conj(eps)).imag() - 1.0);
}

Trajectory::Trajectory(FrequencyProfile profile, std::vector<OscillatorState> samples,
                       std::vector<CrossingEvent> crossings)
    : profile_(std::move(profile)), samples_(std::move(samples)), crossings_(std::move(crossings)) {
    if (samples_.empty()) throw PreconditionError("trajectory needs at least one sample");
    adiabaticity_.reserve(samples_.size());
    for (const auto& s : samples_) {
        const double w = profile_.value(s.t);
        adiabaticity_.push_back(w == 0.0 ? std::numeric_limits<double>::infinity()
                                         : std::abs(profile_.derivative(s.t)) / (w * w));
        max_residual_ = std::max(max_residual_, s.wronskian_residual());
    }
}

OscillatorState Trajectory::state_at(double t) const {
    if (t < t_begin() || t > t_end()) {
        std::ostringstream os;
        os << "state_at: t=" << t << " outside trajectory range [" << t_begin() << ", " << t_end() << "]";
        throw DomainError(os.str());
    }
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                               [](const OscillatorState& s, double x) { return s.t < x; });
    if (it != samples_.end() && it->t == t) return *it;
    const OscillatorState& b = *it;
    const OscillatorState& a = *(it - 1);
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;

    const double wa = profile_.value(a.t), wb = profile_.value(b.t);
    const double dwa = profile_.derivative(a.t), dwb = profile_.derivative(b.t);
    const complex dda = -wa * wa * a.eps, ddb = -wb * wb * b.eps;
    const complex ddda = -2.0 * wa * dwa * a.eps - wa * wa * a.deps;
    const complex dddb = -2.0 * wb * dwb * b.eps - wb * wb * b.deps;

    OscillatorState out;
    out.t = t;
    out.eps = quintic(s, h, a.eps, a.deps, dda, b.eps, b.deps, ddb);
    out.deps = quintic(s, h, a.deps, dda, ddda, b.deps, ddb, dddb);
    // zeros are sample points, so |omega| has one sign per interval
    const double sg = profile_.value(a.t + 0.5 * h) < 0.0 ? -1.0 : 1.0;
    out.phi = quintic(s, h, a.phi, std::abs(wa), sg * dwa, b.phi, std::abs(wb), sg * dwb);
    out.phi_tilde = quintic(s, h, a.phi_tilde, wa, dwa, b.phi_tilde, wb, dwb);
    return out;
}

OscillatorState initial_state(const FrequencyProfile& profile, double t_i) {
    const double w = profile.value(t_i);
    if (!(w > 0.0)) throw PreconditionError("initial frequency omega(t_i) must be positive");
    OscillatorState s;
    s.t = t_i;
    s.eps = complex(1.0 / std::sqrt(w), 0.0);
    s.deps = complex(0.0, std::sqrt(w));
    s.phi_tilde = 0.0;
    s.phi = 0.0;
    for (const auto& z : profile.zeros()) {
        if (z.t > t_i) {
            s.phi = -phase_integral(profile, t_i, z.t, PhaseKind::Unsigned);
            break;
        }
    }
    return s;
}

Trajectory integrate_from(const FrequencyProfile& profile, const OscillatorState& start, double t_end,
                          const IntegrationOptions& options) {
    if (!(t_end > start.t)) throw PreconditionError("integrate requires t_f > t_i");
    std::vector<OscillatorState> samples{start};
    run_integration(profile, start, t_end, options, [&](const OscillatorState& s) { samples.push_back(s); });

    std::vector<CrossingEvent> crossings;
    double t0 = 0.0;
    for (const auto& z : profile.zeros()) {
        if (z.t <= start.t || z.t > t_end) continue;
        if (crossings.empty()) t0 = z.t;
        crossings.push_back({z.t, crossings.empty() ? 0.0 : phase_integral(profile, t0, z.t), z.kind});
    }
    return Trajectory(profile, std::move(samples), std::move(crossings));
}

Trajectory integrate(const FrequencyProfile& profile, double t_i, double t_f, const IntegrationOptions& options) {
    if (!(t_f > t_i)) throw PreconditionError("integrate requires t_f > t_i");
    return integrate_from(profile, initial_state(profile, t_i), t_f, options);
}

OscillatorState propagate_state(const FrequencyProfile& profile, const OscillatorState& start, double t_end,
                                const IntegrationOptions& options) {
    OscillatorState last = start;
    run_integration(profile, start, t_end, options, [&](const OscillatorState& s) { last = s; });
    return last;
}

OscillatorState state_at(const Trajectory& trajectory, double t) { return trajectory.state_at(t); }

double adiabaticity(const FrequencyProfile& profile, double t) {
    const double w = profile.value(t);
    if (w == 0.0) {
        std::ostringstream os;
        os << "adiabaticity is singular at the frequency zero t=" << t;
        throw SingularPointError(os.str());
    }
    return std::abs(profile.derivative(t)) / (w * w);
}

double adiabaticity(const Trajectory& trajectory, double t) {
    if (t < trajectory.t_begin() || t > trajectory.t_end())
        throw DomainError("adiabaticity: t outside trajectory range");
    return adiabaticity(trajectory.profile(), t);
}

}  // namespace larmor
