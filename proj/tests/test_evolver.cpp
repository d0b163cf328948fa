#include <doctest.h>

#include <cmath>
#include <numbers>

#include "larmor/evolver.hpp"

using namespace larmor;
using doctest::Approx;
using std::numbers::pi;

namespace {

const complex I(0.0, 1.0);

// exact eps = omega^{-1/2} e^{i omega (t - t_i)} sampled on a uniform grid
Trajectory constant_grid(double omega, double h, int n) {
    std::vector<OscillatorState> s;
    for (int j = 0; j <= n; ++j) {
        OscillatorState x;
        x.t = j * h;
        x.eps = std::exp(I * omega * x.t) / std::sqrt(omega);
        x.deps = I * omega * x.eps;
        x.phi = omega * x.t;
        x.phi_tilde = omega * x.t;
        s.push_back(x);
    }
    return Trajectory(FrequencyProfile::constant(omega), s, {});
}

}  // namespace

TEST_CASE("initial state") {
    const auto s = initial_state(FrequencyProfile::constant(4.0), 0.0);
    CHECK(s.eps == complex(0.5, 0.0));
    CHECK(s.deps == complex(0.0, 2.0));
    CHECK(s.wronskian_residual() < 1e-15);

    const auto p = initial_state(FrequencyProfile::power_law(1.0, 1.0, 1), -1.0);
    CHECK(p.eps.real() == Approx(1.0));
    CHECK(p.deps.imag() == Approx(1.0));
    CHECK(p.phi == Approx(-0.5));
    CHECK(p.phi_tilde == 0.0);

    CHECK_THROWS_AS(initial_state(FrequencyProfile::tanh(-1.0, 1.0, 1.0), -5.0), PreconditionError);
}

TEST_CASE("constant frequency over one period") {
    const auto tr = integrate(FrequencyProfile::constant(1.0), 0.0, 2.0 * pi);
    CHECK(std::abs(tr.back().eps - 1.0) < 1e-10);
    CHECK(std::abs(tr.back().deps - I) < 1e-10);
    CHECK(tr.max_wronskian_residual() < 1e-10);
    CHECK(tr.back().phi == Approx(2.0 * pi));
}

TEST_CASE("constant frequency over a thousand periods") {
    const double w = 3.0, ti = -2.0;
    const auto tr = integrate(FrequencyProfile::constant(w), ti, ti + 2000.0 * pi / w);
    double worst = 0.0;
    for (const auto& s : tr.samples())
        worst = std::max(worst, std::abs(s.eps - std::exp(I * w * (s.t - ti)) / std::sqrt(w)));
    CHECK(worst < 1e-8);
}

TEST_CASE("wronskian certificate on a linear crossing") {
    const auto tr = integrate(FrequencyProfile::power_law(100.0, 1.0, 1), -1.0, 1.0);
    CHECK(tr.max_wronskian_residual() < 1e-9);
    REQUIRE(tr.crossings().size() == 1);
    CHECK(tr.crossings()[0].t == 0.0);
    CHECK(tr.crossings()[0].Phi == 0.0);
    for (std::size_t i = 1; i < tr.samples().size(); ++i) CHECK(tr.samples()[i].t > tr.samples()[i - 1].t);
}

TEST_CASE("crossings follow the profile zeros") {
    const auto a = FrequencyProfile::tanh(1.0, -1.0, 0.5);
    const auto b = FrequencyProfile::tanh(-1.0, 1.0, 0.5);
    const auto pw = FrequencyProfile::piecewise(
        {FrequencyProfile::segment(-40.0, 15.0, a), FrequencyProfile::segment(15.0, 70.0, b, 30.0)});
    const auto tr = integrate(pw, -40.0, 70.0);
    REQUIRE(tr.crossings().size() == 2);
    CHECK(tr.crossings()[0].t == Approx(0.0));
    CHECK(tr.crossings()[1].t == Approx(30.0));
    CHECK(tr.crossings()[1].Phi == Approx(phase_integral(pw, 0.0, 30.0)).epsilon(1e-10));
    // phi is measured from the first zero
    CHECK(std::abs(tr.state_at(0.0).phi) < 1e-9);
}

TEST_CASE("dense output") {
    const auto tr = integrate(FrequencyProfile::constant(1.0), 0.0, 20.0);
    const auto& s = tr.samples();
    const auto& mid = s[s.size() / 2];
    const auto same = tr.state_at(mid.t);
    CHECK(same.eps == mid.eps);
    CHECK(same.deps == mid.deps);
    const double tm = 0.5 * (s[10].t + s[11].t);
    CHECK(std::abs(tr.state_at(tm).eps - std::exp(I * tm)) < 1e-8);
    CHECK(std::abs(tr.state_at(tm).deps - I * std::exp(I * tm)) < 1e-8);
    CHECK(tr.state_at(0.0).eps == initial_state(FrequencyProfile::constant(1.0), 0.0).eps);
    CHECK_THROWS_AS(tr.state_at(25.0), DomainError);
}

TEST_CASE("dense output converges at sixth order") {
    // quintic Hermite: global error O(h^6), so halving h gains ~64
    auto err = [](double h) {
        const auto tr = constant_grid(1.0, h, static_cast<int>(std::round(4.0 / h)));
        double worst = 0.0;
        for (double t = 0.1 * h; t < 4.0; t += 0.31 * h)
            worst = std::max(worst, std::abs(tr.state_at(t).eps - std::exp(I * t)));
        return worst;
    };
    const double e1 = err(0.4), e2 = err(0.2);
    CHECK(e1 / e2 > 45.0);
    CHECK(e1 / e2 < 90.0);
}

TEST_CASE("adiabaticity") {
    CHECK(adiabaticity(FrequencyProfile::constant(2.0), 1.0) == 0.0);
    CHECK(adiabaticity(FrequencyProfile::power_law(50.0, 2.0, 1), -2.0) == Approx(1.0 / 100.0));
    CHECK(adiabaticity(FrequencyProfile::power_law(100.0, 1.0, 1), -0.1) == Approx(1.0));
    CHECK_THROWS_AS(adiabaticity(FrequencyProfile::power_law(100.0, 1.0, 1), 0.0), SingularPointError);
    const auto tr = integrate(FrequencyProfile::power_law(100.0, 1.0, 1), -1.0, 1.0);
    CHECK(adiabaticity(tr, 0.5) == Approx(1.0 / 25.0));
}

TEST_CASE("time reversal returns to the initial state") {
    const auto p = FrequencyProfile::tanh(1.0, -1.0, 0.5);
    IntegrationOptions opt;
    opt.tol = 1e-12;
    const auto tr = integrate(p, -20.0, 20.0, opt);
    const auto back = propagate_state(p, tr.back(), -20.0, opt);
    const auto& s0 = tr.front();
    CHECK(std::abs(back.eps - s0.eps) < 10 * opt.tol);
    CHECK(std::abs(back.deps - s0.deps) < 10 * opt.tol);
    CHECK(back.t == -20.0);
}

TEST_CASE("the flow map is linear") {
    const auto p = FrequencyProfile::power_law(40.0, 1.0, 3);
    OscillatorState a, b, c;
    a.t = b.t = c.t = -1.0;
    a.eps = 1.0;
    a.deps = 0.0;
    b.eps = 0.0;
    b.deps = 1.0;
    const complex alpha(0.3, -1.2), beta(2.0, 0.7);
    c.eps = alpha * a.eps + beta * b.eps;
    c.deps = alpha * a.deps + beta * b.deps;
    const auto fa = propagate_state(p, a, 1.0), fb = propagate_state(p, b, 1.0), fc = propagate_state(p, c, 1.0);
    CHECK(std::abs(fc.eps - (alpha * fa.eps + beta * fb.eps)) < 1e-8);
    CHECK(std::abs(fc.deps - (alpha * fa.deps + beta * fb.deps)) < 1e-8);
}

TEST_CASE("tolerance range is enforced") {
    IntegrationOptions opt;
    opt.tol = 1e-4;
    CHECK_THROWS_AS(integrate(FrequencyProfile::constant(1.0), 0.0, 1.0, opt), PreconditionError);
    CHECK_THROWS_AS(integrate(FrequencyProfile::constant(1.0), 1.0, 0.0), PreconditionError);
}
