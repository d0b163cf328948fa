#include "larmor/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "larmor/observables.hpp"
#include "larmor/specfun.hpp"
#include "larmor/spectra.hpp"

namespace larmor::acceptance {
namespace {

using clock_type = std::chrono::steady_clock;
constexpr double pi = std::numbers::pi;

// Diagnostics shared between criteria: every integration and every extraction is logged.
struct Ledger {
    double max_wronskian = 0.0;
    std::size_t trajectories = 0;
    double max_identity = 0.0;
    std::size_t extractions = 0;

    Trajectory integrate(const FrequencyProfile& p, double t_i, double t_f, double tol) {
        IntegrationOptions opt;
        opt.tol = tol;
        auto tr = larmor::integrate(p, t_i, t_f, opt);
        max_wronskian = std::max(max_wronskian, tr.max_wronskian_residual());
        ++trajectories;
        return tr;
    }
    // Extractions that feed criterion 3.
    Extraction extract_logged(const Trajectory& tr, double t, const ExtractOptions& o = {}) {
        auto e = larmor::extract(tr, t, o);
        max_identity = std::max(max_identity, e.pair.identity_residual());
        ++extractions;
        return e;
    }
};

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome powerlaw_convergence(Ledger& L, double tol) {
    std::ostringstream os;
    bool ok = true;
    const double grid[] = {50.0, 100.0, 200.0, 400.0};
    for (int k = 1; k <= 3; ++k) {
        const double exact = std::norm(analytic_powerlaw(k).u_minus);
        std::vector<double> err_avg;
        double raw400 = 0.0;
        for (double wt : grid) {
            const auto tr = L.integrate(FrequencyProfile::power_law(wt, 1.0, k), -1.0, 1.0, tol);
            const auto raw = L.extract_logged(tr, 0.9);
            err_avg.push_back(std::abs(raw.mean_u_minus_sq - exact));
            if (wt == 400.0) raw400 = std::norm(raw.pair.u_minus);
        }
        const double window[] = {0.0, 0.02, 0.1, 0.2};
        const bool value_ok = std::abs(raw400 - exact) <= window[k];
        ok = ok && value_ok;
        os << "k=" << k << " |u-|^2(400)=" << fmt("%.4f", raw400) << " vs " << fmt("%.4f", exact);
        if (k == 1) {
            os << " avg err";
            for (std::size_t j = 0; j < err_avg.size(); ++j) {
                os << ' ' << fmt("%.2e", err_avg[j]);
                if (j > 0) {
                    const double r = err_avg[j] / err_avg[j - 1];
                    if (!(r >= 0.25 && r <= 1.0)) ok = false;
                }
            }
            if (std::abs(err_avg.back()) > 0.02) ok = false;
        }
        os << (k < 3 ? "; " : "");
    }
    return {ok, os.str()};
}

Outcome tanh_profiles(Ledger& L, double tol) {
    std::ostringstream os;
    // antisymmetric: w0~ = 20
    const double kappa = 0.05, w0 = 1.0, span = 30.0 / kappa;
    const auto tr = L.integrate(FrequencyProfile::tanh(w0, -w0, kappa), -span, span, tol);
    const auto ex = L.extract_logged(tr, span);
    const auto pw = plane_wave_pair(ex.pair, tr, span);
    const double expected = -4.0 * (w0 / kappa) * std::numbers::ln2;
    const double dphase = std::remainder(std::arg(pw.u_plus) - expected, 2.0 * pi);
    const double um = std::abs(ex.pair.u_minus);
    const bool sym_ok = std::abs(um - 1.0) <= 0.01 && std::abs(dphase) <= 0.05;
    os << "|u-|=" << fmt("%.5f", um) << " arg u+ off by " << fmt("%.4f", dphase) << " rad";

    // same-sign: w_i = 2 w_f, w_f~ = 5
    const double k2 = 0.2, span2 = 30.0 / k2;
    const auto tr2 = L.integrate(FrequencyProfile::tanh(2.0, 1.0, k2), -span2, span2, tol);
    const auto ex2 = L.extract_logged(tr2, span2);
    const double u2 = std::norm(ex2.pair.u_minus);
    const double predicted = analytic_tanh(2.0, 1.0, k2);
    const bool same_ok = u2 <= 1e-8 && predicted <= 1e-8;
    os << "; w_i=2w_f: |u-|^2=" << fmt("%.2e", u2) << " (e^{-4pi w_f~}=" << fmt("%.2e", predicted) << ")";
    return {sym_ok && same_ok, os.str()};
}

// Greedy schedule that undoes every second crossing.
std::vector<double> cancelling_schedule(const BogoliubovPair& u, std::size_t n) {
    std::vector<double> phis{0.0};
    BogoliubovPair total = u;
    for (std::size_t k = 1; k < n; ++k) {
        double phi;
        if (k % 2 == 1) {
            const complex target = -total.u_minus * std::conj(u.u_plus) / (total.u_plus * u.u_minus);
            phi = 0.5 * std::arg(target);
        } else {
            phi = 0.0;
        }
        phi += pi * std::ceil((phis.back() + 1.0 - phi) / pi);
        phis.push_back(phi);
        total = compose({{total, 0.0}, {u, phi}});
    }
    return phis;
}

Outcome identity(Ledger& L) {
    std::ostringstream os;
    const bool extractions_ok = L.max_identity < 1e-6 && L.extractions > 0;
    os << "extractions: max " << fmt("%.2e", L.max_identity) << " over " << L.extractions;

    const auto u = analytic_powerlaw(1);
    const auto random_chain = sweep_compose(u, 100, random_phase_schedule(100, 20240601));
    double rel = 0.0;
    for (const auto& p : random_chain) rel = std::max(rel, p.relative_identity_residual());
    const auto bounded = sweep_compose(u, 100, cancelling_schedule(u, 100));
    double absolute = 0.0;
    for (const auto& p : bounded) absolute = std::max(absolute, p.identity_residual());
    os << "; random chain relative " << fmt("%.2e", rel) << " (|U+|^2=" << fmt("%.1e", std::norm(random_chain.back().u_plus))
       << "); cancelling chain absolute " << fmt("%.2e", absolute);
    return {extractions_ok && rel < 1e-12 && absolute < 1e-12, os.str()};
}

struct DoublePassage {
    FrequencyProfile profile;
    double gap;
};
// w: 1 -> -1 near t=0 and back to 1 near t=gap; the junction sits at gap/2.
FrequencyProfile double_tanh(double kappa, double gap, double span) {
    const auto down = FrequencyProfile::tanh(1.0, -1.0, kappa);
    const auto up = FrequencyProfile::tanh(-1.0, 1.0, kappa);
    return FrequencyProfile::piecewise({FrequencyProfile::segment(-span, 0.5 * gap, down),
                                       FrequencyProfile::segment(0.5 * gap, gap + span, up, gap)});
}

DoublePassage cancelling_passage(double kappa, double span, double target_phi) {
    auto f = [&](double gap) {
        return phase_integral(double_tanh(kappa, gap, span), 0.0, gap, PhaseKind::Unsigned) - target_phi;
    };
    double lo = 2.0 * span, hi = lo;
    while (f(hi) < 0.0) hi += 64.0;
    // Run to the last ulp: a phase error d leaves |U-| ~ 2 sqrt(2) d.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    const double gap = 0.5 * (lo + hi);
    return {double_tanh(kappa, gap, span), gap};
}

Outcome double_passage(Ledger& L, double tol) {
    const double kappa = 0.05, span = 30.0 / kappa;
    const auto single = L.integrate(FrequencyProfile::tanh(1.0, -1.0, kappa), -span, span, tol);
    const auto first = L.extract_logged(single, span);
    const double phi1 = cancellation_phase(first.pair, 2.0 * span);
    const auto recurrence = compose({{first.pair, 0.0}, {first.pair, phi1}});

    const auto dp = cancelling_passage(kappa, span, phi1);
    const auto tr = L.integrate(dp.profile, -span, dp.gap + span, tol);
    const auto direct = L.extract_logged(tr, dp.gap + span);
    const double um = std::abs(direct.pair.u_minus);
    std::ostringstream os;
    os << "recurrence |U-|=" << fmt("%.2e", std::abs(recurrence.u_minus)) << "; direct |u-|=" << fmt("%.2e", um)
       << " vs 2*estimate " << fmt("%.2e", 2.0 * direct.error_estimate) << " (Phi1=" << fmt("%.6f", phi1)
       << ", trajectory Phi1=" << fmt("%.6f", tr.crossings().at(1).Phi) << ")";
    return {std::abs(recurrence.u_minus) < 1e-12 && um < 2.0 * direct.error_estimate, os.str()};
}

Outcome distributions() {
    double worst_norm = 0.0, worst_mean = 0.0, worst_var = 0.0;
    bool symmetric = true, blind = true;
    for (double u2 : {1.0, 3.0}) {
        const double a = std::sqrt(u2);
        for (int n = 0; n <= 30; ++n)
            for (int m = -30; m <= 30; ++m) {
                const auto d = distribution({n, m}, a);
                double s = d.tail_bound;
                for (double p : d.probabilities) s += p;
                worst_norm = std::max(worst_norm, std::abs(s - 1.0));
                const auto mom = distribution_moments(d);
                worst_mean = std::max(worst_mean, std::abs(mom.mean - mean_q({n, m}, u2)));
            }
        for (int n = 0; n <= 40; ++n)
            for (int q = 0; q <= 40; ++q)
                for (int m = 0; m <= 30; ++m) {
                    const double p = transition_probability(n, q, m, a);
                    symmetric = symmetric && p == transition_probability(q, n, m, a);
                    blind = blind && p == transition_probability(n, q, -m, a);
                }
        const BogoliubovPair pair{{std::sqrt(1.0 + u2), 0.0}, {0.0, a}};
        for (int m = -30; m <= 30; ++m)
            for (double w : {1.0, -1.0}) {
                const auto e = distribution_energy_moments(distribution({0, m}, a), w);
                const double expected = energy_variance_ground(m, pair, w);
                worst_var = std::max(worst_var, std::abs(e.variance - expected) / expected);
            }
    }
    std::ostringstream os;
    os << "norm " << fmt("%.1e", worst_norm) << ", <q> " << fmt("%.1e", worst_mean) << ", var(rel) "
       << fmt("%.1e", worst_var) << ", symmetry " << (symmetric ? "exact" : "broken") << ", sign of m "
       << (blind ? "exact" : "broken");
    return {worst_norm <= 1e-9 && worst_mean <= 1e-8 && worst_var <= 1e-8 && symmetric && blind, os.str()};
}

Outcome tripling(Ledger& L, double tol) {
    const double wt = 400.0;
    const auto p = FrequencyProfile::power_law(wt, 1.0, 1);
    const auto tr = L.integrate(p, -1.0, 1.0, tol);
    const double t = 0.9, w = p.value(t);
    const auto q = propagate(initial_covariance(FockLabel{0, 0}, wt), tr.state_at(t), wt);
    const double ratio = energy_from_covariance(q, w) / (hbar * std::abs(w));
    return {std::abs(ratio - 3.0) <= 0.05, "<H>/(hbar|w|) = " + fmt("%.5f", ratio) + " at t=0.9 tau, w0 tau=400"};
}

Outcome cross_module(Ledger& L, double tol) {
    const double kappa = 0.05, span = 30.0 / kappa;
    const auto p = FrequencyProfile::tanh(1.0, -1.0, kappa);
    const auto tr = L.integrate(p, -span, span, tol);
    const auto ex = L.extract_logged(tr, span);
    const double wi = p.value(-span), wf = p.value(span);
    std::mt19937_64 gen(7);
    double worst = 0.0;
    for (int j = 0; j < 20; ++j) {
        const FockLabel label{static_cast<int>(gen() % 31), static_cast<int>(gen() % 61) - 30};
        const double spectral =
            distribution_energy_moments(distribution(label, std::abs(ex.pair.u_minus)), wf).mean;
        const double cov = energy_from_covariance(propagate(initial_covariance(label, wi), tr.back(), wi), wf);
        worst = std::max(worst, std::abs(spectral - cov) / std::abs(cov));
    }
    return {worst <= 1e-6, "worst relative gap " + fmt("%.2e", worst) + " over 20 (n,m) at mu=" +
                               fmt("%.1e", ex.adiabaticity)};
}

Outcome appendix_integrals() {
    using boost::math::quadrature::gauss_kronrod;
    double worst = 0.0;
    for (int j = 1; j <= 2; ++j)
        for (int n = 0; n <= 20; ++n)
            for (int a = 0; a <= 20; ++a) {
                auto f = [&](double x) {
                    const double l = specfun::laguerre(n, a, x);
                    return std::exp((a + j) * std::log(x) - x) * l * l;
                };
                // The integrand lives below x ~ 4n + 2a + 60; the rest is < e^{-300} relative.
                const double top = 4.0 * n + 2.0 * a + 300.0;
                double sum = 0.0;
                for (double lo = 0.0; lo < top; lo += 8.0)
                    sum += gauss_kronrod<double, 61>::integrate(f, lo, std::min(lo + 8.0, top), 12, 1e-14);
                const double closed = specfun::laguerre_square_integral(j, n, a);
                worst = std::max(worst, std::abs(sum - closed) / closed);
            }
    return {worst <= 1e-8, "worst relative gap " + fmt("%.2e", worst) + " over j=1,2, n,a<=20"};
}

Outcome invariant_asymptotics(Ledger& L, double tol) {
    struct Case {
        FrequencyProfile profile;
        double span;
        const char* name;
    };
    const Case cases[] = {{FrequencyProfile::tanh(2.0, 1.0, 0.2), 150.0, "|u-|^2~0"},
                          {FrequencyProfile::tanh(1.0, -1.0, 0.05), 600.0, "|u-|^2~1"}};
    const InvariantStateParams states[] = {{1.0, 1.0}, {3.0, 1.0}, {5.0, 9.0}};
    double worst_amp = 0.0, worst_avg = 0.0;
    std::ostringstream os;
    for (const auto& c : cases) {
        const auto tr = L.integrate(c.profile, -c.span, c.span, tol);
        const auto ex = L.extract_logged(tr, c.span);
        const double wf = c.profile.value(c.span);
        const double t0 = c.span - 60.0;
        for (const auto& g : states) {
            const auto m = measure_moment_oscillation(tr, g, t0, 10);
            const auto pred = invariant_state_asymptotics(g, ex.pair, wf);
            const double scale = std::max(std::abs(pred.moment_amplitude), 0.5 * (g.G_plus + g.G_minus));
            worst_amp = std::max(worst_amp, std::abs(m.amplitude - pred.moment_amplitude) / scale);
            worst_avg = std::max(worst_avg, std::abs(m.average - pred.moment_average) / std::abs(pred.moment_average));
        }
        os << c.name << " (|u-|^2=" << fmt("%.4f", std::norm(ex.pair.u_minus)) << ") ";
    }
    os << "worst amplitude gap " << fmt("%.2e", worst_amp) << ", worst average gap " << fmt("%.2e", worst_avg);
    return {worst_amp <= 0.02 && worst_avg <= 0.02, os.str()};
}

}  // namespace

bool Report::all_pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
}

Report run(const Options& options) {
    Report report;
    Ledger ledger;
    const auto start = clock_type::now();
    auto record = [&](int id, const char* name, auto&& body) {
        const auto t0 = clock_type::now();
        CriterionResult r{id, name, false, {}, 0.0};
        try {
            const Outcome o = body();
            r.pass = o.pass;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
        report.criteria.push_back(r);
    };
    const double tol = options.tol;
    record(1, "power-law coefficient convergence", [&] { return powerlaw_convergence(ledger, tol); });
    record(2, "tanh profile coefficients", [&] { return tanh_profiles(ledger, tol); });
    record(3, "bogoliubov identity", [&] { return identity(ledger); });
    record(5, "double-passage cancellation", [&] { return double_passage(ledger, tol); });
    record(6, "distribution suite", [&] { return distributions(); });
    record(7, "ground-state tripling", [&] { return tripling(ledger, tol); });
    record(8, "spectral vs covariance energy", [&] { return cross_module(ledger, tol); });
    record(9, "laguerre square integrals", [&] { return appendix_integrals(); });
    record(10, "invariant-state asymptotics", [&] { return invariant_asymptotics(ledger, tol); });
    // Wronskian criterion covers every integration above.
    record(4, "wronskian conservation", [&] {
        return Outcome{ledger.trajectories > 0 && ledger.max_wronskian < 1e-9,
                       "max residual " + fmt("%.2e", ledger.max_wronskian) + " over " +
                           std::to_string(ledger.trajectories) + " integrations at tol=" + fmt("%.0e", tol)};
    });
    std::sort(report.criteria.begin(), report.criteria.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    report.seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    return report;
}

std::string format_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s  %2d  %-36s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
    return std::string(head) + " " + r.detail + " [" + fmt("%.2f", r.seconds) + " s]";
}

std::string format_runtime_line(const Report& report) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s  runtime %.2f s (budget %.0f s)", report.within_budget() ? "PASS" : "FAIL",
                  report.seconds, report.budget_seconds);
    return buf;
}

}  // namespace larmor::acceptance
