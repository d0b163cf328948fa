#include "larmor/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "larmor/errors.hpp"

namespace larmor {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void out_of_domain(const char* what, double t, const Interval& d) {
    std::ostringstream os;
    os << what << ": t=" << t << " outside [" << d.lo << ", " << d.hi << "]";
    throw DomainError(os.str());
}

// Logistic s = 1/(1+e^{-x}) and s(1-s), both without overflow.
double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logistic_slope(double x) {
    const double e = std::exp(-std::abs(x));
    return e / ((1.0 + e) * (1.0 + e));
}

// Scaled argument -t/tau for a power law, with a few ulps of slack at the ends.
double power_law_base(const PowerLaw& p, double t) {
    double base = -t / p.tau;
    if (std::abs(base) > 1.0) {
        if (std::abs(base) - 1.0 > 8.0 * std::numeric_limits<double>::epsilon())
            out_of_domain("power-law profile", t, {-p.tau, p.tau});
        base = std::copysign(1.0, base);
    }
    return base;
}

std::vector<double> natural_spline_second(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    // Tridiagonal system for interior second derivatives (Thomas algorithm).
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1];
        const double h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        if (i > 1) {
            const double w = h0 / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
        if (i == 1) break;
    }
    return m;
}

std::size_t spline_interval(const Sampled& s, double t) {
    auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
    std::size_t j = static_cast<std::size_t>(it - s.t.begin());
    if (j == 0) j = 1;
    if (j >= s.t.size()) j = s.t.size() - 1;
    return j - 1;
}

double spline_value(const Sampled& s, double t) {
    const std::size_t j = spline_interval(s, t);
    const double h = s.t[j + 1] - s.t[j];
    const double a = (s.t[j + 1] - t) / h;
    const double b = 1.0 - a;
    return a * s.omega[j] + b * s.omega[j + 1] +
           ((a * a * a - a) * s.second[j] + (b * b * b - b) * s.second[j + 1]) * h * h / 6.0;
}

double spline_derivative(const Sampled& s, double t) {
    const std::size_t j = spline_interval(s, t);
    const double h = s.t[j + 1] - s.t[j];
    const double a = (s.t[j + 1] - t) / h;
    const double b = 1.0 - a;
    return (s.omega[j + 1] - s.omega[j]) / h - (3.0 * a * a - 1.0) / 6.0 * h * s.second[j] +
           (3.0 * b * b - 1.0) / 6.0 * h * s.second[j + 1];
}

const Segment& find_segment(const Piecewise& p, double t) {
    const auto& segs = p.segments;
    if (t < segs.front().start || t > segs.back().end)
        out_of_domain("piecewise profile", t, {segs.front().start, segs.back().end});
    auto it = std::upper_bound(segs.begin(), segs.end(), t,
                               [](double x, const Segment& s) { return x < s.start; });
    if (it == segs.begin()) return segs.front();
    return *(it - 1);
}

// Sign-change and tangency zeros of f on [lo, hi], found by sampling and refinement.
std::vector<FrequencyZero> scan_zeros(const FrequencyProfile& f, double lo, double hi, int samples,
                                      double scale) {
    std::vector<FrequencyZero> out;
    const double thresh = 1e-12 * scale;
    std::vector<double> ts(samples + 1), ws(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        ts[i] = (i == samples) ? hi : lo + (hi - lo) * i / samples;
        ws[i] = f.value(ts[i]);
    }
    auto bisect = [&](double a, double b, double fa) {
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = f.value(m);
            if (fm == 0.0 || (std::abs(fm) < thresh && b - a < 1e-14 * (1.0 + std::abs(m)))) return m;
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
            if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(m))) break;
        }
        return 0.5 * (a + b);
    };
    for (int i = 0; i < samples; ++i) {
        const double a = ws[i], b = ws[i + 1];
        if (a == 0.0) {
            const double prev = i > 0 ? ws[i - 1] : 0.0;
            if (i > 0 && prev != 0.0 && b != 0.0)
                out.push_back({ts[i], (prev < 0) != (b < 0) ? ZeroKind::SignChange : ZeroKind::Tangency});
            continue;
        }
        if (b != 0.0 && (a < 0) != (b < 0)) {
            out.push_back({bisect(ts[i], ts[i + 1], a), ZeroKind::SignChange});
            continue;
        }
        // Tangency candidate: interior local minimum of |omega| on the sample grid.
        if (i > 0 && b != 0.0 && std::abs(a) <= std::abs(ws[i - 1]) && std::abs(a) <= std::abs(b) &&
            (ws[i - 1] < 0) == (a < 0)) {
            double l = ts[i - 1], r = ts[i + 1];
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            for (int it = 0; it < 200 && r - l > 1e-15 * (1.0 + std::abs(l)); ++it) {
                const double x1 = r - g * (r - l), x2 = l + g * (r - l);
                if (std::abs(f.value(x1)) < std::abs(f.value(x2)))
                    r = x2;
                else
                    l = x1;
            }
            const double tm = 0.5 * (l + r);
            if (std::abs(f.value(tm)) <= thresh) out.push_back({tm, ZeroKind::Tangency});
        }
    }
    return out;
}

void sort_and_dedupe(std::vector<FrequencyZero>& zs, double span) {
    std::sort(zs.begin(), zs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    std::vector<FrequencyZero> out;
    for (const auto& z : zs) {
        if (!out.empty() && std::abs(z.t - out.back().t) <= 1e-10 * std::max(1.0, span)) continue;
        out.push_back(z);
    }
    zs = std::move(out);
}

}  // namespace

FrequencyProfile FrequencyProfile::power_law(double omega0, double tau, int k) {
    if (!(omega0 > 0.0)) throw PreconditionError("power-law omega0 must be positive");
    if (!(tau > 0.0)) throw PreconditionError("power-law tau must be positive");
    if (k < 0) throw PreconditionError("power-law exponent k must be non-negative");
    return FrequencyProfile(PowerLaw{omega0, tau, k});
}

FrequencyProfile FrequencyProfile::tanh(double omega_i, double omega_f, double kappa) {
    if (!(kappa > 0.0)) throw PreconditionError("tanh profile kappa must be positive");
    return FrequencyProfile(Tanh{omega_i, omega_f, kappa});
}

FrequencyProfile FrequencyProfile::constant(double omega) {
    if (!std::isfinite(omega)) throw PreconditionError("constant frequency must be finite");
    return FrequencyProfile(Constant{omega});
}

Segment FrequencyProfile::segment(double start, double end, FrequencyProfile profile, double offset) {
    return Segment{start, end, offset, std::make_shared<const FrequencyProfile>(std::move(profile))};
}

FrequencyProfile FrequencyProfile::piecewise(std::vector<Segment> segments) {
    if (segments.empty()) throw PreconditionError("piecewise profile needs at least one segment");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (!s.profile) throw PreconditionError("piecewise segment without a profile");
        if (!(s.end > s.start)) throw PreconditionError("piecewise segment has empty interval");
        const Interval d = s.profile->domain();
        if (!d.contains(s.start - s.offset) || !d.contains(s.end - s.offset))
            throw PreconditionError("piecewise segment extends beyond its profile's domain");
        if (i > 0) {
            const auto& prev = segments[i - 1];
            if (prev.end != s.start) throw PreconditionError("piecewise segments are not contiguous");
            const double left = prev.profile->value(prev.end - prev.offset);
            const double right = s.profile->value(s.start - s.offset);
            const double scale = std::max({std::abs(left), std::abs(right), 1e-300});
            if (std::abs(left - right) > 1e-12 * scale) {
                std::ostringstream os;
                os << "piecewise profile discontinuous at t=" << s.start << " (" << left << " vs " << right
                   << ")";
                throw PreconditionError(os.str());
            }
        }
    }
    return FrequencyProfile(Piecewise{std::move(segments)});
}

FrequencyProfile FrequencyProfile::sampled(std::vector<double> t, std::vector<double> omega) {
    if (t.size() != omega.size()) throw PreconditionError("sampled profile: knot arrays differ in length");
    if (t.size() < 2) throw PreconditionError("sampled profile needs at least two knots");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw PreconditionError("sampled profile knots must be strictly increasing");
    auto second = natural_spline_second(t, omega);
    return FrequencyProfile(Sampled{std::move(t), std::move(omega), std::move(second)});
}

Interval FrequencyProfile::domain() const {
    return std::visit(overloaded{
                          [](const PowerLaw& p) { return Interval{-p.tau, p.tau}; },
                          [](const Tanh&) { return Interval{-kInf, kInf}; },
                          [](const Constant&) { return Interval{-kInf, kInf}; },
                          [](const Piecewise& p) {
                              return Interval{p.segments.front().start, p.segments.back().end};
                          },
                          [](const Sampled& s) { return Interval{s.t.front(), s.t.back()}; },
                      },
                      v_);
}

double FrequencyProfile::value(double t) const {
    return std::visit(overloaded{
                          [t](const PowerLaw& p) {
                              const double base = power_law_base(p, t);
                              return p.k == 0 ? p.omega0 : p.omega0 * std::pow(base, p.k);
                          },
                          [t](const Tanh& p) {
                              return p.omega_i + (p.omega_f - p.omega_i) * logistic(p.kappa * t);
                          },
                          [](const Constant& c) { return c.omega; },
                          [t](const Piecewise& p) {
                              const Segment& s = find_segment(p, t);
                              return s.profile->value(t - s.offset);
                          },
                          [this, t](const Sampled& s) {
                              if (t < s.t.front() || t > s.t.back())
                                  out_of_domain("sampled profile", t, domain());
                              return spline_value(s, t);
                          },
                      },
                      v_);
}

double FrequencyProfile::derivative(double t) const {
    return std::visit(overloaded{
                          [t](const PowerLaw& p) {
                              const double base = power_law_base(p, t);
                              if (p.k == 0) return 0.0;
                              return -p.k * p.omega0 / p.tau * std::pow(base, p.k - 1);
                          },
                          [t](const Tanh& p) {
                              return (p.omega_f - p.omega_i) * p.kappa * logistic_slope(p.kappa * t);
                          },
                          [](const Constant&) { return 0.0; },
                          [t](const Piecewise& p) {
                              const Segment& s = find_segment(p, t);
                              return s.profile->derivative(t - s.offset);
                          },
                          [this, t](const Sampled& s) {
                              if (t < s.t.front() || t > s.t.back())
                                  out_of_domain("sampled profile", t, domain());
                              return spline_derivative(s, t);
                          },
                      },
                      v_);
}

double FrequencyProfile::max_abs() const {
    return std::visit(overloaded{
                          [](const PowerLaw& p) { return p.omega0; },
                          [](const Tanh& p) { return std::max(std::abs(p.omega_i), std::abs(p.omega_f)); },
                          [](const Constant& c) { return std::abs(c.omega); },
                          [this](const Piecewise& p) {
                              double m = 0.0;
                              for (const auto& s : p.segments)
                                  for (int i = 0; i <= 256; ++i)
                                      m = std::max(m, std::abs(value(s.start + (s.end - s.start) * i / 256.0)));
                              return m;
                          },
                          [](const Sampled& s) {
                              double m = 0.0;
                              for (std::size_t j = 0; j + 1 < s.t.size(); ++j)
                                  for (int i = 0; i <= 8; ++i)
                                      m = std::max(m, std::abs(spline_value(
                                                          s, s.t[j] + (s.t[j + 1] - s.t[j]) * i / 8.0)));
                              return m;
                          },
                      },
                      v_);
}

std::vector<FrequencyZero> FrequencyProfile::zeros() const {
    return std::visit(
        overloaded{
            [](const PowerLaw& p) {
                std::vector<FrequencyZero> z;
                if (p.k >= 1) z.push_back({0.0, p.k % 2 == 1 ? ZeroKind::SignChange : ZeroKind::Tangency});
                return z;
            },
            [](const Tanh& p) {
                std::vector<FrequencyZero> z;
                if (p.omega_i * p.omega_f < 0.0)
                    z.push_back({std::log(-p.omega_i / p.omega_f) / p.kappa, ZeroKind::SignChange});
                return z;
            },
            [](const Constant&) { return std::vector<FrequencyZero>{}; },
            [](const Piecewise& p) {
                std::vector<FrequencyZero> z;
                for (std::size_t i = 0; i < p.segments.size(); ++i) {
                    const auto& s = p.segments[i];
                    const bool last = i + 1 == p.segments.size();
                    for (auto c : s.profile->zeros()) {
                        const double t = c.t + s.offset;
                        if (t >= s.start && (t < s.end || (last && t <= s.end))) z.push_back({t, c.kind});
                    }
                }
                const double span = p.segments.back().end - p.segments.front().start;
                sort_and_dedupe(z, span);
                return z;
            },
            [this](const Sampled& s) {
                std::vector<FrequencyZero> z;
                const double scale = max_abs();
                for (std::size_t j = 0; j + 1 < s.t.size(); ++j) {
                    auto part = scan_zeros(*this, s.t[j], s.t[j + 1], 16, scale);
                    z.insert(z.end(), part.begin(), part.end());
                }
                // Knots that are exact zeros sit on interval boundaries; classify them directly.
                for (std::size_t j = 1; j + 1 < s.t.size(); ++j) {
                    if (s.omega[j] != 0.0) continue;
                    const double l = s.omega[j - 1], r = s.omega[j + 1];
                    z.push_back({s.t[j], (l < 0) != (r < 0) ? ZeroKind::SignChange : ZeroKind::Tangency});
                }
                sort_and_dedupe(z, s.t.back() - s.t.front());
                return z;
            },
        },
        v_);
}

std::vector<double> FrequencyProfile::breakpoints() const {
    std::vector<double> out;
    if (const auto* p = std::get_if<Piecewise>(&v_)) {
        for (std::size_t i = 1; i < p->segments.size(); ++i) out.push_back(p->segments[i].start);
        for (const auto& s : p->segments)
            for (double b : s.profile->breakpoints())
                if (b + s.offset > s.start && b + s.offset < s.end) out.push_back(b + s.offset);
        std::sort(out.begin(), out.end());
    } else if (const auto* s = std::get_if<Sampled>(&v_)) {
        out.assign(s->t.begin() + 1, s->t.end() - 1);
    }
    return out;
}

std::string FrequencyProfile::type_name() const {
    return std::visit(overloaded{
                          [](const PowerLaw&) { return std::string("powerlaw"); },
                          [](const Tanh&) { return std::string("tanh"); },
                          [](const Constant&) { return std::string("constant"); },
                          [](const Piecewise&) { return std::string("piecewise"); },
                          [](const Sampled&) { return std::string("sampled"); },
                      },
                      v_);
}

double eval(const FrequencyProfile& profile, double t) { return profile.value(t); }

double eval_derivative(const FrequencyProfile& profile, double t) { return profile.derivative(t); }

std::vector<FrequencyZero> zeros(const FrequencyProfile& profile) { return profile.zeros(); }

double phase_integral(const FrequencyProfile& profile, double a, double b, PhaseKind kind) {
    if (a == b) return 0.0;
    if (b < a) return -phase_integral(profile, b, a, kind);
    const Interval d = profile.domain();
    if (!d.contains(a)) out_of_domain("phase_integral", a, d);
    if (!d.contains(b)) out_of_domain("phase_integral", b, d);

    std::vector<double> cuts{a, b};
    for (const auto& z : profile.zeros())
        if (z.t > a && z.t < b) cuts.push_back(z.t);
    for (double t : profile.breakpoints())
        if (t > a && t < b) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double t) {
        const double w = profile.value(t);
        return kind == PhaseKind::Unsigned ? std::abs(w) : w;
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // Long stretches are cut into pieces of bounded phase so each GK panel sees a smooth,
        // well-resolved integrand.
        const double lo = cuts[i], hi = cuts[i + 1];
        const double w_scale = std::max(std::abs(profile.value(lo)), std::abs(profile.value(hi)));
        const int pieces = std::clamp(static_cast<int>(w_scale * (hi - lo) / 64.0), 1, 4096);
        for (int j = 0; j < pieces; ++j) {
            const double x0 = lo + (hi - lo) * j / pieces;
            const double x1 = (j + 1 == pieces) ? hi : lo + (hi - lo) * (j + 1) / pieces;
            total += GK::integrate(integrand, x0, x1, 20, 1e-14);
        }
    }
    return total;
}

}  // namespace larmor
