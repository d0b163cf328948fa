#include "larmor/products.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "larmor/spectra.hpp"

namespace larmor::products {
namespace {

nlohmann::json complex_json(complex z) {
    return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}, {"arg", std::arg(z)}};
}

nlohmann::json pair_json(const BogoliubovPair& p) {
    return {{"u_plus", complex_json(p.u_plus)},
            {"u_minus", complex_json(p.u_minus)},
            {"u_minus_sq", std::norm(p.u_minus)},
            {"identity_residual", p.identity_residual()}};
}

int jacobi_lobes(const SpectralDistribution& d) {
    int lobes = 0, last = 0;
    for (int s : d.jacobi_signs) {
        if (s == 0) continue;
        if (s != last) ++lobes;
        last = s;
    }
    return lobes;
}

std::string join(const std::string& dir, const std::string& file) {
    if (dir.empty()) return file;
    return dir.back() == '/' ? dir + file : dir + "/" + file;
}

}  // namespace

std::size_t write_trajectory(std::ostream& out, const Trajectory& trajectory, const io::Header& header) {
    io::CsvWriter csv(out, header,
                      {"t", "re_eps", "im_eps", "re_deps", "im_deps", "phi", "phi_tilde", "wronskian_residual",
                       "adiabaticity"});
    const auto& samples = trajectory.samples();
    const auto& mu = trajectory.adiabaticity_samples();
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (std::isinf(mu[i]) && trajectory.profile().value(s.t) == 0.0) {
            ++skipped;
            continue;
        }
        csv.row({s.t, s.eps.real(), s.eps.imag(), s.deps.real(), s.deps.imag(), s.phi, s.phi_tilde,
                 s.wronskian_residual(), mu[i]});
    }
    return skipped;
}

std::size_t write_observables(std::ostream& out, const Trajectory& trajectory, const InitialState& state,
                              std::size_t samples, const io::Header& header) {
    const auto* fock = std::get_if<FockLabel>(&state);
    const auto* gauss = std::get_if<InvariantStateParams>(&state);
    std::vector<std::string> cols{"t", "omega", "energy", "energy_over_hbar_abs_omega", "moment_over_mu_B"};
    if (fock) cols.push_back("sigma_M_over_mu_B_sq");
    cols.insert(cols.end(), {"w", "adiabaticity"});
    io::CsvWriter csv(out, header, cols);

    const auto& profile = trajectory.profile();
    const double wi = profile.value(trajectory.t_begin());
    const CovarianceState q0 = fock ? initial_covariance(*fock, wi) : initial_covariance(*gauss, wi);

    std::vector<double> times;
    if (samples == 0) {
        for (const auto& s : trajectory.samples()) times.push_back(s.t);
    } else {
        const double a = trajectory.t_begin(), b = trajectory.t_end();
        for (std::size_t j = 0; j < samples; ++j)
            times.push_back(samples == 1 ? a : (j + 1 == samples ? b : a + (b - a) * j / (samples - 1)));
    }
    std::size_t skipped = 0;
    for (double t : times) {
        const double w = profile.value(t);
        if (w == 0.0) {
            ++skipped;
            continue;
        }
        const auto s = trajectory.state_at(t);
        const double e2 = std::norm(s.eps);
        const double energy = energy_from_covariance(propagate(q0, s, wi), w);
        std::vector<double> row{t, w, energy, energy / (hbar * std::abs(w))};
        if (fock) {
            row.push_back(fock_moment_mean(*fock, w, e2) / mu_B);
            row.push_back(fock_moment_variance(*fock, w, e2) / (mu_B * mu_B));
        } else {
            row.push_back(moment_evolution(*gauss, s, w) / mu_B);
        }
        row.push_back(std::abs(w) * e2);
        row.push_back(std::abs(profile.derivative(t)) / (w * w));
        csv.row(row);
    }
    return skipped;
}

void write_distribution(std::ostream& out, const SpectralDistribution& dist, const io::Header& header) {
    io::Header h = header;
    const double u2 = dist.u_minus_abs * dist.u_minus_abs;
    h.meta.insert(h.meta.end(), {{"n", std::to_string(dist.initial.n_r)},
                                 {"m", std::to_string(dist.initial.m)},
                                 {"u_minus_sq", io::format_double(u2)},
                                 {"mean_q_closed_form", io::format_double(mean_q(dist.initial, u2))},
                                 {"tail_bound", io::format_double(dist.tail_bound)}});
    io::CsvWriter csv(out, h, {"q", "probability", "cumulative"});
    double cum = 0.0;
    for (std::size_t q = 0; q < dist.probabilities.size(); ++q) {
        cum += dist.probabilities[q];
        csv.row({static_cast<double>(q), dist.probabilities[q], cum});
    }
}

std::optional<nlohmann::json> analytic_coefficients(const FrequencyProfile& profile) {
    if (const auto* p = std::get_if<PowerLaw>(&profile.variant())) {
        auto j = pair_json(analytic_powerlaw(p->k));
        j["formula"] = "power_law";
        return j;
    }
    if (const auto* p = std::get_if<Tanh>(&profile.variant())) {
        nlohmann::json j = {{"formula", "tanh"},
                            {"u_minus_sq", analytic_tanh(p->omega_i, p->omega_f, p->kappa)},
                            {"adiabatic_regime", tanh_adiabatic_regime(p->omega_i, p->omega_f, p->kappa)}};
        if (p->omega_f == -p->omega_i && p->omega_i > 0.0)
            j["plane_wave"] = pair_json(analytic_tanh_symmetric(p->omega_i, p->kappa));
        return j;
    }
    return std::nullopt;
}

nlohmann::json coefficients_json(const Trajectory& trajectory, const Extraction& extraction, double t) {
    nlohmann::json j = pair_json(extraction.pair);
    j["t"] = t;
    j["error_estimate"] = extraction.error_estimate;
    j["adiabaticity"] = extraction.adiabaticity;
    j["mean_u_minus_sq"] = extraction.mean_u_minus_sq;
    j["max_wronskian_residual"] = trajectory.max_wronskian_residual();
    j["profile"] = trajectory.profile().type_name();
    nlohmann::json crossings = nlohmann::json::array();
    for (const auto& c : trajectory.crossings())
        crossings.push_back(
            {{"t", c.t}, {"Phi", c.Phi}, {"kind", c.kind == ZeroKind::SignChange ? "sign_change" : "tangency"}});
    j["crossings"] = crossings;
    if (std::holds_alternative<Tanh>(trajectory.profile().variant()))
        j["plane_wave"] = pair_json(plane_wave_pair(extraction.pair, trajectory, t));
    if (auto a = analytic_coefficients(trajectory.profile())) j["analytic"] = *a;
    return j;
}

std::vector<std::string> write_figure(const std::string& which, const std::string& dir, const io::Header& header) {
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& body) {
        const auto path = join(dir, name);
        io::write_text_file(path, body);
        written.push_back(path);
    };
    if (which == "fig1" || which == "fig2") {
        const double u2 = which == "fig1" ? 1.0 : 3.0;
        // left panel: |m| fixed, n varies; right panel: n fixed, |m| varies
        const std::vector<FockLabel> grid{{0, 10}, {5, 10}, {10, 10}, {20, 10}, {20, 0}, {20, 5}, {20, 20}};
        std::ostringstream summary;
        io::CsvWriter table(summary, header,
                            {"n", "m", "u_minus_sq", "row_sum", "tail_bound", "mean_q", "mean_q_closed_form",
                             "sigma_q", "jacobi_lobes"});
        for (const auto& label : grid) {
            const auto d = distribution(label, std::sqrt(u2));
            std::ostringstream body;
            write_distribution(body, d, header);
            emit(which + "_n" + std::to_string(label.n_r) + "_m" + std::to_string(label.m) + ".csv", body.str());
            double sum = 0.0;
            for (double p : d.probabilities) sum += p;
            const auto mom = distribution_moments(d);
            table.row({static_cast<double>(label.n_r), static_cast<double>(label.m), u2, sum, d.tail_bound, mom.mean,
                       mean_q(label, u2), std::sqrt(mom.variance), static_cast<double>(jacobi_lobes(d))});
        }
        emit(which + "_summary.csv", summary.str());
        return written;
    }
    if (which == "fig3") {
        const int ms[] = {0, 1, 2, 5, 10};
        for (double u2 : {1.0, 3.0}) {
            std::ostringstream body;
            io::Header h = header;
            h.meta.push_back({"u_minus_sq", io::format_double(u2)});
            io::CsvWriter csv(body, h, {"n", "p_m0", "p_m1", "p_m2", "p_m5", "p_m10"});
            for (int n = 0; n <= 40; ++n) {
                std::vector<double> row{static_cast<double>(n)};
                for (int m : ms) row.push_back(transition_probability(n, n, m, std::sqrt(u2)));
                csv.row(row);
            }
            emit(u2 == 1.0 ? "fig3_u2_1.csv" : "fig3_u2_3.csv", body.str());
        }
        return written;
    }
    throw PreconditionError("unknown figure '" + which + "' (expected fig1, fig2 or fig3)");
}

}  // namespace larmor::products
