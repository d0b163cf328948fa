// larmor-flip: scenario runner and figure generator.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "larmor/acceptance.hpp"
#include "larmor/scenario.hpp"

namespace sc = larmor::scenario;
namespace io = larmor::io;

namespace {

struct Common {
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool no_timestamp = false;
    std::vector<std::string> sets;
};

struct ProfileFlags {
    std::optional<std::string> config;
    std::optional<std::string> type;
    std::optional<double> wi, wf, kappa, omega0, tau, omega, ti, tf, at;
    std::optional<int> k;
};

struct StateFlags {
    std::optional<int> n, m;
    std::optional<double> g_plus, g_minus;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed) {
    cmd->add_option("--tol", c.tol, "Integrator tolerance")->check(CLI::Range(1e-14, 1e-6));
    if (with_seed) cmd->add_option("--seed", c.seed, "Seed for random phase schedules");
    cmd->add_option("--out", c.out, "Output directory");
    cmd->add_flag("--no-header-timestamp", c.no_timestamp, "Omit the generated-at header line");
}

void add_profile(CLI::App* cmd, ProfileFlags& p) {
    cmd->add_option("--config", p.config, "Scenario file supplying defaults")->check(CLI::ExistingFile);
    cmd->add_option("--profile", p.type, "power_law | tanh | constant");
    cmd->add_option("--wi", p.wi, "tanh initial frequency");
    cmd->add_option("--wf", p.wf, "tanh final frequency");
    cmd->add_option("--kappa", p.kappa, "tanh sharpness");
    cmd->add_option("--omega0", p.omega0, "power-law amplitude");
    cmd->add_option("--tau", p.tau, "power-law time scale");
    cmd->add_option("--k", p.k, "power-law exponent");
    cmd->add_option("--omega", p.omega, "constant frequency");
    cmd->add_option("--ti", p.ti, "start time");
    cmd->add_option("--tf", p.tf, "end time");
    cmd->add_option("--at", p.at, "extraction time (default t_f)");
}

void add_state(CLI::App* cmd, StateFlags& s) {
    cmd->add_option("--n", s.n, "radial quantum number")->check(CLI::NonNegativeNumber);
    cmd->add_option("--m", s.m, "angular momentum quantum number");
    cmd->add_option("--G-plus", s.g_plus, "invariant-state parameter G+ (>= 1)");
    cmd->add_option("--G-minus", s.g_minus, "invariant-state parameter G- (>= 1)");
}

template <class T>
void push(std::vector<sc::Override>& o, const char* key, const std::optional<T>& v) {
    if (!v) return;
    if constexpr (std::is_integral_v<T>)
        o.push_back({key, static_cast<std::int64_t>(*v)});
    else
        o.push_back({key, *v});
}

std::vector<sc::Override> overrides(const Common& c, const ProfileFlags* p, const StateFlags* s) {
    std::vector<sc::Override> o;
    for (const auto& a : c.sets) o.push_back(sc::parse_override(a));
    push(o, "tol", c.tol);
    if (c.seed) o.push_back({"sweep.seed", static_cast<std::int64_t>(*c.seed)});
    if (p) {
        push(o, "profile.type", p->type);
        push(o, "profile.omega_i", p->wi);
        push(o, "profile.omega_f", p->wf);
        push(o, "profile.kappa", p->kappa);
        push(o, "profile.omega0", p->omega0);
        push(o, "profile.tau", p->tau);
        push(o, "profile.k", p->k);
        push(o, "profile.omega", p->omega);
        push(o, "t_i", p->ti);
        push(o, "t_f", p->tf);
        push(o, "extract_at", p->at);
    }
    if (s) {
        push(o, "state.n_r", s->n);
        push(o, "state.m", s->m);
        push(o, "state.G_plus", s->g_plus);
        push(o, "state.G_minus", s->g_minus);
    }
    return o;
}

sc::Scenario scenario_from_flags(const ProfileFlags& p, std::vector<sc::Override> o, std::vector<std::string> outputs) {
    o.push_back({"outputs", std::move(outputs)});
    if (p.config) return sc::load(*p.config, o);
    // flags alone: fall back to the antisymmetric tanh crossing
    if (!p.type) o.insert(o.begin(), sc::Override{"profile.type", std::string("tanh")});
    return sc::parse("", o, "command line");
}

// Runs one product and either copies it to stdout or leaves it in --out.
int run_single(const sc::Scenario& s, const Common& c, const std::string& file) {
    namespace fs = std::filesystem;
    sc::RunOptions ro;
    ro.header_timestamp = !c.no_timestamp;
    const bool to_stdout = c.out.empty();
    fs::path tmp;
    if (to_stdout) {
        tmp = fs::temp_directory_path() / ("larmor-flip-" + s.hash + "-" + std::to_string(::getpid()));
        ro.out_dir = tmp.string();
    } else {
        ro.out_dir = c.out;
    }
    const auto written = sc::run(s, ro, std::cerr);
    if (to_stdout) {
        std::ifstream f(tmp / file);
        std::cout << f.rdbuf();
        fs::remove_all(tmp);
    } else {
        for (const auto& w : written) std::cerr << "wrote " << w << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Charged particle in a sign-changing magnetic field: coefficients, distributions, observables"};
    app.set_version_flag("--version", std::string(io::version));
    app.require_subcommand(1);

    Common run_c, coef_c, dist_c, obs_c, fig_c;
    ProfileFlags coef_p, obs_p;
    StateFlags obs_s;

    std::string config;
    auto* run = app.add_subcommand("run", "Run every product listed in a scenario file");
    run->add_option("config", config, "Scenario file (TOML)")->required()->check(CLI::ExistingFile);
    add_common(run, run_c, true);
    run->add_option("--set", run_c.sets, "Override a config key, e.g. --set profile.kappa=0.1");

    auto* coef = app.add_subcommand("coefficients", "Extract u+ and u- and print them as JSON");
    add_common(coef, coef_c, false);
    add_profile(coef, coef_p);

    int dn = 0, dm = 0;
    double du2 = 1.0, dtail = 1e-12;
    auto* dist = app.add_subcommand("distribution", "Fock transition distribution |C_nq|^2 as CSV");
    dist->add_option("--n", dn, "initial radial quantum number")->check(CLI::NonNegativeNumber);
    dist->add_option("--m", dm, "angular momentum quantum number");
    dist->add_option("--u2", du2, "|u-|^2")->check(CLI::NonNegativeNumber);
    dist->add_option("--tail-tol", dtail, "truncate once the remaining mass is below this")->check(CLI::PositiveNumber);
    add_common(dist, dist_c, false);

    std::size_t samples = 0;
    auto* obs = app.add_subcommand("observables", "Energy and magnetic-moment time series as CSV");
    add_common(obs, obs_c, false);
    add_profile(obs, obs_p);
    add_state(obs, obs_s);
    obs->add_option("--samples", samples, "uniform sample count (0 = integrator steps)");

    std::string which = "all";
    auto* fig = app.add_subcommand("figures", "Write the CSV data behind the transition-probability figures");
    fig->add_option("which", which, "fig1 | fig2 | fig3 | all")->check(CLI::IsMember({"fig1", "fig2", "fig3", "all"}));
    add_common(fig, fig_c, false);

    double self_tol = 1e-12;
    auto* self = app.add_subcommand("selftest", "Run the acceptance suite and print PASS/FAIL per criterion");
    self->add_option("--tol", self_tol, "Integrator tolerance for every scenario")->check(CLI::Range(1e-14, 1e-3));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto s = sc::load(config, overrides(run_c, nullptr, nullptr));
            sc::RunOptions ro;
            ro.out_dir = run_c.out.empty() ? "." : run_c.out;
            ro.header_timestamp = !run_c.no_timestamp;
            for (const auto& w : sc::run(s, ro, std::cerr)) std::cout << w << '\n';
            return 0;
        }
        if (*coef) {
            auto s = scenario_from_flags(coef_p, overrides(coef_c, &coef_p, nullptr), {"coefficients"});
            return run_single(s, coef_c, "coefficients.json");
        }
        if (*obs) {
            auto o = overrides(obs_c, &obs_p, &obs_s);
            o.push_back({"observables.samples", static_cast<std::int64_t>(samples)});
            auto s = scenario_from_flags(obs_p, o, {"observables"});
            return run_single(s, obs_c, "observables.csv");
        }
        if (*dist) {
            std::ostringstream key;
            key << "distribution n=" << dn << " m=" << dm << " u2=" << io::format_double(du2)
                << " tail_tol=" << io::format_double(dtail);
            io::Header h{io::fnv1a64(key.str()), !dist_c.no_timestamp, {}};
            larmor::DistributionOptions opt;
            opt.tail_tol = dtail;
            const auto d = larmor::distribution({dn, dm}, std::sqrt(du2), opt);
            std::ostringstream body;
            larmor::products::write_distribution(body, d, h);
            if (dist_c.out.empty()) {
                std::cout << body.str();
            } else {
                std::filesystem::create_directories(dist_c.out);
                const auto p = (std::filesystem::path(dist_c.out) / "distribution.csv").string();
                io::write_text_file(p, body.str());
                std::cerr << "wrote " << p << '\n';
            }
            return 0;
        }
        if (*fig) {
            const std::string dir = fig_c.out.empty() ? "." : fig_c.out;
            std::filesystem::create_directories(dir);
            const std::vector<std::string> all{"fig1", "fig2", "fig3"};
            for (const auto& f : which == "all" ? all : std::vector<std::string>{which}) {
                io::Header h{io::fnv1a64("figures " + f), !fig_c.no_timestamp, {{"figure", f}}};
                for (const auto& w : larmor::products::write_figure(f, dir, h)) std::cout << w << '\n';
            }
            return 0;
        }
        if (*self) {
            larmor::acceptance::Options opt;
            opt.tol = self_tol;
            const auto report = larmor::acceptance::run(opt);
            for (const auto& r : report.criteria) std::cout << larmor::acceptance::format_line(r) << '\n';
            std::cout << larmor::acceptance::format_runtime_line(report) << '\n';
            return report.all_pass() && report.within_budget() ? 0 : 1;
        }
    } catch (const larmor::ConfigError& e) {
        std::cerr << "larmor-flip: config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "larmor-flip: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
