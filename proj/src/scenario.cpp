#include "larmor/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

#include <toml.hpp>

namespace larmor::scenario {
namespace {

int line_of(const toml::node& n) { return static_cast<int>(n.source().begin.line); }

std::string join_key(const std::string& prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

void check_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& prefix) {
    for (auto&& [k, v] : t)
        if (!allowed.count(std::string(k.str())))
            throw ConfigError("unknown key", line_of(v), join_key(prefix, k.str()));
}

double get_number(const toml::table& t, std::string_view key, const std::string& prefix, double def) {
    const toml::node* n = t.get(key);
    if (!n) return def;
    if (auto v = n->value<double>()) {
        if (!std::isfinite(*v)) throw ConfigError("value must be finite", line_of(*n), join_key(prefix, key));
        return *v;
    }
    throw ConfigError("expected a number", line_of(*n), join_key(prefix, key));
}

std::optional<double> get_optional_number(const toml::table& t, std::string_view key, const std::string& prefix) {
    if (!t.get(key)) return std::nullopt;
    return get_number(t, key, prefix, 0.0);
}

std::int64_t get_integer(const toml::table& t, std::string_view key, const std::string& prefix, std::int64_t def) {
    const toml::node* n = t.get(key);
    if (!n) return def;
    if (auto v = n->value_exact<std::int64_t>()) return *v;
    // allow 3.0 from command-line overrides
    if (auto d = n->value_exact<double>(); d && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
    throw ConfigError("expected an integer", line_of(*n), join_key(prefix, key));
}

std::string get_string(const toml::table& t, std::string_view key, const std::string& prefix, std::string def) {
    const toml::node* n = t.get(key);
    if (!n) return def;
    if (auto v = n->value<std::string>()) return *v;
    throw ConfigError("expected a string", line_of(*n), join_key(prefix, key));
}

std::vector<double> get_number_list(const toml::table& t, std::string_view key, const std::string& prefix) {
    const toml::node* n = t.get(key);
    if (!n) return {};
    const auto* arr = n->as_array();
    if (!arr) throw ConfigError("expected an array of numbers", line_of(*n), join_key(prefix, key));
    std::vector<double> out;
    for (const auto& e : *arr) {
        auto v = e.value<double>();
        if (!v || !std::isfinite(*v))
            throw ConfigError("expected an array of finite numbers", line_of(e), join_key(prefix, key));
        out.push_back(*v);
    }
    return out;
}

const toml::table* get_table(const toml::table& t, std::string_view key, const std::string& prefix) {
    const toml::node* n = t.get(key);
    if (!n) return nullptr;
    if (const auto* tab = n->as_table()) return tab;
    throw ConfigError("expected a table", line_of(*n), join_key(prefix, key));
}

ProfileSpec parse_profile(const toml::table& t, const std::string& prefix, bool is_segment) {
    ProfileSpec p;
    const toml::node* type_node = t.get("type");
    if (!type_node) throw ConfigError("missing profile type", line_of(t), join_key(prefix, "type"));
    p.type = get_string(t, "type", prefix, "");
    std::set<std::string> allowed{"type"};
    if (is_segment) allowed.insert({"start", "end", "offset"});
    if (p.type == "power_law") {
        allowed.insert({"omega0", "tau", "k"});
        p.omega0 = get_number(t, "omega0", prefix, 1.0);
        p.tau = get_number(t, "tau", prefix, 1.0);
        p.k = static_cast<int>(get_integer(t, "k", prefix, 1));
    } else if (p.type == "tanh") {
        allowed.insert({"omega_i", "omega_f", "kappa"});
        p.omega_i = get_number(t, "omega_i", prefix, 1.0);
        p.omega_f = get_number(t, "omega_f", prefix, -1.0);
        p.kappa = get_number(t, "kappa", prefix, 0.05);
    } else if (p.type == "constant") {
        allowed.insert("omega");
        p.omega = get_number(t, "omega", prefix, 1.0);
    } else if (p.type == "piecewise") {
        allowed.insert("segments");
        const toml::node* segs = t.get("segments");
        const toml::array* arr = segs ? segs->as_array() : nullptr;
        if (!arr || arr->empty())
            throw ConfigError("piecewise profile needs a non-empty [[segments]] array", segs ? line_of(*segs) : line_of(t),
                              join_key(prefix, "segments"));
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string sp = join_key(prefix, "segments[" + std::to_string(i) + "]");
            const auto* st = (*arr)[i].as_table();
            if (!st) throw ConfigError("segment must be a table", line_of((*arr)[i]), sp);
            ProfileSpec child = parse_profile(*st, sp, true);
            if (!st->get("start") || !st->get("end"))
                throw ConfigError("segment needs start and end", line_of(*st), sp);
            child.start = get_number(*st, "start", sp, 0.0);
            child.end = get_number(*st, "end", sp, 0.0);
            child.offset = get_number(*st, "offset", sp, 0.0);
            p.segments.push_back(std::move(child));
        }
    } else if (p.type == "sampled") {
        allowed.insert("knots");
        const toml::node* kn = t.get("knots");
        const toml::array* arr = kn ? kn->as_array() : nullptr;
        if (!arr) throw ConfigError("sampled profile needs knots = [[t, w], ...]", line_of(t), join_key(prefix, "knots"));
        for (const auto& e : *arr) {
            const auto* pair = e.as_array();
            std::optional<double> a, b;
            if (pair && pair->size() == 2) {
                a = (*pair)[0].value<double>();
                b = (*pair)[1].value<double>();
            }
            if (!a || !b) throw ConfigError("each knot must be [t, omega]", line_of(e), join_key(prefix, "knots"));
            p.knots.emplace_back(*a, *b);
        }
    } else {
        throw ConfigError("unknown profile type '" + p.type + "' (power_law, tanh, constant, piecewise, sampled)",
                          line_of(*type_node), join_key(prefix, "type"));
    }
    check_keys(t, allowed, prefix);
    return p;
}

void apply_override(toml::table& root, const Override& o) {
    toml::table* t = &root;
    std::string_view key = o.key;
    for (std::size_t dot; (dot = key.find('.')) != std::string_view::npos;) {
        const std::string head(key.substr(0, dot));
        if (!t->contains(head)) t->insert(head, toml::table{});
        t = (*t)[head].as_table();
        if (!t) throw ConfigError("override descends into a non-table", 0, o.key);
        key.remove_prefix(dot + 1);
    }
    std::visit(
        [&](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::vector<std::string>>) {
                toml::array arr;
                for (const auto& e : v) arr.push_back(e);
                t->insert_or_assign(std::string(key), std::move(arr));
            } else {
                t->insert_or_assign(std::string(key), v);
            }
        },
        o.value);
}

std::string source_hint(const std::string& source, const ConfigError& e) {
    return source + ": " + e.what();
}

}  // namespace

Override parse_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value", 0, assignment);
    Override o{assignment.substr(0, eq), std::string(assignment.substr(eq + 1))};
    const std::string v = assignment.substr(eq + 1);
    const char* b = v.data();
    const char* e = v.data() + v.size();
    std::int64_t i = 0;
    if (auto r = std::from_chars(b, e, i); r.ec == std::errc{} && r.ptr == e) {
        o.value = i;
        return o;
    }
    double d = 0.0;
    if (auto r = std::from_chars(b, e, d); r.ec == std::errc{} && r.ptr == e) o.value = d;
    return o;
}

FrequencyProfile ProfileSpec::build() const {
    try {
        if (type == "power_law") return FrequencyProfile::power_law(omega0, tau, k);
        if (type == "tanh") return FrequencyProfile::tanh(omega_i, omega_f, kappa);
        if (type == "constant") return FrequencyProfile::constant(omega);
        if (type == "piecewise") {
            std::vector<Segment> segs;
            for (const auto& s : segments) segs.push_back(FrequencyProfile::segment(s.start, s.end, s.build(), s.offset));
            return FrequencyProfile::piecewise(std::move(segs));
        }
        if (type == "sampled") {
            std::vector<double> t, w;
            for (const auto& [a, b] : knots) {
                t.push_back(a);
                w.push_back(b);
            }
            return FrequencyProfile::sampled(std::move(t), std::move(w));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid profile: ") + e.what(), 0, "profile");
    }
    throw ConfigError("unknown profile type '" + type + "'", 0, "profile.type");
}

std::pair<double, double> ProfileSpec::default_window() const {
    if (type == "power_law") return {-tau, tau};
    if (type == "tanh") return {-30.0 / kappa, 30.0 / kappa};
    if (type == "constant") return {0.0, 20.0 * std::numbers::pi / std::max(std::abs(omega), 1e-300)};
    const Interval d = build().domain();
    return {d.lo, d.hi};
}

Scenario parse(const std::string& text, const std::vector<Override>& overrides, const std::string& source_name) {
    toml::table root;
    try {
        root = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string(e.description()), static_cast<int>(e.source().begin.line));
    }
    for (const auto& o : overrides) apply_override(root, o);

    check_keys(root, {"t_i", "t_f", "tol", "extract_at", "outputs", "profile", "state", "distribution", "observables",
                      "sweep"},
               "");
    Scenario sc;
    const toml::table* prof = get_table(root, "profile", "");
    if (!prof) throw ConfigError("missing [profile] table", 0, "profile");
    sc.profile = parse_profile(*prof, "profile", false);
    const auto window = sc.profile.default_window();
    sc.t_i = get_number(root, "t_i", "", window.first);
    sc.t_f = get_number(root, "t_f", "", window.second);
    sc.tol = get_number(root, "tol", "", 1e-12);
    sc.extract_at = get_optional_number(root, "extract_at", "");
    if (!(sc.t_f > sc.t_i)) throw ConfigError("t_f must exceed t_i", root.get("t_f") ? line_of(*root.get("t_f")) : 0, "t_f");
    if (!(sc.tol >= 1e-14 && sc.tol <= 1e-6))
        throw ConfigError("tol must lie in [1e-14, 1e-6]", root.get("tol") ? line_of(*root.get("tol")) : 0, "tol");

    if (const toml::node* out = root.get("outputs")) {
        const auto* arr = out->as_array();
        if (!arr) throw ConfigError("expected an array of strings", line_of(*out), "outputs");
        const std::set<std::string> known{"trajectory", "coefficients", "distribution", "observables", "sweep"};
        for (const auto& e : *arr) {
            auto s = e.value<std::string>();
            if (!s || !known.count(*s))
                throw ConfigError("outputs entries must be trajectory, coefficients, distribution, observables or sweep",
                                  line_of(e), "outputs");
            sc.outputs.push_back(*s);
        }
    } else {
        sc.outputs = {"coefficients"};
    }

    if (const toml::table* st = get_table(root, "state", "")) {
        check_keys(*st, {"n_r", "m", "G_plus", "G_minus"}, "state");
        const bool gauss = st->contains("G_plus") || st->contains("G_minus");
        const bool fock = st->contains("n_r") || st->contains("m");
        if (gauss && fock) throw ConfigError("give either n_r/m or G_plus/G_minus", line_of(*st), "state");
        if (gauss) {
            InvariantStateParams g{get_number(*st, "G_plus", "state", 1.0), get_number(*st, "G_minus", "state", 1.0)};
            if (!(g.G_plus >= 1.0 && g.G_minus >= 1.0)) throw ConfigError("G_plus and G_minus must be >= 1", line_of(*st), "state");
            sc.initial_state = g;
        } else {
            FockLabel f{static_cast<int>(get_integer(*st, "n_r", "state", 0)), static_cast<int>(get_integer(*st, "m", "state", 0))};
            if (f.n_r < 0) throw ConfigError("n_r must be non-negative", line_of(*st->get("n_r")), "state.n_r");
            sc.initial_state = f;
        }
    }
    if (const toml::table* d = get_table(root, "distribution", "")) {
        check_keys(*d, {"tail_tol"}, "distribution");
        sc.tail_tol = get_number(*d, "tail_tol", "distribution", 1e-12);
    }
    if (const toml::table* o = get_table(root, "observables", "")) {
        check_keys(*o, {"samples"}, "observables");
        const auto n = get_integer(*o, "samples", "observables", 0);
        if (n < 0) throw ConfigError("samples must be >= 0", line_of(*o->get("samples")), "observables.samples");
        sc.observable_samples = static_cast<std::size_t>(n);
    }
    if (const toml::table* s = get_table(root, "sweep", "")) {
        check_keys(*s, {"omega0_tau", "phi", "random_phases", "seed", "threads"}, "sweep");
        sc.sweep.omega0_tau = get_number_list(*s, "omega0_tau", "sweep");
        sc.sweep.phi = get_number_list(*s, "phi", "sweep");
        sc.sweep.random_phases = static_cast<std::size_t>(std::max<std::int64_t>(0, get_integer(*s, "random_phases", "sweep", 0)));
        sc.sweep.seed = static_cast<std::uint64_t>(get_integer(*s, "seed", "sweep", 0));
        sc.sweep.threads = static_cast<unsigned>(std::max<std::int64_t>(0, get_integer(*s, "threads", "sweep", 0)));
        if (!sc.sweep.omega0_tau.empty() && sc.profile.type != "power_law")
            throw ConfigError("omega0_tau sweeps need a power_law profile", line_of(*s->get("omega0_tau")), "sweep.omega0_tau");
        if (!sc.sweep.phi.empty() && sc.sweep.random_phases > 0)
            throw ConfigError("give either phi or random_phases", line_of(*s), "sweep");
    }

    for (const auto& o : sc.outputs) {
        if (o == "sweep" && sc.sweep.empty()) throw ConfigError("output 'sweep' needs a [sweep] grid", 0, "sweep");
        if (o == "distribution" && !std::holds_alternative<FockLabel>(sc.initial_state))
            throw ConfigError("output 'distribution' needs a Fock state (n_r, m)", 0, "state");
    }
    if (sc.extract_at && (*sc.extract_at <= sc.t_i || *sc.extract_at > sc.t_f))
        throw ConfigError("extract_at must lie in (t_i, t_f]", line_of(*root.get("extract_at")), "extract_at");
    // Fail early on impossible profiles.
    sc.profile.build();

    std::ostringstream os;
    os << root;
    sc.canonical = os.str();
    sc.hash = io::fnv1a64(sc.canonical);
    return sc;
}

Scenario load(const std::string& path, const std::vector<Override>& overrides) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse(ss.str(), overrides, path);
    } catch (const ConfigError& e) {
        throw ConfigError(source_hint(path, e));
    }
}

namespace {

struct SweepRow {
    double omega0_tau = 0.0;
    Extraction extraction{};
    double max_wronskian = 0.0;
    std::exception_ptr error;
};

// Fans the omega0 tau grid out over worker threads; each worker owns its slots.
std::vector<SweepRow> run_omega0_sweep(const Scenario& sc) {
    std::vector<SweepRow> rows(sc.sweep.omega0_tau.size());
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n = std::min<unsigned>(sc.sweep.threads ? sc.sweep.threads : hw, static_cast<unsigned>(rows.size()));
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
            auto& r = rows[i];
            r.omega0_tau = sc.sweep.omega0_tau[i];
            try {
                ProfileSpec spec = sc.profile;
                spec.omega0 = r.omega0_tau / spec.tau;
                IntegrationOptions opt;
                opt.tol = sc.tol;
                const auto tr = integrate(spec.build(), sc.t_i, sc.t_f, opt);
                r.extraction = extract(tr, sc.extraction_time());
                r.max_wronskian = tr.max_wronskian_residual();
            } catch (...) {
                r.error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < n; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& r : rows)
        if (r.error) std::rethrow_exception(r.error);
    return rows;
}

std::string path_in(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

}  // namespace

std::vector<std::string> run(const Scenario& sc, const RunOptions& options, std::ostream& log) {
    std::filesystem::create_directories(options.out_dir);
    io::Header header{sc.hash, options.header_timestamp, {}};
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& body) {
        const auto p = path_in(options.out_dir, name);
        io::write_text_file(p, body);
        written.push_back(p);
    };
    auto wants = [&](const char* o) { return std::find(sc.outputs.begin(), sc.outputs.end(), o) != sc.outputs.end(); };

    const bool needs_base = wants("trajectory") || wants("coefficients") || wants("distribution") ||
                            wants("observables") || !sc.sweep.phi.empty() || sc.sweep.random_phases > 0;
    std::optional<Trajectory> traj;
    std::optional<Extraction> ex;
    if (needs_base) {
        IntegrationOptions opt;
        opt.tol = sc.tol;
        traj.emplace(integrate(sc.profile.build(), sc.t_i, sc.t_f, opt));
    }
    auto extraction = [&]() -> const Extraction& {
        if (!ex) ex = extract(*traj, sc.extraction_time());
        return *ex;
    };

    if (wants("trajectory")) {
        std::ostringstream body;
        const auto skipped = products::write_trajectory(body, *traj, header);
        if (skipped) log << "warning: trajectory: skipped " << skipped << " row(s) at exact frequency zeros\n";
        emit("trajectory.csv", body.str());
    }
    if (wants("coefficients")) {
        const auto j = io::finalize_json(products::coefficients_json(*traj, extraction(), sc.extraction_time()), header);
        emit("coefficients.json", j.dump(2) + "\n");
    }
    if (wants("distribution")) {
        DistributionOptions dopt;
        dopt.tail_tol = sc.tail_tol;
        const auto d = distribution(std::get<FockLabel>(sc.initial_state), std::abs(extraction().pair.u_minus), dopt);
        std::ostringstream body;
        products::write_distribution(body, d, header);
        emit("distribution.csv", body.str());
    }
    if (wants("observables")) {
        std::ostringstream body;
        const auto skipped = products::write_observables(body, *traj, sc.initial_state, sc.observable_samples, header);
        if (skipped) log << "warning: observables: skipped " << skipped << " row(s) at exact frequency zeros\n";
        emit("observables.csv", body.str());
    }
    if (wants("sweep")) {
        if (!sc.sweep.omega0_tau.empty()) {
            const auto rows = run_omega0_sweep(sc);
            const double exact = std::norm(analytic_powerlaw(sc.profile.k).u_minus);
            std::ostringstream body;
            io::Header h = header;
            h.meta.push_back({"extract_at", io::format_double(sc.extraction_time())});
            io::CsvWriter csv(body, h,
                              {"omega0_tau", "u_minus_sq", "mean_u_minus_sq", "analytic_u_minus_sq", "abs_error",
                               "error_estimate", "identity_residual", "max_wronskian_residual"});
            for (const auto& r : rows) {
                const double u2 = std::norm(r.extraction.pair.u_minus);
                csv.row({r.omega0_tau, u2, r.extraction.mean_u_minus_sq, exact, std::abs(u2 - exact),
                         r.extraction.error_estimate, r.extraction.pair.identity_residual(), r.max_wronskian});
            }
            emit("sweep.csv", body.str());
        }
        if (!sc.sweep.phi.empty() || sc.sweep.random_phases > 0) {
            const auto schedule = !sc.sweep.phi.empty() ? sc.sweep.phi
                                                        : random_phase_schedule(sc.sweep.random_phases, sc.sweep.seed);
            const auto chain = sweep_compose(extraction().pair, schedule.size(), schedule);
            std::ostringstream body;
            io::Header h = header;
            h.meta.push_back({"seed", std::to_string(sc.sweep.seed)});
            io::CsvWriter csv(body, h,
                              {"crossing", "Phi", "u_plus_sq", "u_minus_sq", "energy_gain", "relative_identity_residual"});
            for (std::size_t k = 0; k < chain.size(); ++k) {
                const auto& p = chain[k];
                csv.row({static_cast<double>(k), schedule[k], std::norm(p.u_plus), std::norm(p.u_minus),
                         std::norm(p.u_plus) + std::norm(p.u_minus), p.relative_identity_residual()});
            }
            emit("phases.csv", body.str());
        }
    }
    return written;
}

}  // namespace larmor::scenario
