#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "larmor/scenario.hpp"

using namespace larmor;
namespace fs = std::filesystem;
using doctest::Approx;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("larmor_test_" + name);
    fs::remove_all(p);
    return p;
}

std::vector<std::vector<double>> read_csv(const std::string& text, std::vector<std::string>* header = nullptr) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool columns = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!columns) {
            columns = true;
            if (header) {
                std::istringstream ls(line);
                for (std::string c; std::getline(ls, c, ',');) header->push_back(c);
            }
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) row.push_back(std::stod(c));
        rows.push_back(row);
    }
    return rows;
}

const char* tanh_config = R"(
tol = 1e-12
outputs = ["coefficients", "trajectory", "observables", "distribution"]

[profile]
type = "tanh"
omega_i = 1.0
omega_f = -1.0
kappa = 0.5

[state]
n_r = 1
m = 2

[observables]
samples = 50
)";

}  // namespace

TEST_CASE("hashing") {
    CHECK(io::fnv1a64("") == "cbf29ce484222325");
    CHECK(io::fnv1a64("a") == "af63dc4c8601ec8c");
    CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("parse defaults and canonical form") {
    const auto s = scenario::parse(tanh_config);
    CHECK(s.profile.type == "tanh");
    CHECK(s.t_i == Approx(-60.0));
    CHECK(s.t_f == Approx(60.0));
    CHECK(s.extraction_time() == s.t_f);
    CHECK(std::get<FockLabel>(s.initial_state).m == 2);
    CHECK(s.observable_samples == 50);
    CHECK(s.hash.size() == 16);
    // whitespace and comments do not change the effective configuration
    const auto again = scenario::parse(std::string("# comment\n") + tanh_config);
    CHECK(again.hash == s.hash);
    const auto other = scenario::parse(tanh_config, {{"profile.kappa", 0.25}});
    CHECK(other.profile.kappa == 0.25);
    CHECK(other.hash != s.hash);
}

TEST_CASE("command-line style overrides") {
    const auto o = scenario::parse_override("sweep.seed=17");
    CHECK(o.key == "sweep.seed");
    CHECK(std::get<std::int64_t>(o.value) == 17);
    CHECK(std::get<double>(scenario::parse_override("tol=1e-10").value) == 1e-10);
    CHECK(std::get<std::string>(scenario::parse_override("profile.type=constant").value) == "constant");
    CHECK_THROWS_AS(scenario::parse_override("novalue"), ConfigError);
    const auto s = scenario::parse(tanh_config, {scenario::parse_override("state.n_r=4"), {"t_f", 40.0}});
    CHECK(std::get<FockLabel>(s.initial_state).n_r == 4);
    CHECK(s.t_f == 40.0);
}

TEST_CASE("diagnostics carry line and key") {
    try {
        scenario::parse("tol = 1e-12\n[profile]\ntype = \"tanh\"\nkapa = 0.1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
        CHECK(e.key() == "profile.kapa");
    }
    try {
        scenario::parse("[profile]\ntype = \"tanh\"\n\nkappa = \"fast\"\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
        CHECK(e.key() == "profile.kappa");
    }
    try {
        scenario::parse("[profile\ntype = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 1);
    }
    try {
        scenario::parse("[profile]\ntype = \"wobble\"\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(e.key() == "profile.type");
    }
    CHECK_THROWS_AS(scenario::parse("tol = 1e-12\n"), ConfigError);
    CHECK_THROWS_AS(scenario::parse("tol = 1e-3\n[profile]\ntype = \"constant\"\n"), ConfigError);
    CHECK_THROWS_AS(scenario::parse("outputs = [\"distribution\"]\n[profile]\ntype = \"constant\"\n[state]\nG_plus = 2.0\n"),
                    ConfigError);
    CHECK_THROWS_AS(scenario::parse("outputs = [\"sweep\"]\n[profile]\ntype = \"constant\"\n"), ConfigError);
    CHECK_THROWS_AS(scenario::parse("[profile]\ntype = \"tanh\"\n[sweep]\nomega0_tau = [1.0]\n"), ConfigError);
    CHECK_THROWS_AS(scenario::parse("[profile]\ntype = \"tanh\"\nkappa = -1.0\n"), ConfigError);
    CHECK_THROWS_AS(scenario::load("/nonexistent/scenario.toml"), ConfigError);
}

TEST_CASE("piecewise and sampled profiles parse") {
    const auto s = scenario::parse(R"(
[profile]
type = "piecewise"
[[profile.segments]]
start = -40.0
end = 15.0
type = "tanh"
omega_i = 1.0
omega_f = -1.0
kappa = 0.5
[[profile.segments]]
start = 15.0
end = 70.0
offset = 30.0
type = "tanh"
omega_i = -1.0
omega_f = 1.0
kappa = 0.5
)");
    CHECK(s.t_i == -40.0);
    CHECK(s.t_f == 70.0);
    CHECK(s.profile.build().zeros().size() == 2);
    const auto k = scenario::parse("[profile]\ntype = \"sampled\"\nknots = [[0.0, 1.0], [1.0, 0.5], [2.0, -0.5]]\n");
    CHECK(k.profile.knots.size() == 3);
    CHECK(k.profile.build().value(2.0) == Approx(-0.5));
    CHECK_THROWS_AS(scenario::parse("[profile]\ntype = \"sampled\"\nknots = [[0.0], [1.0, 0.5]]\n"), ConfigError);
}

TEST_CASE("run writes headed, deterministic outputs") {
    const auto s = scenario::parse(tanh_config);
    const auto a = scratch("a"), b = scratch("b");
    std::ostringstream log;
    scenario::RunOptions ro;
    ro.header_timestamp = false;
    ro.out_dir = a.string();
    const auto written = scenario::run(s, ro, log);
    CHECK(written.size() == 4);
    ro.out_dir = b.string();
    scenario::run(s, ro, log);
    for (const char* f : {"coefficients.json", "trajectory.csv", "observables.csv", "distribution.csv"}) {
        const auto x = slurp(a / f);
        CHECK(x == slurp(b / f));
        CHECK(x.find(s.hash) != std::string::npos);
        CHECK(x.find(io::version) != std::string::npos);
        CHECK(x.find("generated") == std::string::npos);
    }
    std::vector<std::string> cols;
    const auto obs = read_csv(slurp(a / "observables.csv"), &cols);
    CHECK(obs.size() == 50);
    CHECK(cols.size() == 8);
    CHECK(obs.front()[3] == Approx(1 + 2 * 1 + 2 - 2));
    // the distribution uses the extracted |u-|; its sum is 1
    double sum = 0.0;
    for (const auto& r : read_csv(slurp(a / "distribution.csv"))) sum += r[1];
    CHECK(sum == Approx(1.0).epsilon(1e-9));

    ro.header_timestamp = true;
    ro.out_dir = a.string();
    scenario::run(s, ro, log);
    CHECK(slurp(a / "trajectory.csv").find("# generated ") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("sweeps do not depend on the thread count") {
    const std::string cfg = R"(
outputs = ["sweep"]
extract_at = 0.9
[profile]
type = "power_law"
omega0 = 50.0
k = 1
[sweep]
omega0_tau = [50.0, 100.0, 200.0, 400.0, 80.0]
)";
    std::ostringstream log;
    scenario::RunOptions ro;
    ro.header_timestamp = false;
    std::string first;
    for (int threads : {1, 3, 8}) {
        const auto s = scenario::parse(cfg, {{"sweep.threads", std::int64_t(threads)}});
        const auto dir = scratch("sweep" + std::to_string(threads));
        ro.out_dir = dir.string();
        scenario::run(s, ro, log);
        auto body = slurp(dir / "sweep.csv");
        body = body.substr(body.find("omega0_tau"));
        if (first.empty()) first = body;
        CHECK(body == first);
        fs::remove_all(dir);
    }
    const auto rows = read_csv("x\n" + first.substr(first.find('\n') + 1));
    REQUIRE(rows.size() == 5);
    CHECK(rows[3][0] == 400.0);
    CHECK(std::abs(rows[3][1] - 1.0) < 0.02);
}

TEST_CASE("seeded phase schedules reproduce") {
    const std::string cfg = R"(
outputs = ["sweep"]
t_i = -150.0
t_f = 150.0
[profile]
type = "tanh"
omega_i = 2.0
omega_f = -2.0
kappa = 1.0
[sweep]
random_phases = 40
seed = 9
)";
    std::ostringstream log;
    scenario::RunOptions ro;
    ro.header_timestamp = false;
    auto run = [&](std::int64_t seed) {
        const auto dir = scratch("phases");
        ro.out_dir = dir.string();
        scenario::run(scenario::parse(cfg, {{"sweep.seed", seed}}), ro, log);
        auto body = slurp(dir / "phases.csv");
        fs::remove_all(dir);
        return body.substr(body.find("crossing"));
    };
    CHECK(run(9) == run(9));
    CHECK(run(9) != run(10));
    for (const auto& r : read_csv(run(9))) CHECK(r[5] < 1e-9);
}

TEST_CASE("non-finite values never reach a file") {
    std::ostringstream out;
    io::CsvWriter csv(out, {"0", false, {}}, {"a", "b"});
    csv.row({1.0, 2.0});
    CHECK_THROWS_AS(csv.row({1.0, std::numeric_limits<double>::quiet_NaN()}), io::NonFiniteError);
    CHECK_THROWS_AS(csv.row({1.0, std::numeric_limits<double>::infinity()}), io::NonFiniteError);
    CHECK_THROWS_AS(csv.row({1.0}), PreconditionError);
    nlohmann::json j = {{"x", {{"y", std::nan("")}}}};
    CHECK_THROWS_AS(io::finalize_json(j, {"0", false, {}}), io::NonFiniteError);
}

TEST_CASE("figure bundles") {
    const auto dir = scratch("figs");
    fs::create_directories(dir);
    const io::Header h{"0", false, {}};
    products::write_figure("fig3", dir.string(), h);
    const auto f3 = read_csv(slurp(dir / "fig3_u2_1.csv"));
    CHECK(f3[0][1] == Approx(0.5));
    products::write_figure("fig1", dir.string(), h);
    std::vector<std::string> cols;
    const auto summary = read_csv(slurp(dir / "fig1_summary.csv"), &cols);
    REQUIRE(cols[3] == "row_sum");
    for (const auto& r : summary) {
        CHECK(std::abs(r[3] - 1.0) < 1e-9);
        CHECK(r[5] == Approx(r[6]).epsilon(1e-8));
        CHECK(r[6] == Approx(3 * r[0] + std::abs(r[1]) + 1));
    }
    products::write_figure("fig2", dir.string(), h);
    for (const auto& r : read_csv(slurp(dir / "fig2_summary.csv"))) CHECK(r[6] == Approx(7 * r[0] + 3 * (std::abs(r[1]) + 1)));
    CHECK_THROWS(products::write_figure("fig9", dir.string(), h));
    fs::remove_all(dir);
}
