#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "larmor/products.hpp"

namespace larmor::scenario {

/// Plain description of a profile block; build() turns it into a FrequencyProfile.
struct ProfileSpec {
    std::string type = "tanh";
    double omega0 = 1.0, tau = 1.0;
    int k = 1;
    double omega_i = 1.0, omega_f = -1.0, kappa = 0.05;
    double omega = 1.0;
    // piecewise children only
    double start = 0.0, end = 0.0, offset = 0.0;
    std::vector<ProfileSpec> segments;
    std::vector<std::pair<double, double>> knots;

    FrequencyProfile build() const;
    /// Default integration window: [-tau, tau], +-30/kappa, ten periods, or the domain.
    std::pair<double, double> default_window() const;
};

struct SweepSpec {
    std::vector<double> omega0_tau;
    std::vector<double> phi;
    std::size_t random_phases = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency

    bool empty() const { return omega0_tau.empty() && phi.empty() && random_phases == 0; }
};

struct Scenario {
    ProfileSpec profile;
    double t_i = 0.0, t_f = 0.0;
    double tol = 1e-12;
    std::optional<double> extract_at;  // default t_f
    products::InitialState initial_state = FockLabel{};
    std::vector<std::string> outputs;
    std::size_t observable_samples = 0;
    double tail_tol = 1e-12;
    SweepSpec sweep;

    std::string canonical;  // effective configuration after overrides, re-serialised
    std::string hash;

    double extraction_time() const { return extract_at.value_or(t_f); }
};

/// A command-line override of one dotted config key ("tol", "profile.kappa", "sweep.seed").
struct Override {
    std::string key;
    std::variant<double, std::int64_t, std::string, std::vector<std::string>> value;
};

/// "key=value"; the value becomes an integer, a number or a string, in that order of preference.
Override parse_override(const std::string& assignment);

/// Parses TOML text; errors are ConfigError with line and key.
Scenario parse(const std::string& text, const std::vector<Override>& overrides = {},
               const std::string& source_name = "config");
Scenario load(const std::string& path, const std::vector<Override>& overrides = {});

struct RunOptions {
    std::string out_dir = ".";
    bool header_timestamp = true;
};

/// Produces every requested output; returns the written paths. Warnings go to `log`.
std::vector<std::string> run(const Scenario& scenario, const RunOptions& options, std::ostream& log);

}  // namespace larmor::scenario
