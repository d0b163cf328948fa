#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "larmor/io.hpp"
#include "larmor/observables.hpp"

namespace larmor::products {

using InitialState = std::variant<FockLabel, InvariantStateParams>;

/// Trajectory CSV at the native samples. Rows sitting exactly on a frequency zero have
/// infinite adiabaticity; they are skipped and counted in the return value.
std::size_t write_trajectory(std::ostream& out, const Trajectory& trajectory, const io::Header& header);

/// Observables CSV. `samples` = 0 uses the native sample times, otherwise a uniform grid.
/// Fock states carry sigma_M; Gaussian states omit that column (needs fourth moments).
/// Returns the number of rows skipped at frequency zeros.
std::size_t write_observables(std::ostream& out, const Trajectory& trajectory, const InitialState& state,
                              std::size_t samples, const io::Header& header);

void write_distribution(std::ostream& out, const SpectralDistribution& dist, const io::Header& header);

/// u+- in Cartesian and polar form, identity residual, error estimate and crossing list.
/// `analytic` adds the closed-form comparison when the profile has one.
nlohmann::json coefficients_json(const Trajectory& trajectory, const Extraction& extraction, double t);

/// Closed-form coefficients for the profile, if any (power law, tanh).
std::optional<nlohmann::json> analytic_coefficients(const FrequencyProfile& profile);

/// Writes fig1|fig2|fig3 CSV files into `dir`; returns the written paths.
std::vector<std::string> write_figure(const std::string& which, const std::string& dir, const io::Header& header);

}  // namespace larmor::products
