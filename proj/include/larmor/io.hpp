#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "larmor/errors.hpp"

namespace larmor::io {

inline constexpr const char* version = "0.1.0";

/// A NaN or Inf reached an output file.
class NonFiniteError : public Error {
  public:
    using Error::Error;
};

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a64(std::string_view bytes);

struct Header {
    std::string config_hash;
    bool timestamp = true;
    std::vector<std::pair<std::string, std::string>> meta;
};

/// Shortest-safe round-trip rendering (17 significant digits).
std::string format_double(double v);

/// '#'-prefixed provenance lines followed by the column row, then numeric rows.
class CsvWriter {
  public:
    CsvWriter(std::ostream& out, const Header& header, std::vector<std::string> columns);
    /// Throws NonFiniteError (naming the column) on NaN/Inf.
    void row(const std::vector<double>& values);
    std::size_t rows() const noexcept { return rows_; }

  private:
    std::ostream& out_;
    std::vector<std::string> columns_;
    std::size_t rows_ = 0;
};

/// Adds version, config_hash and (optionally) generated to a JSON object and checks every
/// number is finite.
nlohmann::json finalize_json(nlohmann::json body, const Header& header);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace larmor::io
