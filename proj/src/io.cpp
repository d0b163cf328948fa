#include "larmor/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace larmor::io {
namespace {

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void check_json(const nlohmann::json& j, const std::string& path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        throw NonFiniteError("non-finite value at JSON key '" + path + "'");
    if (j.is_object())
        for (const auto& [k, v] : j.items()) check_json(v, path.empty() ? k : path + "." + k);
    if (j.is_array())
        for (std::size_t i = 0; i < j.size(); ++i) check_json(j[i], path + "[" + std::to_string(i) + "]");
}

}  // namespace

std::string fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const Header& header, std::vector<std::string> columns)
    : out_(out), columns_(std::move(columns)) {
    out_ << "# larmor-flip " << version << '\n';
    out_ << "# config_hash " << header.config_hash << '\n';
    if (header.timestamp) out_ << "# generated " << utc_now() << '\n';
    for (const auto& [k, v] : header.meta) out_ << "# " << k << ' ' << v << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) throw PreconditionError("CSV row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw NonFiniteError("non-finite value in column '" + columns_[i] + "' at row " + std::to_string(rows_));
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
    ++rows_;
}

nlohmann::json finalize_json(nlohmann::json body, const Header& header) {
    check_json(body, "");
    nlohmann::json out = {{"version", version}, {"config_hash", header.config_hash}};
    if (header.timestamp) out["generated"] = utc_now();
    for (const auto& [k, v] : header.meta) out[k] = v;
    for (auto& [k, v] : body.items()) out[k] = v;
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace larmor::io
