#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcl/numerics.hpp"

namespace qcl::cli {

using nlohmann::json;

/// Collects artifacts written by one command and their SHA-256 digests.
class Artifacts {
public:
    explicit Artifacts(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    /// Writes a CSV with a header row. Values use shortest round-trip formatting.
    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows);
    void text(const std::string& name, const std::string& body);
    /// Log-log (or lin-log) polyline plot of one or more series.
    void svg(const std::string& name, const std::string& title,
             const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series,
             bool log_x, bool log_y);

    json manifest() const;

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string sha256_hex(const std::string& data);

/// Writes <dir>/<command>.json: command, config, results, verdicts, artifacts, status.
void write_report(Artifacts& out, const std::string& command, const json& config, const json& results,
                  const json& verdicts, int exit_code);

/// "lo:hi" with 0 < lo < hi.
std::pair<double, double> parse_window(const std::string& s);

/// Samples CSV: x,re[,im] per line, optional header, '#' comments. Throws
/// ParseError with the 1-based line number.
void read_samples(const std::string& path, std::vector<double>& x, std::vector<cplx>& values);

/// Round-trip formatting of a double.
std::string num(double v);

}  // namespace qcl::cli
