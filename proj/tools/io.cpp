#include "io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qcl/errors.hpp"

namespace qcl::cli {

namespace fs = std::filesystem;

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

Artifacts::Artifacts(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw DomainError("cannot create output directory " + dir_.string());
}

void Artifacts::text(const std::string& name, const std::string& body) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw DomainError("cannot write " + (dir_ / name).string());
    f << body;
    f.close();
    if (!f) throw DomainError("write failed for " + (dir_ / name).string());
    files_.emplace_back(name, sha256_hex(body));
}

void Artifacts::csv(const std::string& name, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
    std::string body;
    for (std::size_t i = 0; i < header.size(); ++i) body += (i ? "," : "") + header[i];
    body += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) body += ',';
            body += num(r[i]);
        }
        body += '\n';
    }
    text(name, body);
}

void Artifacts::svg(const std::string& name, const std::string& title,
                    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series,
                    bool log_x, bool log_y) {
    const double W = 640, H = 420, m = 50;
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (auto [x, y] : s.second) {
            if ((log_x && !(x > 0)) || (log_y && !(y > 0)) || !std::isfinite(x) || !std::isfinite(y)) continue;
            x0 = std::min(x0, tx(x));
            x1 = std::max(x1, tx(x));
            y0 = std::min(y0, ty(y));
            y1 = std::max(y1, ty(y));
        }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n"
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W, H, m, title, m, m, W - 2 * m, H - 2 * m);
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}{}</text>\n"
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}{}</text>\n",
        m, H - m + 15, log_x ? "1e" : "", num(x0), W - m, H - m + 15, log_x ? "1e" : "", num(x1));
    out += fmt::format(
        "<text x=\"5\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}{}</text>\n"
        "<text x=\"5\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}{}</text>\n",
        H - m, log_y ? "1e" : "", num(y0), m + 10, log_y ? "1e" : "", num(y1));
    for (std::size_t k = 0; k < series.size(); ++k) {
        std::string pts;
        for (auto [x, y] : series[k].second) {
            if ((log_x && !(x > 0)) || (log_y && !(y > 0)) || !std::isfinite(x) || !std::isfinite(y)) continue;
            const double px = m + (tx(x) - x0) / (x1 - x0) * (W - 2 * m);
            const double py = H - m - (ty(y) - y0) / (y1 - y0) * (H - 2 * m);
            pts += fmt::format("{:.2f},{:.2f} ", px, py);
        }
        const char* c = colors[k % 6];
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n", c, pts);
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
                           W - m - 150, m + 15 + 14 * static_cast<double>(k), c, series[k].first);
    }
    out += "</svg>\n";
    text(name, out);
}

json Artifacts::manifest() const {
    json a = json::array();
    for (const auto& [name, hash] : files_) a.push_back({{"path", name}, {"sha256", hash}});
    return a;
}

void write_report(Artifacts& out, const std::string& command, const json& config, const json& results,
                  const json& verdicts, int exit_code) {
    json r;
    r["command"] = command;
    r["config"] = config;
    r["results"] = results;
    r["verdicts"] = verdicts;
    r["artifacts"] = out.manifest();
    r["exit_code"] = exit_code;
    r["status"] = exit_code == 0 ? "ok" : exit_code == 2 ? "mismatch" : "error";
    const std::string body = r.dump(2) + "\n";
    std::ofstream f(out.dir() / (command + ".json"), std::ios::binary);
    if (!f) throw DomainError("cannot write report");
    f << body;
}

std::pair<double, double> parse_window(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw DomainError("window must be lo:hi, got '" + s + "'");
    try {
        std::size_t p1 = 0, p2 = 0;
        const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
        const double lo = std::stod(a, &p1), hi = std::stod(b, &p2);
        if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing");
        if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) throw DomainError("window needs 0 < lo < hi");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw DomainError("window must be lo:hi, got '" + s + "'");
    }
}

void read_samples(const std::string& path, std::vector<double>& x, std::vector<cplx>& values) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open samples file " + path, 0);
    x.clear();
    values.clear();
    std::string line;
    std::size_t lineno = 0;
    bool header_allowed = true;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (cells.size() < 2 || cells.size() > 3)
            throw ParseError(fmt::format("{}:{}: expected x,re[,im]", path, lineno), lineno);
        std::vector<double> v;
        bool ok = true;
        for (const auto& c : cells) {
            try {
                std::size_t pos = 0;
                v.push_back(std::stod(c, &pos));
                if (c.find_first_not_of(" \t", pos) != std::string::npos) ok = false;
            } catch (const std::logic_error&) {
                ok = false;
            }
        }
        if (!ok) {
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw ParseError(fmt::format("{}:{}: malformed number", path, lineno), lineno);
        }
        header_allowed = false;
        for (double d : v)
            if (!std::isfinite(d)) throw ParseError(fmt::format("{}:{}: non-finite value", path, lineno), lineno);
        x.push_back(v[0]);
        values.emplace_back(v[1], v.size() == 3 ? v[2] : 0.0);
    }
    if (x.size() < 2) throw ParseError(fmt::format("{}: need at least two samples", path), lineno);
}

}  // namespace qcl::cli
