#include "jlusin/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "jlusin/error.hpp"
#include "json.hpp"

namespace jlusin {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
double number_from(const Json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::string shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream os(path, mode);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    return os;
}

}  // namespace

std::string report_to_line(const VerificationReport& r) {
    Json j;
    j["suite"] = r.suite;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["M"] = r.M;
    j["N"] = r.N;
    j["flavor"] = r.flavor;
    j["gamma"] = number_or_null(r.gamma);
    j["measuredC"] = number_or_null(r.measuredC);
    j["refinementDelta"] = number_or_null(r.refinementDelta);
    j["samples"] = r.samples;
    j["verdict"] = verdict_name(r.verdict);
    j["seed"] = r.seed;
    j["runtimeMs"] = r.runtimeMs;
    j["version"] = r.version;
    j["exploratory"] = r.exploratory;
    Json stats = Json::object();
    for (const auto& [k, v] : r.stats) stats[k] = number_or_null(v);
    j["stats"] = stats;
    j["notes"] = r.notes;
    return j.dump();
}

VerificationReport report_from_line(const std::string& line) {
    Json j;
    try {
        j = Json::parse(line);
        VerificationReport r;
        r.suite = j.at("suite").get<std::string>();
        r.alpha = j.at("alpha").get<double>();
        r.beta = j.at("beta").get<double>();
        r.M = j.at("M").get<int>();
        r.N = j.at("N").get<int>();
        r.flavor = j.at("flavor").get<std::string>();
        r.gamma = number_from(j.at("gamma"));
        r.measuredC = number_from(j.at("measuredC"));
        r.refinementDelta = number_from(j.at("refinementDelta"));
        r.samples = j.at("samples").get<int>();
        r.verdict = parse_verdict(j.at("verdict").get<std::string>());
        r.seed = j.at("seed").get<std::uint64_t>();
        r.runtimeMs = j.at("runtimeMs").get<double>();
        r.version = j.at("version").get<std::string>();
        if (j.contains("exploratory")) r.exploratory = j["exploratory"].get<bool>();
        if (j.contains("stats"))
            for (const auto& [k, v] : j["stats"].items()) r.stats[k] = number_from(v);
        if (j.contains("notes")) r.notes = j["notes"].get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report line: ") + e.what());
    }
}

void emit_report(const VerificationReport& r, const std::string& path) { emit_reports({r}, path); }

void emit_reports(const std::vector<VerificationReport>& rs, const std::string& path) {
    auto os = open_out(path, std::ios::app);
    for (const auto& r : rs) os << report_to_line(r) << '\n';
    if (!os.flush()) throw IoError("write to '" + path + "' failed");
}

std::vector<VerificationReport> read_reports(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    std::vector<VerificationReport> out;
    for (std::string line; std::getline(is, line);)
        if (!line.empty()) out.push_back(report_from_line(line));
    return out;
}

int verify_exit_code(const std::vector<VerificationReport>& rs) {
    for (const auto& r : rs)
        if (r.verdict == Verdict::Violated) return 2;
    return 0;
}

void write_grid_csv(const std::vector<GridRow>& rows, const std::string& path) {
    auto os = open_out(path, std::ios::trunc);
    os << "theta,phi,t,value\n";
    for (const auto& r : rows)
        os << shortest(r.theta) << ',' << shortest(r.phi) << ',' << shortest(r.t) << ',' << shortest(r.value) << '\n';
    if (!os.flush()) throw IoError("write to '" + path + "' failed");
}

std::vector<GridRow> read_grid_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(is, line) || line != "theta,phi,t,value") throw ConfigError("'" + path + "': bad CSV header");
    std::vector<GridRow> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double v[4];
        std::istringstream ls(line);
        std::string cell;
        for (double& x : v) {
            if (!std::getline(ls, cell, ',')) throw ConfigError("'" + path + "': short CSV row");
            x = std::stod(cell);
        }
        out.push_back({v[0], v[1], v[2], v[3]});
    }
    return out;
}

}  // namespace jlusin
