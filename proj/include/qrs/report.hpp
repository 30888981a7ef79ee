// report.hpp: tabular CLI output. CSV carries '#' comment lines (tool version,
// config echo, verification block); JSON mirrors the same schema.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qrs {

inline constexpr const char* kToolName = "qrs";
inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest decimal string that parses back to exactly x.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

inline std::string cell_text(const Cell& c) {
    struct V {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double x) const { return format_double(x); }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(bool x) const { return x ? "true" : "false"; }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
    struct V {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(double x) const {
            if (!std::isfinite(x)) return nullptr;
            return x;
        }
        nlohmann::ordered_json operator()(std::int64_t x) const { return x; }
        nlohmann::ordered_json operator()(bool x) const { return x; }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

// RFC 4180 quoting, only when needed
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

struct Check {
    std::string name;
    bool pass{false};
    double value{};
    std::string detail;
};

struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  // echoed in order
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<Check> checks;

    void add_config(const std::string& key, double v) { config.emplace_back(key, format_double(v)); }
    void add_config(const std::string& key, const std::string& v) { config.emplace_back(key, v); }
    void add_config(const std::string& key, const char* v) { config.emplace_back(key, v); }
    void add_config(const std::string& key, std::int64_t v) { config.emplace_back(key, std::to_string(v)); }
    void add_config(const std::string& key, int v) { config.emplace_back(key, std::to_string(v)); }

    void add_check(std::string name, bool pass, double value, std::string detail = {}) {
        checks.push_back({std::move(name), pass, value, std::move(detail)});
    }
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline void write_csv(std::ostream& os, const Report& r) {
    os << "# " << kToolName << ' ' << kToolVersion << ' ' << r.command;
    for (const auto& [k, v] : r.config) os << ' ' << k << '=' << v;
    os << '\n';
    for (const auto& c : r.checks)
        os << "# check," << csv_field(c.name) << ',' << (c.pass ? "PASS" : "FAIL") << ',' << format_double(c.value)
           << ',' << csv_field(c.detail) << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << csv_field(r.columns[i]);
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(row[i]));
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = r.command;
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    j["columns"] = r.columns;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json o = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) o[r.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(o));
    }
    auto& checks = j["verification"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", cell_json(c.value)}, {"detail", c.detail}});
    return j;
}

inline void write_json(std::ostream& os, const Report& r) { os << to_json(r).dump(2) << '\n'; }

}  // namespace qrs
