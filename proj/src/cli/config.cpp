#include "lamperti/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lamperti::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        auto t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::string where(const std::string& key, int line) {
    return line > 0 ? key + " (line " + std::to_string(line) + ")" : key;
}

} // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : ValidationError("config error: " + where(key, line) + ": " + message), key_(std::move(key)), line_(line) {}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Config Config::parse(std::istream& in) {
    Config cfg;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const auto text = trim(std::string_view(raw).substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("<line>", line, "expected 'key = value'");
        const auto key = trim(std::string_view(text).substr(0, eq));
        const auto value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty()) throw ConfigError("<line>", line, "empty key");
        if (cfg.entries_.count(key)) {
            throw ConfigError(key, line, "duplicate key (first set on line " + std::to_string(cfg.entries_[key].line) + ")");
        }
        cfg.entries_[key] = {value, line};
    }
    return cfg;
}

Config Config::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", 0, "cannot open " + path.string());
    return parse(in);
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

int Config::line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
}

const Config::Entry& Config::require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(key, 0, "required key is missing");
    return it->second;
}

void Config::remember(const std::string& key, const std::string& value) const { resolved_[key] = value; }

std::string Config::get_string(const std::string& key) const {
    const auto& e = require(key);
    remember(key, e.value);
    return e.value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : (remember(key, fallback), fallback);
}

double Config::get_double(const std::string& key) const {
    const auto& e = require(key);
    double v = 0.0;
    const auto* end = e.value.data() + e.value.size();
    const auto res = std::from_chars(e.value.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) throw ConfigError(key, e.line, "not a number: '" + e.value + "'");
    remember(key, e.value);
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    if (has(key)) return get_double(key);
    remember(key, format_number(fallback));
    return fallback;
}

std::int64_t Config::get_int(const std::string& key) const {
    const auto& e = require(key);
    std::int64_t v = 0;
    const auto* end = e.value.data() + e.value.size();
    auto res = std::from_chars(e.value.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        // Accept integral values written in floating form, e.g. 1e6.
        double d = 0.0;
        res = std::from_chars(e.value.data(), end, d);
        if (res.ec != std::errc{} || res.ptr != end || d != static_cast<double>(static_cast<std::int64_t>(d))) {
            throw ConfigError(key, e.line, "not an integer: '" + e.value + "'");
        }
        v = static_cast<std::int64_t>(d);
    }
    remember(key, e.value);
    return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    if (has(key)) return get_int(key);
    remember(key, std::to_string(fallback));
    return fallback;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    const auto& e = require(key);
    std::vector<double> out;
    for (const auto& item : split_list(e.value)) {
        double v = 0.0;
        const auto* end = item.data() + item.size();
        const auto res = std::from_chars(item.data(), end, v);
        if (res.ec != std::errc{} || res.ptr != end) throw ConfigError(key, e.line, "not a number: '" + item + "'");
        out.push_back(v);
    }
    remember(key, e.value);
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    if (has(key)) return get_doubles(key);
    std::string s;
    for (std::size_t i = 0; i < fallback.size(); ++i) s += (i ? ", " : "") + format_number(fallback[i]);
    remember(key, s);
    return fallback;
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
    if (has(key)) return split_list(get_string(key));
    std::string s;
    for (std::size_t i = 0; i < fallback.size(); ++i) s += (i ? ", " : "") + fallback[i];
    remember(key, s);
    return fallback;
}

void Config::check_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, entry] : entries_) {
        bool ok = allowed.count(key) > 0;
        for (const auto& a : allowed) {
            if (!a.empty() && a.back() == '.' && key.rfind(a, 0) == 0) ok = true;
        }
        if (!ok) throw ConfigError(key, entry.line, "unknown key for this experiment");
    }
}

std::map<std::string, std::string> Config::raw() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, e] : entries_) out[k] = e.value;
    return out;
}

std::string Config::echo() const {
    std::string out;
    for (const auto& [k, v] : resolved_) out += k + " = " + v + "\n";
    return out;
}

} // namespace lamperti::cli
