#pragma once

// Flat "key = value" experiment configuration with dotted keys.
//
//   # comment
//   experiment = excursion-tails
//   chain.family = half-line-delta
//   chain.delta = 1
//   sim.alphas = 0, 2
//
// Every value read through a getter (including defaults) is remembered, so
// the resolved configuration can be echoed into the report and re-run.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lamperti/errors.hpp"

namespace lamperti::cli {

class ConfigError : public ValidationError {
public:
    ConfigError(std::string key, int line, const std::string& message);
    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

class Config {
public:
    static Config parse(std::istream& in);
    static Config parse_string(const std::string& text);
    static Config load(const std::filesystem::path& path);

    /// Adds or replaces a key (command-line overrides); line 0.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    int line(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

    /// Rejects keys outside `allowed` (prefix entries ending in '.' match any
    /// key under them).
    void check_known(const std::set<std::string>& allowed) const;

    /// Every key that was read, with the value actually used.
    const std::map<std::string, std::string>& resolved() const { return resolved_; }
    /// All keys as given.
    std::map<std::string, std::string> raw() const;
    /// Resolved configuration in the input format.
    std::string echo() const;

private:
    struct Entry {
        std::string value;
        int line;
    };
    const Entry& require(const std::string& key) const;
    void remember(const std::string& key, const std::string& value) const;

    std::map<std::string, Entry> entries_;
    mutable std::map<std::string, std::string> resolved_;
};

/// Shortest round-trip decimal form of v.
std::string format_number(double v);

} // namespace lamperti::cli
