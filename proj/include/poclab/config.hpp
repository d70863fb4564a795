#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "poclab/errors.hpp"

namespace poclab {

// Flat typed key-value store with nested tables, parsed from a
// TOML-compatible surface syntax:
//   [table] / [table.sub] headers, key = value lines, # comments,
//   values: "string", number, true/false, [v, v, ...].
// Keys are flattened to dotted paths.
class ConfigTable {
  public:
    using Value = std::variant<bool, double, std::string, std::vector<double>,
                               std::vector<std::string>>;

    static ConfigTable parse(const std::string& text);
    static ConfigTable parse_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    double get_number(const std::string& key) const;
    double get_number(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_numbers(const std::string& key) const;
    std::vector<double> get_numbers(const std::string& key,
                                    std::vector<double> fallback) const;
    std::vector<std::string> get_strings(const std::string& key,
                                         std::vector<std::string> fallback) const;

    void set(const std::string& key, Value v) { values_[key] = std::move(v); }

    // Canonical text form: sorted dotted keys, one per line. Parsing it back
    // reproduces the same table.
    std::string serialize() const;

    // FNV-1a over the canonical form, as fixed-width hex.
    std::string hash() const;

    const std::map<std::string, Value>& items() const { return values_; }

  private:
    std::map<std::string, Value> values_;
};

std::string fnv1a_hex(const std::string& text);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace poclab
