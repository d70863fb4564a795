#include "poclab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace poclab {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum((unsigned char)c) && c != '_' && c != '-' && c != '.')
            return false;
    return true;
}

// Strip a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

ConfigTable::Value parse_scalar(const std::string& tok, int line_no) {
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return tok.substr(1, tok.size() - 2);
    if (tok == "true") return true;
    if (tok == "false") return false;
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
    } catch (...) {
    }
    throw ConfigError("config line " + std::to_string(line_no) + ": bad value '" + tok + "'");
}

ConfigTable::Value parse_value(const std::string& raw, int line_no) {
    const std::string v = trim(raw);
    if (v.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty value");
    if (v.front() == '[') {
        if (v.back() != ']')
            throw ConfigError("config line " + std::to_string(line_no) + ": unterminated array");
        std::vector<std::string> toks;
        std::string cur;
        bool in_str = false;
        for (size_t i = 1; i + 1 < v.size(); ++i) {
            const char c = v[i];
            if (c == '"') in_str = !in_str;
            if (c == ',' && !in_str) {
                toks.push_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!trim(cur).empty()) toks.push_back(trim(cur));
        if (toks.empty()) return std::vector<double>{};
        if (!toks[0].empty() && toks[0].front() == '"') {
            std::vector<std::string> out;
            for (const auto& t : toks) {
                auto s = parse_scalar(t, line_no);
                if (!std::holds_alternative<std::string>(s))
                    throw ConfigError("config line " + std::to_string(line_no) +
                                      ": mixed array types");
                out.push_back(std::get<std::string>(s));
            }
            return out;
        }
        std::vector<double> out;
        for (const auto& t : toks) {
            auto s = parse_scalar(t, line_no);
            if (!std::holds_alternative<double>(s))
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": mixed array types");
            out.push_back(std::get<double>(s));
        }
        return out;
    }
    return parse_scalar(v, line_no);
}

}  // namespace

ConfigTable ConfigTable::parse(const std::string& text) {
    ConfigTable t;
    std::istringstream in(text);
    std::string line, prefix;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed table header");
            prefix = trim(line.substr(1, line.size() - 2));
            if (!valid_key(prefix))
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": bad table name '" + prefix + "'");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!valid_key(key))
            throw ConfigError("config line " + std::to_string(line_no) + ": bad key '" + key + "'");
        if (!prefix.empty()) key = prefix + "." + key;
        t.values_[key] = parse_value(line.substr(eq + 1), line_no);
    }
    return t;
}

ConfigTable ConfigTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

double ConfigTable::get_number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    if (!std::holds_alternative<double>(it->second))
        throw ConfigError("config key is not a number: " + key);
    return std::get<double>(it->second);
}

double ConfigTable::get_number(const std::string& key, double fallback) const {
    return has(key) ? get_number(key) : fallback;
}

long ConfigTable::get_int(const std::string& key) const {
    const double v = get_number(key);
    const long r = (long)std::llround(v);
    if (std::abs(v - (double)r) > 1e-9)
        throw ConfigError("config key is not an integer: " + key);
    return r;
}

long ConfigTable::get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool ConfigTable::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (!std::holds_alternative<bool>(it->second))
        throw ConfigError("config key is not a bool: " + key);
    return std::get<bool>(it->second);
}

std::string ConfigTable::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    if (!std::holds_alternative<std::string>(it->second))
        throw ConfigError("config key is not a string: " + key);
    return std::get<std::string>(it->second);
}

std::string ConfigTable::get_string(const std::string& key,
                                    const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

std::vector<double> ConfigTable::get_numbers(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    if (std::holds_alternative<std::vector<double>>(it->second))
        return std::get<std::vector<double>>(it->second);
    if (std::holds_alternative<double>(it->second))
        return {std::get<double>(it->second)};
    throw ConfigError("config key is not a number array: " + key);
}

std::vector<double> ConfigTable::get_numbers(const std::string& key,
                                             std::vector<double> fallback) const {
    return has(key) ? get_numbers(key) : fallback;
}

std::vector<std::string> ConfigTable::get_strings(
    const std::string& key, std::vector<std::string> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (std::holds_alternative<std::vector<std::string>>(it->second))
        return std::get<std::vector<std::string>>(it->second);
    if (std::holds_alternative<std::string>(it->second))
        return {std::get<std::string>(it->second)};
    throw ConfigError("config key is not a string array: " + key);
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string serialize_value(const ConfigTable::Value& v) {
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    if (std::holds_alternative<std::string>(v)) return "\"" + std::get<std::string>(v) + "\"";
    if (std::holds_alternative<std::vector<double>>(v)) {
        std::string s = "[";
        const auto& a = std::get<std::vector<double>>(v);
        for (size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + format_double(a[i]);
        return s + "]";
    }
    std::string s = "[";
    const auto& a = std::get<std::vector<std::string>>(v);
    for (size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + ("\"" + a[i] + "\"");
    return s + "]";
}

}  // namespace

std::string ConfigTable::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + serialize_value(v) + "\n";
    return out;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

std::string ConfigTable::hash() const { return fnv1a_hex(serialize()); }

}  // namespace poclab
