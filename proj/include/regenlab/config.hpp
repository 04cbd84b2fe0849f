// Minimal TOML-subset reader for experiment configs: [tables], scalar values
// (bool, integer, float, quoted string) and flat arrays. Also parses
// `table.key=value` override strings from the command line.
#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace regenlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class TomlValue {
  public:
    using Storage = std::variant<bool, std::int64_t, double, std::string,
                                 std::vector<double>, std::vector<std::string>>;

    TomlValue() : v_(std::int64_t{0}) {}
    explicit TomlValue(Storage v) : v_(std::move(v)) {}

    bool as_bool() const {
        if (auto* b = std::get_if<bool>(&v_)) return *b;
        throw ConfigError("config value is not a boolean");
    }
    std::int64_t as_int() const {
        if (auto* i = std::get_if<std::int64_t>(&v_)) return *i;
        throw ConfigError("config value is not an integer");
    }
    double as_double() const {
        if (auto* d = std::get_if<double>(&v_)) return *d;
        if (auto* i = std::get_if<std::int64_t>(&v_)) return static_cast<double>(*i);
        throw ConfigError("config value is not a number");
    }
    const std::string& as_string() const {
        if (auto* s = std::get_if<std::string>(&v_)) return *s;
        throw ConfigError("config value is not a string");
    }
    std::vector<double> as_doubles() const {
        if (auto* a = std::get_if<std::vector<double>>(&v_)) return *a;
        if (auto* d = std::get_if<double>(&v_)) return {*d};
        if (auto* i = std::get_if<std::int64_t>(&v_)) return {static_cast<double>(*i)};
        throw ConfigError("config value is not a numeric array");
    }

    static TomlValue parse(const std::string& raw);

  private:
    Storage v_;
};

class TomlTable {
  public:
    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const TomlValue& at(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? at(key).as_double() : fallback;
    }
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        return has(key) ? at(key).as_int() : fallback;
    }
    bool get_bool(const std::string& key, bool fallback) const {
        return has(key) ? at(key).as_bool() : fallback;
    }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? at(key).as_string() : fallback;
    }
    std::vector<double> get_doubles(const std::string& key,
                                    std::vector<double> fallback) const {
        return has(key) ? at(key).as_doubles() : fallback;
    }

    void set(const std::string& key, TomlValue v) { entries_[key] = std::move(v); }

    std::vector<std::string> keys() const {
        std::vector<std::string> ks;
        ks.reserve(entries_.size());
        for (const auto& [k, _] : entries_) ks.push_back(k);
        return ks;
    }

  private:
    std::map<std::string, TomlValue> entries_;
};

class TomlConfig {
  public:
    static TomlConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str());
    }

    static TomlConfig parse_string(const std::string& text);

    bool has_table(const std::string& name) const { return tables_.count(name) > 0; }

    const TomlTable& table(const std::string& name) const {
        static const TomlTable empty;
        auto it = tables_.find(name);
        return it == tables_.end() ? empty : it->second;
    }

    TomlTable& table_mut(const std::string& name) { return tables_[name]; }

    // "table.key=value"; bare section-less overrides land in the "" table.
    void apply_override(const std::string& spec) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must look like table.key=value: " + spec);
        std::string path = spec.substr(0, eq);
        std::string raw = spec.substr(eq + 1);
        auto dot = path.find('.');
        std::string tbl = dot == std::string::npos ? "" : path.substr(0, dot);
        std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
        if (key.empty()) throw ConfigError("override has empty key: " + spec);
        tables_[tbl].set(key, TomlValue::parse(raw));
    }

    std::vector<std::string> table_names() const {
        std::vector<std::string> ns;
        for (const auto& [k, _] : tables_) ns.push_back(k);
        return ns;
    }

  private:
    std::map<std::string, TomlTable> tables_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// strip a trailing comment that is not inside a quoted string
inline std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

}  // namespace detail

inline TomlValue TomlValue::parse(const std::string& raw_in) {
    std::string raw = detail::trim(raw_in);
    if (raw.empty()) throw ConfigError("empty config value");
    if (raw == "true") return TomlValue(Storage{true});
    if (raw == "false") return TomlValue(Storage{false});
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            throw ConfigError("unterminated string: " + raw);
        return TomlValue(Storage{raw.substr(1, raw.size() - 2)});
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') throw ConfigError("unterminated array: " + raw);
        std::string body = raw.substr(1, raw.size() - 2);
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool string_array = false;
        std::string item;
        std::stringstream ss(body);
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (item.empty()) continue;
            if (item.front() == '"') {
                string_array = true;
                if (item.size() < 2 || item.back() != '"')
                    throw ConfigError("bad string array item: " + item);
                strs.push_back(item.substr(1, item.size() - 2));
            } else {
                std::size_t used = 0;
                double d = std::stod(item, &used);
                if (used != item.size()) throw ConfigError("bad array number: " + item);
                nums.push_back(d);
            }
        }
        if (string_array) return TomlValue(Storage{strs});
        return TomlValue(Storage{nums});
    }
    // number: integer unless it carries a decimal point or exponent
    bool is_float = raw.find_first_of(".eE") != std::string::npos;
    try {
        std::size_t used = 0;
        if (is_float) {
            double d = std::stod(raw, &used);
            if (used != raw.size()) throw ConfigError("bad number: " + raw);
            return TomlValue(Storage{d});
        }
        long long i = std::stoll(raw, &used);
        if (used != raw.size()) throw ConfigError("bad integer: " + raw);
        return TomlValue(Storage{static_cast<std::int64_t>(i)});
    } catch (const std::invalid_argument&) {
        throw ConfigError("cannot parse config value: " + raw);
    } catch (const std::out_of_range&) {
        throw ConfigError("config value out of range: " + raw);
    }
}

inline TomlConfig TomlConfig::parse_string(const std::string& text) {
    TomlConfig cfg;
    std::string current;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        line = detail::trim(detail::strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": bad table header");
            current = detail::trim(line.substr(1, line.size() - 2));
            cfg.tables_[current];  // ensure the table exists even if empty
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        cfg.tables_[current].set(key, TomlValue::parse(line.substr(eq + 1)));
    }
    return cfg;
}

}  // namespace regenlab
