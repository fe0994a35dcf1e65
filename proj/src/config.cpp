#include "tsb/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace tsb {

namespace {

std::string trim(const std::string &s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace((unsigned char)s[b])) ++b;
    while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
    return s.substr(b, e - b);
}

// strips a trailing comment, honoring quotes
std::string strip_comment(const std::string &s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

} // namespace

Config Config::parse_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

Config Config::parse_text(const std::string &text, const std::string &name) {
    Config cfg;
    cfg.name_ = name;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(name + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(name + ":" + std::to_string(lineno) + ": empty section name");
            cfg.sections_[section]; // sections may be empty
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        if (section.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": key outside of any [section]");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
        Entry e;
        e.line = lineno;
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            e.quoted = true;
            e.raw = value.substr(1, value.size() - 2);
        } else {
            e.raw = value;
        }
        auto [it, fresh] = cfg.sections_[section].emplace(key, e);
        if (!fresh)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" +
                              key + "' in [" + section + "]");
    }
    return cfg;
}

const Config::Entry *Config::find(const std::string &section, const std::string &key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

const Config::Entry &Config::require(const std::string &section, const std::string &key) {
    const Entry *e = find(section, key);
    if (!e)
        throw ConfigError(name_ + ": missing required key '" + key + "' in [" + section + "]");
    e->consumed = true;
    return *e;
}

bool Config::has(const std::string &section, const std::string &key) const {
    return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string &section, const std::string &key,
                               const std::string &fallback) {
    const Entry *e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    return e->raw;
}

std::string Config::require_string(const std::string &section, const std::string &key) {
    return require(section, key).raw;
}

double Config::get_number(const std::string &section, const std::string &key, double fallback) {
    const Entry *e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    try {
        std::size_t used = 0;
        double v = std::stod(e->raw, &used);
        if (used != e->raw.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception &) {
        throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' is not a number: " + e->raw);
    }
}

double Config::require_number(const std::string &section, const std::string &key) {
    require(section, key);
    return get_number(section, key, 0.0);
}

long long Config::get_int(const std::string &section, const std::string &key,
                          long long fallback) {
    const Entry *e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    try {
        std::size_t used = 0;
        long long v = std::stoll(e->raw, &used);
        if (used != e->raw.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception &) {
        throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' is not an integer: " + e->raw);
    }
}

std::vector<double> Config::require_number_list(const std::string &section,
                                                const std::string &key) {
    const Entry &e = require(section, key);
    std::vector<double> out;
    std::string item;
    std::istringstream in(e.raw);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception &) {
            throw ConfigError(name_ + ":" + std::to_string(e.line) + ": '" + key +
                              "' has a malformed number: " + item);
        }
    }
    if (out.empty())
        throw ConfigError(name_ + ":" + std::to_string(e.line) + ": '" + key +
                          "' must list at least one number");
    return out;
}

std::optional<std::string> Config::get_expr(const std::string &section, const std::string &key) {
    const Entry *e = find(section, key);
    if (!e) return std::nullopt;
    if (!e->quoted)
        throw ConfigError(name_ + ":" + std::to_string(e->line) + ": expression '" + key +
                          "' must be a quoted string");
    e->consumed = true;
    return e->raw;
}

std::vector<std::string> Config::keys_with_prefix(const std::string &section,
                                                  const std::string &prefix) const {
    std::vector<std::string> out;
    auto s = sections_.find(section);
    if (s == sections_.end()) return out;
    for (const auto &[k, v] : s->second)
        if (k.rfind(prefix, 0) == 0) out.push_back(k);
    return out;
}

void Config::mark_consumed(const std::string &section, const std::string &key) {
    const Entry *e = find(section, key);
    if (e) e->consumed = true;
}

void Config::reject_unknown() const {
    for (const auto &[sec, keys] : sections_)
        for (const auto &[key, e] : keys)
            if (!e.consumed)
                throw ConfigError(name_ + ":" + std::to_string(e.line) + ": unknown key '" +
                                  key + "' in [" + sec + "]");
}

} // namespace tsb
