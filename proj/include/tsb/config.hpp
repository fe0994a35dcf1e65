// Declarative scenario configs: `key = value` sections, expressions as quoted
// strings. Unknown sections or keys are rejected with their line number.
// The schema is documented in docs/config.md.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsb {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

class Config {
  public:
    static Config parse_file(const std::string &path);
    static Config parse_text(const std::string &text, const std::string &name = "<config>");

    bool has(const std::string &section, const std::string &key) const;

    // typed getters; all mark the key as consumed
    std::string get_string(const std::string &section, const std::string &key,
                           const std::string &fallback);
    std::string require_string(const std::string &section, const std::string &key);
    double get_number(const std::string &section, const std::string &key, double fallback);
    double require_number(const std::string &section, const std::string &key);
    long long get_int(const std::string &section, const std::string &key, long long fallback);
    std::vector<double> require_number_list(const std::string &section, const std::string &key);
    // quoted expression source (quotes stripped)
    std::optional<std::string> get_expr(const std::string &section, const std::string &key);

    // keys of a section matching a prefix (for explicit metric entries)
    std::vector<std::string> keys_with_prefix(const std::string &section,
                                              const std::string &prefix) const;
    void mark_consumed(const std::string &section, const std::string &key);

    // throws ConfigError listing any key that was never consumed
    void reject_unknown() const;

    const std::string &name() const { return name_; }

  private:
    struct Entry {
        std::string raw;
        int line = 0;
        bool quoted = false;
        mutable bool consumed = false;
    };
    std::string name_;
    std::map<std::string, std::map<std::string, Entry>> sections_;

    const Entry *find(const std::string &section, const std::string &key) const;
    const Entry &require(const std::string &section, const std::string &key);
};

} // namespace tsb
