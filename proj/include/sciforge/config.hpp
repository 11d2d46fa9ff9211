#pragma once

#include <map>
#include <string>
#include <vector>

namespace sciforge {

// Flat key/value configuration with a fixed key registry, typed validation,
// and three layers of increasing precedence: config file, then environment
// (SCIFORGE_<KEY> with dots as underscores, uppercased), then explicit
// set() calls (CLI flags). Unknown keys and values that fail validation
// throw Error(ConfigError).
//
// The API key is deliberately not a config key: it is only ever read from
// SCIFORGE_API_KEY so it cannot end up in a config file or a report.
class PipelineConfig {
public:
    PipelineConfig();

    void load_file(const std::string& path);
    void load_env();
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    long long get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    bool is_default(const std::string& key) const;
    std::vector<std::string> keys() const; // registry order

private:
    std::map<std::string, std::string> values_;
};

// The SCIFORGE_API_KEY environment variable, or empty when unset. The single
// sanctioned way to obtain the key.
std::string api_key_from_env();

} // namespace sciforge
