#include "sciforge/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "sciforge/errors.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

namespace {

enum class KeyType { Int, Double, Bool, String, Choice };

struct KeySpec {
    const char* key;
    KeyType type;
    const char* default_value;
    double min = 0.0;
    bool has_min = false;
    double max = 0.0;
    bool has_max = false;
    const char* choices = nullptr; // comma-separated for Choice
};

const KeySpec kRegistry[] = {
    {"seed", KeyType::Int, "0", 0, true},
    {"gateway.backend", KeyType::Choice, "mock", 0, false, 0, false, "mock,http,replay"},
    {"gateway.endpoint", KeyType::String, ""},
    {"gateway.model", KeyType::String, "default"},
    {"gateway.max_in_flight", KeyType::Int, "4", 1, true},
    {"gateway.max_retries", KeyType::Int, "3", 0, true},
    {"gateway.base_backoff_ms", KeyType::Int, "250", 0, true},
    {"gateway.requests_per_minute", KeyType::Int, "60", 1, true},
    {"gateway.temperature", KeyType::Double, "0.7", 0, true},
    {"gateway.max_tokens", KeyType::Int, "2048", 1, true},
    {"gateway.script", KeyType::String, ""},
    {"gateway.cassette", KeyType::String, ""},
    {"gateway.record_cassette", KeyType::String, ""},
    {"judge.rel_tol", KeyType::Double, "1e-4", 0, true},
    {"judge.abs_tol", KeyType::Double, "1e-9", 0, true},
    {"judge.llm_escalation", KeyType::Bool, "on"},
    {"prompts.stage1", KeyType::String, ""},
    {"prompts.stage2", KeyType::String, ""},
    {"prompts.stage3", KeyType::String, ""},
    {"prompts.labeler", KeyType::String, ""},
    {"annotate.n_candidates", KeyType::Int, "1", 1, true},
    {"annotate.checkpoint", KeyType::String, ""},
    {"filter.dim", KeyType::Int, "4096", 1, true},
    {"filter.epochs", KeyType::Int, "200", 1, true},
    {"filter.learning_rate", KeyType::Double, "0.5", 0, true},
    {"filter.provider", KeyType::Choice, "hashed-ngram", 0, false, 0, false,
     "hashed-ngram,remote"},
    {"filter.drop_fraction", KeyType::Double, "0.1", 0, true, 1, true},
    {"filter.endpoint", KeyType::String, ""},
    {"train.learning_rate", KeyType::Double, "3e-6", 0, true},
    {"train.scheduler", KeyType::Choice, "linear", 0, false, 0, false,
     "linear,cosine,constant"},
    {"train.epochs", KeyType::Int, "2", 1, true},
    {"train.format", KeyType::String, "chatbot-style"},
};

const KeySpec* find_spec(const std::string& key) {
    for (const auto& spec : kRegistry)
        if (key == spec.key) return &spec;
    return nullptr;
}

bool parse_bool(const std::string& v, bool& out) {
    std::string low = util::lower(v);
    if (low == "on" || low == "true" || low == "1" || low == "yes") {
        out = true;
        return true;
    }
    if (low == "off" || low == "false" || low == "0" || low == "no") {
        out = false;
        return true;
    }
    return false;
}

void validate(const KeySpec& spec, const std::string& value) {
    auto fail = [&](const std::string& why) {
        throw Error(Errc::ConfigError,
                    "bad value \"" + value + "\" for " + spec.key + ": " + why);
    };
    switch (spec.type) {
    case KeyType::Int: {
        errno = 0;
        char* end = nullptr;
        long long v = std::strtoll(value.c_str(), &end, 10);
        if (errno != 0 || end == value.c_str() || *end != '\0') fail("not an integer");
        if (spec.has_min && v < static_cast<long long>(spec.min))
            fail("must be at least " + std::to_string(static_cast<long long>(spec.min)));
        if (spec.has_max && v > static_cast<long long>(spec.max))
            fail("must be at most " + std::to_string(static_cast<long long>(spec.max)));
        break;
    }
    case KeyType::Double: {
        errno = 0;
        char* end = nullptr;
        double v = std::strtod(value.c_str(), &end);
        if (errno != 0 || end == value.c_str() || *end != '\0') fail("not a number");
        if (spec.has_min && v < spec.min) fail("must be at least " + std::to_string(spec.min));
        if (spec.has_max && v > spec.max) fail("must be at most " + std::to_string(spec.max));
        break;
    }
    case KeyType::Bool: {
        bool b;
        if (!parse_bool(value, b)) fail("expected on/off");
        break;
    }
    case KeyType::String:
        break;
    case KeyType::Choice: {
        std::string choices = spec.choices;
        std::size_t start = 0;
        bool ok = false;
        while (start <= choices.size()) {
            std::size_t comma = choices.find(',', start);
            std::string choice = comma == std::string::npos ? choices.substr(start)
                                                            : choices.substr(start, comma - start);
            if (value == choice) {
                ok = true;
                break;
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!ok) fail("expected one of " + choices);
        break;
    }
    }
}

std::string env_name(const std::string& key) {
    std::string name = "SCIFORGE_" + key;
    for (char& c : name) {
        if (c == '.') c = '_';
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return name;
}

} // namespace

PipelineConfig::PipelineConfig() {
    for (const auto& spec : kRegistry) values_[spec.key] = spec.default_value;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    const KeySpec* spec = find_spec(key);
    if (!spec) throw Error(Errc::ConfigError, "unknown config key \"" + key + "\"");
    validate(*spec, value);
    values_[key] = value;
}

void PipelineConfig::load_file(const std::string& path) {
    std::vector<std::string> lines = util::split_lines(util::read_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = util::trim(lines[i]);
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::ConfigError, path + ":" + std::to_string(i + 1) +
                                               ": expected key = value");
        try {
            set(util::trim(line.substr(0, eq)), util::trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            throw Error(Errc::ConfigError,
                        path + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
}

void PipelineConfig::load_env() {
    for (const auto& spec : kRegistry) {
        const char* v = std::getenv(env_name(spec.key).c_str());
        if (v) set(spec.key, v);
    }
}

const std::string& PipelineConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw Error(Errc::ConfigError, "unknown config key \"" + key + "\"");
    return it->second;
}

long long PipelineConfig::get_int(const std::string& key) const {
    return std::strtoll(get(key).c_str(), nullptr, 10);
}

double PipelineConfig::get_double(const std::string& key) const {
    return std::strtod(get(key).c_str(), nullptr);
}

bool PipelineConfig::get_bool(const std::string& key) const {
    bool b = false;
    parse_bool(get(key), b);
    return b;
}

bool PipelineConfig::is_default(const std::string& key) const {
    const KeySpec* spec = find_spec(key);
    if (!spec) throw Error(Errc::ConfigError, "unknown config key \"" + key + "\"");
    return get(key) == spec->default_value;
}

std::vector<std::string> PipelineConfig::keys() const {
    std::vector<std::string> out;
    out.reserve(std::size(kRegistry));
    for (const auto& spec : kRegistry) out.push_back(spec.key);
    return out;
}

std::string api_key_from_env() {
    const char* key = std::getenv("SCIFORGE_API_KEY");
    return key ? key : "";
}

} // namespace sciforge
