#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace marc {

// Configuration problem tied to a specific key so the CLI can point at the
// offending line rather than dumping the whole schema.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field_name, const std::string& message)
        : std::runtime_error(field_name + ": " + message), field(field_name) {}
    std::string field;
};

enum class Scheme { Marc, Marc3, Direct, Alamouti };

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Marc: return "marc";
        case Scheme::Marc3: return "marc3";
        case Scheme::Direct: return "direct";
        case Scheme::Alamouti: return "alamouti";
    }
    return "?";
}

struct SweepConfig {
    Scheme scheme = Scheme::Marc;
    bool coded = false;
    std::vector<double> snr_grid_db;
    std::uint64_t max_frames = 10000000;
    std::uint64_t target_bit_errors = 200;
    int k = 50;
    std::vector<unsigned> code_generators = {5, 7, 7};
    int constraint_length = 3;
    bool urc_ideal = true;
    double urc_offset_db = 0.0;
    bool genie_sic = false;
    std::uint64_t seed = 12345;
    int workers = 1;

    void validate() const {
        if (snr_grid_db.empty()) throw ConfigError("snr_grid_db", "grid must be nonempty");
        if (max_frames == 0) throw ConfigError("max_frames", "must be positive");
        if (max_frames > (std::uint64_t{1} << 40))
            throw ConfigError("max_frames", "must be at most 2^40");
        if (target_bit_errors == 0) throw ConfigError("target_bit_errors", "must be positive");
        if (k <= 0 || k > 100000) throw ConfigError("k", "must lie in [1, 100000]");
        if (workers < 1 || workers > 256) throw ConfigError("workers", "must lie in [1, 256]");
        if (coded && code_generators.empty()) throw ConfigError("code", "coded run needs generators");
        if (scheme == Scheme::Marc3 && coded)
            throw ConfigError("coded", "three-user mode is uncoded only");
        if (!urc_ideal && !coded)
            throw ConfigError("urc_offset_db",
                              "uncoded runs assume an ideal relay link; use urc_offset_db = ideal");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

inline double parse_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a real number, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(key, "trailing characters in '" + v + "'");
    return out;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a nonnegative integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(key, "trailing characters in '" + v + "'");
    return out;
}

inline unsigned parse_octal(const std::string& key, const std::string& v) {
    if (v.empty()) throw ConfigError(key, "empty generator");
    unsigned out = 0;
    for (char c : v) {
        if (c < '0' || c > '7') throw ConfigError(key, "generators are octal, got '" + v + "'");
        out = out * 8 + static_cast<unsigned>(c - '0');
    }
    return out;
}

}  // namespace detail

// Flat key = value text, one pair per line, '#' starts a comment. Every key
// must belong to the schema; anything else is rejected so a typo cannot
// silently fall back to a default.
inline std::map<std::string, std::string> parse_flat_kv(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "missing key");
        if (out.count(key)) throw ConfigError(key, "duplicate key");
        out[key] = value;
    }
    return out;
}

inline SweepConfig parse_sweep_config(const std::string& text) {
    const auto kv = parse_flat_kv(text);
    SweepConfig cfg;
    bool have_scheme = false, have_grid = false;
    for (const auto& [key, value] : kv) {
        if (key == "scheme") {
            have_scheme = true;
            if (value == "marc") cfg.scheme = Scheme::Marc;
            else if (value == "marc3") cfg.scheme = Scheme::Marc3;
            else if (value == "direct") cfg.scheme = Scheme::Direct;
            else if (value == "alamouti") cfg.scheme = Scheme::Alamouti;
            else throw ConfigError(key, "unknown scheme '" + value + "'");
        } else if (key == "coded") {
            cfg.coded = detail::parse_bool(key, value);
        } else if (key == "snr_grid_db") {
            have_grid = true;
            cfg.snr_grid_db.clear();
            for (const auto& item : detail::split(value, ',')) {
                if (item.empty()) throw ConfigError(key, "empty grid entry");
                cfg.snr_grid_db.push_back(detail::parse_real(key, item));
            }
        } else if (key == "max_frames") {
            cfg.max_frames = detail::parse_u64(key, value);
        } else if (key == "target_bit_errors") {
            cfg.target_bit_errors = detail::parse_u64(key, value);
        } else if (key == "k") {
            cfg.k = static_cast<int>(detail::parse_u64(key, value));
        } else if (key == "code") {
            cfg.code_generators.clear();
            for (const auto& item : detail::split(value, ','))
                cfg.code_generators.push_back(detail::parse_octal(key, item));
            if (cfg.code_generators.empty()) throw ConfigError(key, "need at least one generator");
            unsigned widest = 0;
            for (unsigned g : cfg.code_generators) widest |= g;
            cfg.constraint_length = 1;
            while ((1u << cfg.constraint_length) <= widest) ++cfg.constraint_length;
        } else if (key == "urc_offset_db") {
            if (value == "ideal") {
                cfg.urc_ideal = true;
            } else {
                cfg.urc_ideal = false;
                cfg.urc_offset_db = detail::parse_real(key, value);
            }
        } else if (key == "genie_sic") {
            cfg.genie_sic = detail::parse_bool(key, value);
        } else if (key == "seed") {
            cfg.seed = detail::parse_u64(key, value);
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(detail::parse_u64(key, value));
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    if (!have_scheme) throw ConfigError("scheme", "required key missing");
    if (!have_grid) throw ConfigError("snr_grid_db", "required key missing");
    cfg.validate();
    return cfg;
}

}  // namespace marc
