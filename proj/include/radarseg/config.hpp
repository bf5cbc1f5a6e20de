// Flat key-value configuration text: one `key = value` per line, dotted
// section keys, `#` comments. No environment-variable overrides; a config
// file plus command-line flags fully determine a run. Serialization emits
// sorted keys so configs round-trip losslessly and hash stably.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radarseg/common.hpp"

namespace radarseg {

class FlatConfig {
public:
    FlatConfig() = default;

    static FlatConfig parse(const std::string& text);
    static FlatConfig load(const std::string& path);

    std::string serialize() const;
    std::uint64_t hash() const { return fnv1a(serialize()); }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, std::int64_t value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;  ///< comma separated

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace radarseg
