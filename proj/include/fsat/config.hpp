#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fsat/errors.hpp"

namespace fsat {

// Flat `key = value` run configuration (# starts a comment). Every lookup
// records the resolved value, so dump_effective() writes the full picture
// including defaults; keys that were never consumed fail validation to catch
// typos.
class ConfigMap {
public:
    static ConfigMap load(const std::filesystem::path& path);
    static ConfigMap empty() { return ConfigMap{}; }

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback);
    std::string require_string(const std::string& key);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key, int fallback);
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::vector<std::string> get_list(const std::string& key);  // comma-separated

    // Throws ConfigError when the file contains keys nothing consumed.
    void reject_unknown_keys() const;

    void dump_effective(const std::filesystem::path& path) const;

private:
    std::string lookup(const std::string& key, const std::string& fallback, bool required);

    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
    std::map<std::string, std::string> effective_;
};

std::vector<std::string> split_list(const std::string& s, char sep);

}  // namespace fsat
