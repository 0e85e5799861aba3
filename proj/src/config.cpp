#include "fsat/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fsat {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    ConfigMap cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

void ConfigMap::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string ConfigMap::lookup(const std::string& key, const std::string& fallback, bool required) {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        if (required) throw ConfigError("config: missing required key '" + key + "'");
        effective_[key] = fallback;
        return fallback;
    }
    consumed_.insert(key);
    effective_[key] = it->second;
    return it->second;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) {
    return lookup(key, fallback, false);
}

std::string ConfigMap::require_string(const std::string& key) { return lookup(key, "", true); }

double ConfigMap::get_double(const std::string& key, double fallback) {
    const std::string s = lookup(key, std::to_string(fallback), false);
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a number: '" + s + "'");
    }
}

int ConfigMap::get_int(const std::string& key, int fallback) {
    const std::string s = lookup(key, std::to_string(fallback), false);
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an integer: '" + s + "'");
    }
}

std::uint64_t ConfigMap::get_uint64(const std::string& key, std::uint64_t fallback) {
    const std::string s = lookup(key, std::to_string(fallback), false);
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an unsigned integer: '" + s + "'");
    }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) {
    const std::string s = lookup(key, fallback ? "true" : "false", false);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean: '" + s + "'");
}

std::vector<std::string> ConfigMap::get_list(const std::string& key) {
    return split_list(lookup(key, "", false), ',');
}

void ConfigMap::reject_unknown_keys() const {
    for (const auto& [key, value] : values_) {
        if (!consumed_.count(key))
            throw ConfigError("config: unknown key '" + key + "'");
    }
}

void ConfigMap::dump_effective(const std::filesystem::path& path) const {
    std::ostringstream out;
    for (const auto& [key, value] : effective_) out << key << " = " << value << "\n";
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("config: cannot write " + path.string());
    const std::string s = out.str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("config: short write to " + path.string());
}

}  // namespace fsat
