#include "opdyn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <cmath>

extern char** environ;

namespace opdyn {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        cfg.entries_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

void KeyValueConfig::apply_env_overrides() {
    for (char** e = environ; *e; ++e) {
        const std::string entry(*e);
        if (entry.rfind("OPDYN_", 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(6, eq - 6);
        // Env names use '_' where keys use '.' or '-'; match against known
        // keys first, otherwise treat single '_' as '.'.
        std::string matched;
        for (const auto& [key, _] : entries_) {
            std::string mangled = key;
            for (char& c : mangled)
                if (c == '.' || c == '-') c = '_';
            if (mangled == name) {
                matched = key;
                break;
            }
        }
        if (matched.empty()) {
            matched = name;
            for (char& c : matched)
                if (c == '_') c = '.';
        }
        entries_[matched] = entry.substr(eq + 1);
    }
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const {
    return entries_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': not a number: '" +
                          it->second + "'");
    }
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': not an integer: '" +
                          it->second + "'");
    }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': not an integer: '" +
                          it->second + "'");
    }
}

std::vector<double> KeyValueConfig::get_doubles(
    const std::string& key, const std::vector<double>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(trim(tok)));
        } catch (...) {
            throw ConfigError("config key '" + key + "': bad list entry '" +
                              tok + "'");
        }
    }
    if (out.empty())
        throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<long> KeyValueConfig::get_longs(
    const std::string& key, const std::vector<long>& fallback) const {
    const auto ds = get_doubles(key, {});
    if (ds.empty()) return fallback;
    std::vector<long> out;
    for (double d : ds) out.push_back(std::lround(d));
    return out;
}

std::string KeyValueConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

}  // namespace opdyn
