#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace opdyn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key=value configuration. Lines are `key = value`; '#' starts a
// comment. Any key can be overridden by an environment variable named
// OPDYN_<key> with '.' and '-' replaced by '_'.
class KeyValueConfig {
  public:
    KeyValueConfig() = default;
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    void apply_env_overrides();
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    std::uint64_t get_u64(const std::string& key,
                          std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;
    std::vector<long> get_longs(const std::string& key,
                                const std::vector<long>& fallback) const;

    // Sorted key=value lines; the basis of the config hash.
    std::string canonical() const;
    const std::map<std::string, std::string>& entries() const {
        return entries_;
    }

  private:
    std::map<std::string, std::string> entries_;
};

}  // namespace opdyn
