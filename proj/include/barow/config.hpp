#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "barow/dates.hpp"

namespace barow::cli {

/// Flat `key = value` file: '#' lines are comments, keys may repeat, later
/// single-value reads see the last occurrence. Every typed read is recorded
/// (defaults included) so a run can echo the exact configuration it used.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, std::string origin = "<inline>");

    /// Replaces all occurrences of `key` (command-line flags win over file keys).
    void override_value(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& def) const;
    std::optional<std::string> get_optional_string(const std::string& key) const;
    double get_double(const std::string& key, double def) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    std::size_t get_size(const std::string& key, std::size_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    Date get_date(const std::string& key, const Date& def) const;
    std::optional<Date> get_optional_date(const std::string& key) const;

    /// All occurrences of a repeated key, in file order.
    std::vector<std::string> get_values(const std::string& key) const;
    /// Comma-separated numbers out of a single value.
    std::vector<double> get_double_list(const std::string& key) const;

    /// Manifest extras computed by the command (resolved model list etc.).
    void note(const std::string& key, const std::string& value) const;

    /// Rejects file keys outside the known set (typo guard).
    void ensure_known(const std::vector<std::string>& known_keys) const;

    /// Everything read or noted, sorted by key.
    const std::map<std::string, std::string>& resolved() const { return resolved_; }
    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::vector<std::pair<std::string, std::string>> entries_;  // file order
    mutable std::map<std::string, std::string> resolved_;

    const std::string* find_last(const std::string& key) const;
};

std::string format_double_full(double v);  // %.17g

} // namespace barow::cli
