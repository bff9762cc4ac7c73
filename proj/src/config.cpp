#include "barow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "barow/errors.hpp"

namespace barow::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double_or_throw(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + text +
                                    "'");
    }
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size())
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + text +
                                    "'");
    return v;
}

} // namespace

std::string format_double_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidData("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

Config Config::parse_text(const std::string& text, std::string origin) {
    Config cfg;
    cfg.origin_ = std::move(origin);
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidData(cfg.origin_ + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw InvalidData(cfg.origin_ + ":" + std::to_string(line_no) + ": empty key");
        cfg.entries_.emplace_back(key, value);
    }
    return cfg;
}

void Config::override_value(const std::string& key, const std::string& value) {
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [&](const auto& e) { return e.first == key; }),
                   entries_.end());
    entries_.emplace_back(key, value);
}

const std::string* Config::find_last(const std::string& key) const {
    const std::string* hit = nullptr;
    for (const auto& [k, v] : entries_)
        if (k == key) hit = &v;
    return hit;
}

bool Config::has(const std::string& key) const { return find_last(key) != nullptr; }

std::string Config::get_string(const std::string& key, const std::string& def) const {
    const std::string* v = find_last(key);
    const std::string out = v ? *v : def;
    resolved_[key] = out;
    return out;
}

std::optional<std::string> Config::get_optional_string(const std::string& key) const {
    const std::string* v = find_last(key);
    if (!v) return std::nullopt;
    resolved_[key] = *v;
    return *v;
}

double Config::get_double(const std::string& key, double def) const {
    const std::string* v = find_last(key);
    const double out = v ? parse_double_or_throw(key, *v) : def;
    resolved_[key] = format_double_full(out);
    return out;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t def) const {
    const std::string* v = find_last(key);
    std::int64_t out = def;
    if (v) {
        std::size_t pos = 0;
        try {
            out = std::stoll(*v, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "': expected an integer, got '" +
                                        *v + "'");
        }
        if (pos != v->size())
            throw std::invalid_argument("config key '" + key + "': expected an integer, got '" +
                                        *v + "'");
    }
    resolved_[key] = std::to_string(out);
    return out;
}

std::size_t Config::get_size(const std::string& key, std::size_t def) const {
    const std::int64_t v = get_int(key, static_cast<std::int64_t>(def));
    if (v < 0)
        throw std::invalid_argument("config key '" + key + "': expected a nonnegative integer");
    return static_cast<std::size_t>(v);
}

bool Config::get_bool(const std::string& key, bool def) const {
    const std::string* v = find_last(key);
    bool out = def;
    if (v) {
        if (*v == "true" || *v == "1" || *v == "yes")
            out = true;
        else if (*v == "false" || *v == "0" || *v == "no")
            out = false;
        else
            throw std::invalid_argument("config key '" + key + "': expected true/false, got '" +
                                        *v + "'");
    }
    resolved_[key] = out ? "true" : "false";
    return out;
}

Date Config::get_date(const std::string& key, const Date& def) const {
    const std::string* v = find_last(key);
    Date out = def;
    if (v) {
        try {
            out = Date::parse(*v);
        } catch (const InvalidData&) {
            throw std::invalid_argument("config key '" + key + "': expected YYYY-MM-DD, got '" +
                                        *v + "'");
        }
    }
    resolved_[key] = out.to_string();
    return out;
}

std::optional<Date> Config::get_optional_date(const std::string& key) const {
    const std::string* v = find_last(key);
    if (!v) return std::nullopt;
    try {
        const Date out = Date::parse(*v);
        resolved_[key] = out.to_string();
        return out;
    } catch (const InvalidData&) {
        throw std::invalid_argument("config key '" + key + "': expected YYYY-MM-DD, got '" + *v +
                                    "'");
    }
}

std::vector<std::string> Config::get_values(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k == key) out.push_back(v);
    for (std::size_t i = 0; i < out.size(); ++i)
        resolved_[key + "." + std::to_string(i)] = out[i];
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    const std::string* v = find_last(key);
    if (!v) return {};
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const std::string t = trim(cell);
        if (t.empty())
            throw std::invalid_argument("config key '" + key + "': empty list element");
        out.push_back(parse_double_or_throw(key, t));
    }
    if (out.empty())
        throw std::invalid_argument("config key '" + key + "': expected a comma-separated list");
    resolved_[key] = *v;
    return out;
}

void Config::note(const std::string& key, const std::string& value) const {
    resolved_[key] = value;
}

void Config::ensure_known(const std::vector<std::string>& known_keys) const {
    for (const auto& [k, v] : entries_) {
        if (std::find(known_keys.begin(), known_keys.end(), k) == known_keys.end())
            throw std::invalid_argument("unknown config key '" + k + "' in " + origin_);
    }
}

} // namespace barow::cli
