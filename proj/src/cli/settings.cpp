#include "cli/settings.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cli {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

Settings Settings::from_string(const std::string& text, const std::string& origin) {
    Settings s;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        if (s.values_.count(key))
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                                     key + "'");
        s.values_[key] = trim(t.substr(eq + 1));
    }
    return s;
}

Settings Settings::from_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return from_string(buf.str(), path);
}

std::string Settings::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("missing setting '" + key + "'");
    return it->second;
}

std::string Settings::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long Settings::get_long(const std::string& key) const {
    std::string v = get(key);
    size_t used = 0;
    long out = 0;
    try {
        out = std::stol(v, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("setting '" + key + "' is not an integer: " + v);
    }
    if (used != v.size()) throw std::runtime_error("setting '" + key + "' is not an integer: " + v);
    return out;
}

long Settings::get_long(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
}

std::string Settings::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += "=";
        out += v;
        out += "\n";
    }
    return out;
}

}  // namespace cli
