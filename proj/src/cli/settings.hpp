#pragma once

#include <map>
#include <string>

namespace cli {

// Flat key=value settings file: one pair per line, '#' comments, blank lines
// ignored, keys unique. Values keep interior whitespace; edges are trimmed.
// All failures throw std::runtime_error with the offending location.
class Settings {
  public:
    static Settings from_file(const std::string& path);
    static Settings from_string(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    // Deterministic serialization, keys sorted; input to run digests.
    std::string canonical() const;

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace cli
