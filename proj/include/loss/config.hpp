#pragma once

#include <map>
#include <string>
#include <vector>

namespace loss {

enum class ValueType { integer, real, boolean, word, real_list, word_list };

struct KeySpec {
    std::string pattern; // '*' matches one dotted segment made of digits
    ValueType type;
    std::vector<std::string> choices; // allowed words, empty = any
};

/// Flat `key = value` configuration. `[section]` lines prefix the keys that follow.
/// Values are validated against a schema and stored in canonical form.
class Config {
public:
    explicit Config(const std::vector<KeySpec>* schema = nullptr) : schema_(schema) {}

    static Config parse(const std::string& text, const std::vector<KeySpec>& schema, const std::string& source = "config");
    static Config load(const std::string& path, const std::vector<KeySpec>& schema);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void erase(const std::string& key) { values_.erase(key); }
    const std::map<std::string, std::string>& values() const { return values_; }

    long get_int(const std::string& key, long fallback) const;
    double get_real(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_word(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_reals(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> get_words(const std::string& key, const std::vector<std::string>& fallback) const;

    /// Sorted `key = value` lines; parse(dump()) reproduces the same config.
    std::string dump() const;

private:
    std::string normalize(const std::string& key, const std::string& value) const;
    const KeySpec* find_spec(const std::string& key) const;

    const std::vector<KeySpec>* schema_;
    std::map<std::string, std::string> values_;
};

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

} // namespace loss
