#include "loss/config.hpp"

#include "loss/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace loss {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ','))
        out.push_back(trim(cur));
    return out;
}

bool matches(const std::string& pattern, const std::string& key)
{
    std::size_t p = 0, k = 0;
    while (p < pattern.size() && k < key.size()) {
        if (pattern[p] == '*') {
            const std::size_t start = k;
            while (k < key.size() && std::isdigit(static_cast<unsigned char>(key[k])))
                ++k;
            if (k == start)
                return false;
            ++p;
        } else {
            if (pattern[p] != key[k])
                return false;
            ++p;
            ++k;
        }
    }
    return p == pattern.size() && k == key.size();
}

double parse_real(const std::string& s, const std::string& key)
{
    double v = 0.0;
    const std::string t = trim(s);
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v))
        fail(ErrorCode::config, "'" + key + "' expects a real number, got '" + s + "'");
    return v;
}

long parse_int(const std::string& s, const std::string& key)
{
    long v = 0;
    const std::string t = trim(s);
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
        fail(ErrorCode::config, "'" + key + "' expects an integer, got '" + s + "'");
    return v;
}

} // namespace

std::string format_real(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

const KeySpec* Config::find_spec(const std::string& key) const
{
    if (!schema_)
        return nullptr;
    for (const auto& s : *schema_)
        if (matches(s.pattern, key))
            return &s;
    return nullptr;
}

std::string Config::normalize(const std::string& key, const std::string& raw) const
{
    const KeySpec* spec = find_spec(key);
    if (!spec)
        fail(ErrorCode::config, "unknown key '" + key + "'");
    const std::string v = trim(raw);
    switch (spec->type) {
    case ValueType::integer:
        return std::to_string(parse_int(v, key));
    case ValueType::real:
        return format_real(parse_real(v, key));
    case ValueType::boolean: {
        std::string l = v;
        std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
        if (l == "true" || l == "1" || l == "yes" || l == "on")
            return "true";
        if (l == "false" || l == "0" || l == "no" || l == "off")
            return "false";
        fail(ErrorCode::config, "'" + key + "' expects true or false, got '" + raw + "'");
    }
    case ValueType::word: {
        if (v.empty())
            fail(ErrorCode::config, "'" + key + "' needs a value");
        if (!spec->choices.empty() && std::find(spec->choices.begin(), spec->choices.end(), v) == spec->choices.end())
            fail(ErrorCode::config, "'" + key + "' does not accept '" + v + "'");
        return v;
    }
    case ValueType::real_list: {
        std::string out;
        for (const auto& item : split_list(v)) {
            if (!out.empty())
                out += ", ";
            out += format_real(parse_real(item, key));
        }
        if (out.empty())
            fail(ErrorCode::config, "'" + key + "' needs at least one value");
        return out;
    }
    case ValueType::word_list: {
        std::string out;
        for (const auto& item : split_list(v)) {
            if (item.empty())
                fail(ErrorCode::config, "'" + key + "' has an empty list item");
            if (!spec->choices.empty() &&
                std::find(spec->choices.begin(), spec->choices.end(), item) == spec->choices.end())
                fail(ErrorCode::config, "'" + key + "' does not accept '" + item + "'");
            if (!out.empty())
                out += ", ";
            out += item;
        }
        if (out.empty())
            fail(ErrorCode::config, "'" + key + "' needs at least one value");
        return out;
    }
    }
    fail(ErrorCode::internal, "unhandled value type");
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = normalize(key, value); }

Config Config::parse(const std::string& text, const std::vector<KeySpec>& schema, const std::string& source)
{
    Config c(&schema);
    std::istringstream is(text);
    std::string line, section;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        try {
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3)
                    fail(ErrorCode::config, "malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                fail(ErrorCode::config, "expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            if (key.empty())
                fail(ErrorCode::config, "empty key");
            if (!section.empty())
                key = section + "." + key;
            if (c.has(key))
                fail(ErrorCode::config, "duplicate key '" + key + "'");
            c.set(key, line.substr(eq + 1));
        } catch (const Error& e) {
            fail(ErrorCode::config, source + ":" + std::to_string(no) + ": " + e.what());
        }
    }
    return c;
}

Config Config::load(const std::string& path, const std::vector<KeySpec>& schema)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::io, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), schema, path);
}

long Config::get_int(const std::string& key, long fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_int(it->second, key);
}

double Config::get_real(const std::string& key, double fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_real(it->second, key);
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second == "true";
}

std::string Config::get_word(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::vector<double> Config::get_reals(const std::string& key, const std::vector<double>& fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    std::vector<double> out;
    for (const auto& s : split_list(it->second))
        out.push_back(parse_real(s, key));
    return out;
}

std::vector<std::string> Config::get_words(const std::string& key, const std::vector<std::string>& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : split_list(it->second);
}

std::string Config::dump() const
{
    std::string out;
    for (const auto& [k, v] : values_)
        out += k + " = " + v + "\n";
    return out;
}

} // namespace loss
