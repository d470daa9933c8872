#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace pswb {

/// Flat `key = value` settings, one per line, `#` starts a comment.
class Config {
public:
    static Config parse(std::istream& in, const std::string& origin = "<config>")
    {
        Config c;
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(origin + ":" + std::to_string(no) + ": expected key = value");
            std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
            if (key.empty()) throw ParseError(origin + ":" + std::to_string(no) + ": empty key");
            c.values_[key] = value;
        }
        return c;
    }

    static Config parse_string(const std::string& text)
    {
        std::istringstream in(text);
        return parse(in);
    }

    static Config load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open config " + path);
        return parse(in, path);
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get(const std::string& key, const std::string& fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : to_number<double>(key, it->second);
    }

    int get_int(const std::string& key, int fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : to_number<int>(key, it->second);
    }

    bool get_bool(const std::string& key, bool fallback) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
        if (it->second == "false" || it->second == "0" || it->second == "no") return false;
        throw ParseError("config key " + key + ": expected a boolean, got '" + it->second + "'");
    }

    /// Comma separated numbers.
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_number<double>(key, trim(item)));
        return out;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

    /// Sorted `key = value` lines, parseable again.
    std::string dump() const
    {
        std::string out;
        for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
        return out;
    }

private:
    std::map<std::string, std::string> values_;

    static std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    }

    template <class T>
    static T to_number(const std::string& key, const std::string& text)
    {
        std::istringstream in(text);
        T v{};
        in >> v;
        if (in.fail() || !(in >> std::ws).eof())
            throw ParseError("config key " + key + ": cannot read '" + text + "' as a number");
        return v;
    }
};

} // namespace pswb
