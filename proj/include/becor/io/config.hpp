#pragma once

// Flat key/section run-configuration text:
//
//   [section]
//   key = value
//   other_key = 1,2,3
//
// Sections map to CLI subcommands, keys to their flags. Parsing preserves
// order so parse -> emit -> parse is the identity; consumers reject unknown
// keys field by field.

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "becor/errors.hpp"
#include "becor/io/csv.hpp"

namespace becor {

struct RunConfig {
    struct Entry {
        std::string key;
        std::string value;
    };
    struct Section {
        std::string name;
        std::vector<Entry> entries;
    };
    std::vector<Section> sections;

    const Section* find(const std::string& name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }
};

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = RunConfig::trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw DomainError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            cfg.sections.push_back({RunConfig::trim(s.substr(1, s.size() - 2)), {}});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        if (cfg.sections.empty())
            throw DomainError("config line " + std::to_string(line_no) +
                              ": key outside any [section]");
        RunConfig::Entry e;
        e.key = RunConfig::trim(s.substr(0, eq));
        e.value = RunConfig::trim(s.substr(eq + 1));
        if (e.key.empty())
            throw DomainError("config line " + std::to_string(line_no) + ": empty key");
        for (const auto& prev : cfg.sections.back().entries)
            if (prev.key == e.key)
                throw DomainError("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + e.key + "'");
        cfg.sections.back().entries.push_back(std::move(e));
    }
    return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline std::string emit_config(const RunConfig& cfg) {
    std::ostringstream out;
    bool first = true;
    for (const auto& s : cfg.sections) {
        if (!first) out << "\n";
        first = false;
        out << "[" << s.name << "]\n";
        for (const auto& e : s.entries) out << e.key << " = " << e.value << "\n";
    }
    return out.str();
}

// Applies a section to a known-key lookup, rejecting anything unknown.
class ConfigSectionReader {
public:
    ConfigSectionReader(const RunConfig& cfg, const std::string& section,
                        std::set<std::string> known)
        : known_(std::move(known)) {
        const auto* s = cfg.find(section);
        if (!s) return;
        for (const auto& e : s->entries) {
            if (!known_.count(e.key))
                throw DomainError("config section [" + section + "]: unknown key '" +
                                  e.key + "'");
            entries_.push_back(e);
        }
    }

    bool has(const std::string& key) const {
        for (const auto& e : entries_)
            if (e.key == key) return true;
        return false;
    }
    std::string get(const std::string& key, const std::string& fallback = "") const {
        for (const auto& e : entries_)
            if (e.key == key) return e.value;
        return fallback;
    }
    double number(const std::string& key, double fallback) const {
        return has(key) ? parse_number(get(key), "config key '" + key + "'") : fallback;
    }

private:
    std::set<std::string> known_;
    std::vector<RunConfig::Entry> entries_;
};

inline std::vector<double> parse_number_list(const std::string& s,
                                             const std::string& what) {
    std::vector<double> out;
    std::string cur;
    auto flush = [&]() {
        if (!RunConfig::trim(cur).empty())
            out.push_back(parse_number(RunConfig::trim(cur), what));
        cur.clear();
    };
    for (char c : s) {
        if (c == ',') flush();
        else cur += c;
    }
    flush();
    return out;
}

} // namespace becor
