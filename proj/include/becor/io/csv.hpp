#pragma once

// Minimal CSV plumbing: header + rows, comma separator, no quoting (the file
// formats here never need it), numbers printed with 12 significant digits and
// no locale.

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "becor/errors.hpp"

namespace becor {

inline std::string format_number(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(12);
    os << v;
    return os.str();
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return static_cast<int>(j);
        return -1;
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        std::size_t a = 0, b = f.size();
        while (a < b && std::isspace(static_cast<unsigned char>(f[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(f[b - 1]))) --b;
        f = f.substr(a, b - a);
    }
    return out;
}

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("read_csv_file: cannot open '" + path + "'");
    return read_csv(in);
}

inline void write_csv(std::ostream& out, const CsvTable& t) {
    for (std::size_t j = 0; j < t.header.size(); ++j)
        out << (j ? "," : "") << t.header[j];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << "\n";
    }
}

inline double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw DomainError("cannot parse " + what + " from '" + s + "'");
    }
}

} // namespace becor
