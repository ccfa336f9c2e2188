#pragma once

// PathSet <-> CSV: wide layout, one row per (path, step):
//   path,step,time,<name 0>,<name 1>,...

#include <ostream>
#include <string>
#include <vector>

#include "becor/io/csv.hpp"
#include "becor/sim/paths.hpp"

namespace becor {

inline void write_paths_csv(std::ostream& out, const PathSet& ps,
                            const std::vector<std::string>& names = {}) {
    out << "path,step,time";
    for (std::size_t i = 0; i < ps.n_names; ++i)
        out << "," << (i < names.size() ? names[i] : "name" + std::to_string(i));
    out << "\n";
    for (std::size_t p = 0; p < ps.n_paths; ++p) {
        for (std::size_t m = 0; m < ps.times.size(); ++m) {
            out << p << "," << m << "," << format_number(ps.times[m]);
            for (std::size_t i = 0; i < ps.n_names; ++i)
                out << "," << format_number(ps.at(p, m, i));
            out << "\n";
        }
    }
}

inline PathSet read_paths_csv(const CsvTable& t) {
    require_shape(t.header.size() >= 4 && t.header[0] == "path" &&
                      t.header[1] == "step" && t.header[2] == "time",
                  "read_paths_csv: expected header path,step,time,<names...>");
    PathSet ps;
    ps.n_names = t.header.size() - 3;
    std::size_t max_path = 0, max_step = 0;
    for (const auto& row : t.rows) {
        max_path = std::max(max_path, static_cast<std::size_t>(
                                          parse_number(row[0], "path index")));
        max_step = std::max(max_step, static_cast<std::size_t>(
                                          parse_number(row[1], "step index")));
    }
    ps.n_paths = max_path + 1;
    ps.times.assign(max_step + 1, 0.0);
    ps.q.assign(ps.n_paths * ps.times.size() * ps.n_names, -1.0);
    for (const auto& row : t.rows) {
        require_shape(row.size() == t.header.size(), "read_paths_csv: ragged row");
        const auto p = static_cast<std::size_t>(parse_number(row[0], "path index"));
        const auto m = static_cast<std::size_t>(parse_number(row[1], "step index"));
        ps.times[m] = parse_number(row[2], "time");
        for (std::size_t i = 0; i < ps.n_names; ++i)
            ps.at(p, m, i) = parse_number(row[3 + i], "survival probability");
    }
    for (double v : ps.q)
        require_domain(v >= 0.0, "read_paths_csv: missing (path, step) rows");
    return ps;
}

} // namespace becor
