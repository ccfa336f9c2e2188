#pragma once

// Quote-file ingestion: one MarketState per date. Columns: date, name,
// maturity_years, survival_prob OR hazard_rate, recovery; exactly one of the
// two probability conventions per file. Errors are row-addressed.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "becor/core/market.hpp"
#include "becor/errors.hpp"
#include "becor/io/csv.hpp"

namespace becor {

struct QuoteSeries {
    std::vector<std::string> dates;       // sorted, unique
    std::vector<MarketState> markets;     // aligned with dates
    std::vector<std::string> warnings;
};

inline QuoteSeries ingest_quotes(const CsvTable& t) {
    QuoteSeries out;
    if (t.rows.empty()) {
        out.warnings.push_back("quote file has no data rows");
        return out;
    }
    const int c_date = t.column("date");
    const int c_name = t.column("name");
    const int c_mat = t.column("maturity_years");
    const int c_q = t.column("survival_prob");
    const int c_h = t.column("hazard_rate");
    const int c_r = t.column("recovery");
    require_shape(c_date >= 0 && c_name >= 0 && c_mat >= 0 && c_r >= 0,
                  "ingest_quotes: need columns date, name, maturity_years, recovery");
    if ((c_q >= 0) == (c_h >= 0))
        throw DomainError("ingest_quotes: need exactly one of survival_prob or "
                          "hazard_rate");

    struct Row {
        std::string name;
        double maturity, q, recovery;
    };
    std::map<std::string, std::vector<Row>> by_date;
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = "row " + std::to_string(r + 2);
        if (row.size() != t.header.size())
            throw ShapeError("ingest_quotes: " + where + " has " +
                             std::to_string(row.size()) + " fields, header has " +
                             std::to_string(t.header.size()));
        Row q;
        const std::string date = row[c_date];
        q.name = row[c_name];
        if (!seen.insert({date, q.name}).second)
            throw DomainError("ingest_quotes: duplicate (date, name) = (" + date + ", " +
                              q.name + ") at " + where);
        q.maturity = parse_number(row[c_mat], where + " maturity_years");
        q.recovery = parse_number(row[c_r], where + " recovery");
        if (c_q >= 0) {
            q.q = parse_number(row[c_q], where + " survival_prob");
            if (q.q <= 0.0 || q.q >= 1.0)
                throw DomainError("ingest_quotes: survival_prob outside (0,1) at " +
                                  where);
        } else {
            const double h = parse_number(row[c_h], where + " hazard_rate");
            if (h < 0.0)
                throw DomainError("ingest_quotes: negative hazard_rate at " + where);
            q.q = survival_from_hazard(h, 0.0, q.maturity);
            if (q.q <= 0.0 || q.q >= 1.0)
                throw DomainError("ingest_quotes: hazard_rate maps outside (0,1) at " +
                                  where);
        }
        by_date[date].push_back(std::move(q));
    }

    for (auto& [date, rows] : by_date) {
        std::sort(rows.begin(), rows.end(),
                  [](const Row& a, const Row& b) { return a.name < b.name; });
        MarketState m;
        m.maturity = rows.front().maturity;
        m.t = 0.0;
        for (const auto& q : rows) {
            if (q.maturity != m.maturity)
                throw DomainError("ingest_quotes: mixed maturities on date " + date);
            m.names.push_back(q.name);
            m.survival.push_back(q.q);
            m.recovery.push_back(q.recovery);
            m.defaulted.push_back(false);
        }
        m.validate();
        out.dates.push_back(date);
        out.markets.push_back(std::move(m));
    }
    return out;
}

} // namespace becor
