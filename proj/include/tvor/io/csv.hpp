#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tvor/engine.hpp"
#include "tvor/error.hpp"
#include "tvor/histogram.hpp"
#include "tvor/records.hpp"

namespace tvor::io {

// ---------------------------------------------------------------------------
// Generic CSV
// ---------------------------------------------------------------------------

struct CsvRow {
    std::size_t line = 0;  ///< 1-based line in the source
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvRow> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    }
};

/// Splits one line on commas; double quotes enclose fields and "" escapes a quote.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ParseError(line_no, "unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

/// Reads a header row and data rows. Blank lines are skipped; every row must
/// have as many fields as the header.
inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (line.empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                          std::to_string(fields.size()));
        }
        table.rows.push_back({line_no, std::move(fields)});
    }
    if (!have_header) throw ParseError(line_no, "missing header row");
    return table;
}

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

template <typename T>
std::optional<T> parse_integer(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

inline std::size_t require_column(const CsvTable& t, std::string_view name) {
    const auto c = t.column(name);
    if (!c) throw ParseError(1, "missing required column '" + std::string(name) + "'");
    return *c;
}

// ---------------------------------------------------------------------------
// Format A: list_id,year,count
// ---------------------------------------------------------------------------

/// Histograms in order of first appearance. Years absent from a list inside its
/// min..max range become zero bins.
inline std::vector<Histogram> parse_histograms(const CsvTable& t) {
    const auto c_list = require_column(t, "list_id");
    const auto c_year = require_column(t, "year");
    const auto c_count = require_column(t, "count");

    std::vector<std::string> order;
    std::map<std::string, std::map<int, Count>> bins;
    for (const auto& row : t.rows) {
        const auto& list = row.fields[c_list];
        if (list.empty()) throw ParseError(row.line, "empty list_id");
        const auto year = parse_integer<int>(row.fields[c_year]);
        if (!year) throw ParseError(row.line, "year '" + row.fields[c_year] + "' is not an integer");
        const auto count = parse_integer<std::int64_t>(row.fields[c_count]);
        if (!count) throw ParseError(row.line, "count '" + row.fields[c_count] + "' is not an integer");
        if (*count < 0) throw ParseError(row.line, "negative count for list '" + list + "'");
        auto [it, inserted] = bins.try_emplace(list);
        if (inserted) order.push_back(list);
        if (!it->second.emplace(*year, static_cast<Count>(*count)).second) {
            throw ParseError(row.line, "duplicate year " + std::to_string(*year) + " in list '" + list + "'");
        }
    }
    std::vector<Histogram> out;
    out.reserve(order.size());
    for (const auto& list : order) {
        const auto& m = bins[list];
        const int lo = m.begin()->first;
        const int hi = m.rbegin()->first;
        if (static_cast<std::int64_t>(hi) - lo + 1 > max_histogram_span) {
            throw InvalidArgument("year range of list '" + list + "' is too wide");
        }
        std::vector<Count> counts(static_cast<std::size_t>(hi - lo + 1), 0);
        for (const auto& [year, count] : m) counts[static_cast<std::size_t>(year - lo)] = count;
        out.emplace_back(list, lo, std::move(counts));
    }
    return out;
}

/// Every bin, zeros included, so re-ingesting reproduces the same histograms.
inline void write_histograms(std::ostream& out, std::span<const Histogram> histograms) {
    out << "list_id,year,count\n";
    for (const auto& h : histograms) {
        const auto label = csv_escape(h.label());
        for (std::size_t i = 0; i < h.bins(); ++i) {
            out << label << ',' << h.origin() + static_cast<int>(i) << ',' << h.counts()[i] << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Format B: id,list_id,birth_year,alt_years,attr:*
// ---------------------------------------------------------------------------

inline constexpr std::string_view attribute_prefix = "attr:";

struct RecordIngest {
    RecordSet records;
    std::size_t without_birth_year = 0;
};

inline RecordIngest parse_records(const CsvTable& t) {
    const auto c_id = require_column(t, "id");
    const auto c_list = require_column(t, "list_id");
    const auto c_birth = require_column(t, "birth_year");
    const auto c_alt = require_column(t, "alt_years");
    std::vector<std::pair<std::size_t, std::string>> attr_cols;
    std::set<std::string> keys;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i].starts_with(attribute_prefix)) {
            auto key = t.header[i].substr(attribute_prefix.size());
            if (key.empty()) throw ParseError(1, "empty attribute column name");
            attr_cols.emplace_back(i, key);
            keys.insert(std::move(key));
        }
    }

    std::vector<PersonRecord> recs;
    recs.reserve(t.rows.size());
    std::set<std::string> ids;
    for (const auto& row : t.rows) {
        PersonRecord r;
        r.id = row.fields[c_id];
        if (r.id.empty()) throw ParseError(row.line, "empty id");
        if (!ids.insert(r.id).second) throw ParseError(row.line, "duplicate id '" + r.id + "'");
        r.list_id = row.fields[c_list];
        const auto& birth = row.fields[c_birth];
        if (!birth.empty()) {
            const auto y = parse_integer<int>(birth);
            if (!y) throw ParseError(row.line, "birth_year '" + birth + "' is not an integer");
            r.birth_year = *y;
        }
        std::string_view alts = row.fields[c_alt];
        while (!alts.empty()) {
            const auto pos = alts.find(';');
            const auto token = alts.substr(0, pos);
            const auto y = parse_integer<int>(token);
            if (!y) throw ParseError(row.line, "alt_years entry '" + std::string(token) + "' is not an integer");
            r.alternative_years.push_back(*y);
            if (pos == std::string_view::npos) break;
            alts.remove_prefix(pos + 1);
        }
        for (const auto& [col, key] : attr_cols) {
            if (!row.fields[col].empty()) r.attributes.emplace(key, row.fields[col]);
        }
        recs.push_back(std::move(r));
    }
    RecordIngest ingest;
    ingest.records = RecordSet(std::move(recs), std::move(keys));
    ingest.without_birth_year = ingest.records.missing_birth_years();
    return ingest;
}

inline void write_records(std::ostream& out, const RecordSet& rs) {
    out << "id,list_id,birth_year,alt_years";
    for (const auto& k : rs.attribute_keys()) out << ',' << csv_escape(std::string(attribute_prefix) + k);
    out << '\n';
    for (const auto& r : rs.records()) {
        out << csv_escape(r.id) << ',' << csv_escape(r.list_id) << ',';
        if (r.birth_year) out << *r.birth_year;
        out << ',';
        for (std::size_t i = 0; i < r.alternative_years.size(); ++i) {
            if (i) out << ';';
            out << r.alternative_years[i];
        }
        for (const auto& k : rs.attribute_keys()) {
            out << ',';
            if (const auto* v = r.attribute(k)) out << csv_escape(*v);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_csv(in);
}

inline std::vector<Histogram> load_histograms(const std::string& path) { return parse_histograms(read_csv_file(path)); }

inline Dataset load_dataset(const std::string& path, Count min_size_filter = Dataset::default_min_size) {
    return Dataset(load_histograms(path), min_size_filter);
}

inline RecordIngest load_records(const std::string& path) { return parse_records(read_csv_file(path)); }

}  // namespace tvor::io
