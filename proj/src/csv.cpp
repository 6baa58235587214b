#include "hetero/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hetero/errors.hpp"

namespace hetero {

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

namespace {

// Splits the full stream into records, honoring quotes that span newlines.
std::vector<std::vector<std::string>> parse_records(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool any_char = false;

    auto end_field = [&] {
        fields.push_back(field);
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(fields));
        fields.clear();
        any_char = false;
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            any_char = true;
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || field_was_quoted) {
                throw MalformedCsv("stray quote inside unquoted field at record " +
                                   std::to_string(records.size() + 1));
            }
            in_quotes = true;
            field_was_quoted = true;
            any_char = true;
            break;
        case ',':
            end_field();
            any_char = true;
            break;
        case '\r':
            break; // paired with the following \n; lone \r is tolerated
        case '\n':
            if (any_char || !fields.empty()) end_record();
            break;
        default:
            field.push_back(c);
            any_char = true;
        }
    }
    if (in_quotes) throw MalformedCsv("unterminated quoted field at end of input");
    if (any_char || !fields.empty()) end_record();
    return records;
}

} // namespace

CsvTable read_csv(std::istream& in) {
    auto records = parse_records(in);
    CsvTable table;
    if (records.empty()) return table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw MalformedCsv("row " + std::to_string(r) + " has " +
                               std::to_string(records[r].size()) + " fields, expected " +
                               std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    return read_csv(in);
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n\r") != std::string::npos) {
            out << '"';
            for (char c : f) {
                if (c == '"') out << "\"\"";
                else out << c;
            }
            out << '"';
        } else {
            out << f;
        }
    }
    out << '\n';
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    write_csv_row(out, header);
    for (const auto& row : rows) write_csv_row(out, row);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace hetero
