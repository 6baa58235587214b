#ifndef HETERO_CSV_HPP
#define HETERO_CSV_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hetero {

/// In-memory CSV table: header row plus string cells, RFC-4180 style.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or nullopt when absent.
    std::optional<std::size_t> column(const std::string& name) const;
};

/// Parse RFC-4180 CSV (quoted fields, "" escapes, LF or CRLF line ends).
/// Throws MalformedCsv on unbalanced quotes or ragged rows.
CsvTable read_csv(std::istream& in);

/// Throws IoFailure when the file cannot be opened.
CsvTable read_csv_file(const std::string& path);

/// Write one CSV row, quoting fields that contain separators or quotes.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Format a double with enough digits to round-trip exactly.
std::string format_double(double v);

} // namespace hetero

#endif // HETERO_CSV_HPP
