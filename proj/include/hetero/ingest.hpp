#ifndef HETERO_INGEST_HPP
#define HETERO_INGEST_HPP

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hetero {

/// One firm-year survey row. Monetary fields hold the WBES proxies:
/// sales = d2 (output Y), capital = n7a (capital stock K),
/// labor_cost = n2a (labor L). Values start in local currency and become
/// real USD after preprocessing; dirty cells are represented as missing.
struct SurveyRecord {
    std::string firm_id;
    std::string country;
    int year = 0;                          // calendar year, [1900, 2100]
    std::string isic;                      // 2-digit division code
    std::optional<int> fiscal_close_month; // 1..12
    std::optional<double> sales;
    std::optional<double> capital;
    std::optional<double> labor_cost;
};

/// A complete (Y, K, L) triple in common real currency units. Only records
/// with all three fields present and strictly positive become observations.
struct FirmObservation {
    double y = 0;
    double k = 0;
    double l = 0;
};

/// Panel identifier. Ordered by (isic, country, year), which fixes the
/// ordering of every panel-keyed report.
struct PanelKey {
    std::string country;
    std::string isic;
    int year = 0;

    friend bool operator==(const PanelKey& a, const PanelKey& b) = default;
    friend std::strong_ordering operator<=>(const PanelKey& a, const PanelKey& b) {
        if (auto c = a.isic <=> b.isic; c != 0) return c;
        if (auto c = a.country <=> b.country; c != 0) return c;
        return a.year <=> b.year;
    }
};

using PanelMap = std::map<PanelKey, std::vector<FirmObservation>>;

struct AvailabilityTable {
    std::map<PanelKey, std::size_t> cells;
    double threshold = 100.0;
    std::size_t total = 0; // qualifying observations across all panels
};

enum class Variable { Y, K, L };

const char* variable_name(Variable v);

struct SummaryStats {
    Variable variable = Variable::Y;
    std::size_t count = 0;
    double mean = 0;
    double std_dev = 0; // population convention (denominator n)
    double min = 0;
    double max = 0;
};

/// Maps logical column names (country, year, isic, d2, n7a, n2a, and
/// optionally firm_id, fiscal_close_month) to actual CSV header names.
using ColumnMap = std::map<std::string, std::string>;

/// The default map assumes the logical names appear verbatim in the header.
ColumnMap default_column_map();

/// Parse a survey CSV into records, one per data row, preserving row order.
/// Unparseable or negative monetary cells become missing, never errors;
/// broken key fields (year, isic) are structural and raise MalformedCsv.
/// Throws MissingColumn when a mapped required column is absent.
std::vector<SurveyRecord> parse_survey_csv(std::istream& in, const ColumnMap& columns);
std::vector<SurveyRecord> parse_survey_csv(std::istream& in);

struct PanelBuildResult {
    PanelMap panels;
    std::size_t dropped = 0; // records missing any of Y, K, L (or nonpositive)
};

/// Group complete records into (country, isic, year) panels. Records with a
/// missing or nonpositive monetary field are dropped and tallied, not raised.
PanelBuildResult build_panels(const std::vector<SurveyRecord>& records);

/// Count observations whose chosen variable exceeds the threshold, per
/// panel. Pivot rows are (isic, country) pairs and columns are years;
/// rows/columns whose counts are all zero are removed from the table.
AvailabilityTable availability_table(const PanelMap& panels, double threshold = 100.0,
                                     Variable variable = Variable::Y);

/// Population-style summary of one variable over a panel. Throws EmptyPanel.
SummaryStats summarize(const std::vector<FirmObservation>& panel, Variable variable);

} // namespace hetero

#endif // HETERO_INGEST_HPP
