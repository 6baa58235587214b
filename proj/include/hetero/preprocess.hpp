#ifndef HETERO_PREPROCESS_HPP
#define HETERO_PREPROCESS_HPP

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hetero/ingest.hpp"

namespace hetero {

struct RateEntry {
    double exchange_rate = 1.0; // LCU per USD, period average
    double deflator = 1.0;      // price index relative to base year 2009
};

/// Exchange-rate and deflator lookup. Entries are keyed by country and
/// fiscal year, optionally by closing month (month 0 = annual entry).
/// A record carrying a fiscal_close_month resolves to the month-adjusted
/// entry when one exists and falls back to the annual entry otherwise.
class RateTable {
public:
    void insert(const std::string& country, int year, int month, RateEntry entry);
    const RateEntry* find(const std::string& country, int year,
                          std::optional<int> month) const;
    std::size_t size() const { return entries_.size(); }

    /// Columns: country, year, month (empty = annual), exchange_rate, deflator.
    static RateTable from_csv(std::istream& in);
    static RateTable from_csv_file(const std::string& path);

private:
    std::map<std::tuple<std::string, int, int>, RateEntry> entries_;
};

/// The 3-standard-deviation trimming rule. Level outliers are found on
/// ln(x+1) within (economy, broad-sector) groups; ratio outliers on ln(r)
/// within industry groups. Only manufacturing appears in this data, so the
/// default broad-sector key collapses to the economy alone.
struct OutlierPolicy {
    double sd_multiplier = 3.0;

    enum class LevelGrouping { economy_by_broad_sector };
    enum class RatioGrouping { industry };
    LevelGrouping level_grouping = LevelGrouping::economy_by_broad_sector;
    RatioGrouping ratio_grouping = RatioGrouping::industry;

    /// Ratios trimmed, in order; later ratios see the nulls of earlier ones.
    std::vector<std::pair<Variable, Variable>> ratios = {
        {Variable::Y, Variable::L}, {Variable::K, Variable::L}};
};

struct PreprocessReport {
    std::size_t converted = 0;
    std::map<std::string, std::size_t> level_outliers_nulled; // per variable
    std::map<std::string, std::size_t> ratio_outliers_nulled; // per ratio "Y/L"
};

struct PreprocessResult {
    std::vector<SurveyRecord> records;
    PreprocessReport report;
};

/// Convert each monetary field x to (x / exchange_rate) / deflator.
/// Missing fields stay missing. Throws RateNotFound naming the offending
/// (country, year) when no entry resolves.
PreprocessResult to_usd_real(const std::vector<SurveyRecord>& records,
                             const RateTable& rates);

/// Null values more than sd_multiplier standard deviations from the group
/// mean of ln(x+1), independently per variable. Groups with zero spread
/// flag nothing.
PreprocessResult trim_level_outliers(const std::vector<SurveyRecord>& records,
                                     const OutlierPolicy& policy = {});

/// Apply the 3-sigma rule to ln(num/den) within industry groups over rows
/// where both fields are present and positive; a flagged row has both
/// participating fields set to missing.
PreprocessResult trim_ratio_outliers(const std::vector<SurveyRecord>& records,
                                     const OutlierPolicy& policy = {});

} // namespace hetero

#endif // HETERO_PREPROCESS_HPP
