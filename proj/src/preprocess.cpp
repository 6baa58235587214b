#include "hetero/preprocess.hpp"

#include <cmath>
#include <fstream>

#include "hetero/csv.hpp"
#include "hetero/errors.hpp"

namespace hetero {

void RateTable::insert(const std::string& country, int year, int month, RateEntry entry) {
    entries_[{country, year, month}] = entry;
}

const RateEntry* RateTable::find(const std::string& country, int year,
                                 std::optional<int> month) const {
    if (month) {
        auto it = entries_.find({country, year, *month});
        if (it != entries_.end()) return &it->second;
    }
    auto it = entries_.find({country, year, 0});
    if (it != entries_.end()) return &it->second;
    return nullptr;
}

RateTable RateTable::from_csv(std::istream& in) {
    const CsvTable table = read_csv(in);
    auto col = [&](const char* name) {
        auto idx = table.column(name);
        if (!idx) throw MissingColumn(std::string("rate table lacks column '") + name + "'");
        return *idx;
    };
    const std::size_t c_country = col("country");
    const std::size_t c_year = col("year");
    const auto c_month = table.column("month");
    const std::size_t c_rate = col("exchange_rate");
    const std::size_t c_defl = col("deflator");

    RateTable rates;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        RateEntry entry;
        int month = 0;
        try {
            entry.exchange_rate = std::stod(row[c_rate]);
            entry.deflator = std::stod(row[c_defl]);
            if (c_month && !row[*c_month].empty()) month = std::stoi(row[*c_month]);
        } catch (...) {
            throw MalformedCsv("rate table row " + std::to_string(r + 1) +
                               ": numeric field unparseable");
        }
        if (!(entry.exchange_rate > 0) || !(entry.deflator > 0)) {
            throw MalformedCsv("rate table row " + std::to_string(r + 1) +
                               ": exchange_rate and deflator must be positive");
        }
        rates.insert(row[c_country], std::stoi(row[c_year]), month, entry);
    }
    return rates;
}

RateTable RateTable::from_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    return from_csv(in);
}

PreprocessResult to_usd_real(const std::vector<SurveyRecord>& records,
                             const RateTable& rates) {
    PreprocessResult result;
    result.records = records;
    for (auto& rec : result.records) {
        const RateEntry* entry = rates.find(rec.country, rec.year, rec.fiscal_close_month);
        if (!entry) {
            throw RateNotFound("no rate entry for (" + rec.country + ", " +
                               std::to_string(rec.year) + ")");
        }
        auto convert = [&](std::optional<double>& field) {
            if (field) *field = (*field / entry->exchange_rate) / entry->deflator;
        };
        convert(rec.sales);
        convert(rec.capital);
        convert(rec.labor_cost);
        ++result.report.converted;
    }
    return result;
}

namespace {

std::optional<double>& field_of(SurveyRecord& rec, Variable v) {
    switch (v) {
    case Variable::Y: return rec.sales;
    case Variable::K: return rec.capital;
    case Variable::L: return rec.labor_cost;
    }
    return rec.sales;
}

struct GroupStats {
    double mean = 0;
    double sd = 0;
    std::size_t n = 0;
};

GroupStats stats_of(const std::vector<double>& xs) {
    GroupStats g;
    g.n = xs.size();
    if (g.n == 0) return g;
    double sum = 0;
    for (double x : xs) sum += x;
    g.mean = sum / static_cast<double>(g.n);
    double ss = 0;
    for (double x : xs) {
        const double d = x - g.mean;
        ss += d * d;
    }
    g.sd = std::sqrt(ss / static_cast<double>(g.n));
    return g;
}

} // namespace

PreprocessResult trim_level_outliers(const std::vector<SurveyRecord>& records,
                                     const OutlierPolicy& policy) {
    PreprocessResult result;
    result.records = records;

    // economy x broad sector; the whole sample is manufacturing, so the
    // group key reduces to the country.
    auto group_key = [](const SurveyRecord& rec) { return rec.country; };

    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < result.records.size(); ++i)
        groups[group_key(result.records[i])].push_back(i);

    for (Variable v : {Variable::Y, Variable::K, Variable::L}) {
        std::size_t nulled = 0;
        for (const auto& [key, idxs] : groups) {
            std::vector<double> transformed;
            for (std::size_t i : idxs) {
                const auto& field = field_of(result.records[i], v);
                if (field) transformed.push_back(std::log1p(*field));
            }
            const GroupStats g = stats_of(transformed);
            if (g.sd == 0) continue;
            for (std::size_t i : idxs) {
                auto& field = field_of(result.records[i], v);
                if (!field) continue;
                if (std::abs(std::log1p(*field) - g.mean) > policy.sd_multiplier * g.sd) {
                    field.reset();
                    ++nulled;
                }
            }
        }
        result.report.level_outliers_nulled[variable_name(v)] = nulled;
    }
    return result;
}

PreprocessResult trim_ratio_outliers(const std::vector<SurveyRecord>& records,
                                     const OutlierPolicy& policy) {
    PreprocessResult result;
    result.records = records;

    std::map<std::string, std::vector<std::size_t>> groups; // by industry
    for (std::size_t i = 0; i < result.records.size(); ++i)
        groups[result.records[i].isic].push_back(i);

    for (const auto& [num, den] : policy.ratios) {
        const std::string label =
            std::string(variable_name(num)) + "/" + variable_name(den);
        std::size_t nulled = 0;
        for (const auto& [key, idxs] : groups) {
            std::vector<std::size_t> eligible;
            std::vector<double> logs;
            for (std::size_t i : idxs) {
                const auto& a = field_of(result.records[i], num);
                const auto& b = field_of(result.records[i], den);
                if (a && b && *a > 0 && *b > 0) {
                    eligible.push_back(i);
                    logs.push_back(std::log(*a / *b));
                }
            }
            const GroupStats g = stats_of(logs);
            if (g.sd == 0) continue;
            for (std::size_t j = 0; j < eligible.size(); ++j) {
                if (std::abs(logs[j] - g.mean) > policy.sd_multiplier * g.sd) {
                    field_of(result.records[eligible[j]], num).reset();
                    field_of(result.records[eligible[j]], den).reset();
                    ++nulled;
                }
            }
        }
        result.report.ratio_outliers_nulled[label] = nulled;
    }
    return result;
}

} // namespace hetero
