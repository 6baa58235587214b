#include "hetero/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "hetero/csv.hpp"
#include "hetero/errors.hpp"

namespace hetero {

const char* variable_name(Variable v) {
    switch (v) {
    case Variable::Y: return "Y";
    case Variable::K: return "K";
    case Variable::L: return "L";
    }
    return "?";
}

ColumnMap default_column_map() {
    return {{"country", "country"}, {"year", "year"},   {"isic", "isic"},
            {"d2", "d2"},           {"n7a", "n7a"},     {"n2a", "n2a"},
            {"firm_id", "firm_id"}, {"fiscal_close_month", "fiscal_close_month"}};
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::optional<long> parse_int(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

std::optional<double> parse_monetary(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) return std::nullopt;
        if (!std::isfinite(v) || v < 0) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

std::string normalize_isic(const std::string& raw, std::size_t row) {
    std::string s = trim(raw);
    if (s.size() == 1 && std::isdigit(static_cast<unsigned char>(s[0]))) s = "0" + s;
    if (s.size() != 2 || !std::isdigit(static_cast<unsigned char>(s[0])) ||
        !std::isdigit(static_cast<unsigned char>(s[1]))) {
        throw MalformedCsv("row " + std::to_string(row) + ": isic '" + raw +
                           "' is not a 2-digit division code");
    }
    return s;
}

} // namespace

std::vector<SurveyRecord> parse_survey_csv(std::istream& in, const ColumnMap& columns) {
    const CsvTable table = read_csv(in);

    auto mapped = [&](const std::string& logical) -> std::string {
        auto it = columns.find(logical);
        if (it == columns.end())
            throw MissingColumn("column map does not cover '" + logical + "'");
        return it->second;
    };
    auto required = [&](const std::string& logical) -> std::size_t {
        const std::string name = mapped(logical);
        auto idx = table.column(name);
        if (!idx)
            throw MissingColumn("mapped column '" + name + "' (" + logical +
                                ") absent from header");
        return *idx;
    };
    auto optional_col = [&](const std::string& logical) -> std::optional<std::size_t> {
        auto it = columns.find(logical);
        if (it == columns.end()) return std::nullopt;
        auto idx = table.column(it->second);
        return idx; // mapped but absent is tolerated for optional columns
    };

    const std::size_t c_country = required("country");
    const std::size_t c_year = required("year");
    const std::size_t c_isic = required("isic");
    const std::size_t c_d2 = required("d2");
    const std::size_t c_n7a = required("n7a");
    const std::size_t c_n2a = required("n2a");
    const auto c_firm = optional_col("firm_id");
    const auto c_month = optional_col("fiscal_close_month");

    std::vector<SurveyRecord> records;
    records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        SurveyRecord rec;
        rec.country = trim(row[c_country]);
        auto year = parse_int(row[c_year]);
        if (!year || *year < 1900 || *year > 2100) {
            throw MalformedCsv("row " + std::to_string(r + 1) + ": year '" + row[c_year] +
                               "' is not a calendar year in [1900, 2100]");
        }
        rec.year = static_cast<int>(*year);
        rec.isic = normalize_isic(row[c_isic], r + 1);
        if (c_firm) rec.firm_id = trim(row[*c_firm]);
        if (c_month) {
            auto m = parse_int(row[*c_month]);
            if (m && *m >= 1 && *m <= 12) rec.fiscal_close_month = static_cast<int>(*m);
        }
        rec.sales = parse_monetary(row[c_d2]);
        rec.capital = parse_monetary(row[c_n7a]);
        rec.labor_cost = parse_monetary(row[c_n2a]);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<SurveyRecord> parse_survey_csv(std::istream& in) {
    return parse_survey_csv(in, default_column_map());
}

PanelBuildResult build_panels(const std::vector<SurveyRecord>& records) {
    PanelBuildResult result;
    for (const auto& rec : records) {
        if (rec.sales && rec.capital && rec.labor_cost && *rec.sales > 0 &&
            *rec.capital > 0 && *rec.labor_cost > 0) {
            PanelKey key{rec.country, rec.isic, rec.year};
            result.panels[key].push_back({*rec.sales, *rec.capital, *rec.labor_cost});
        } else {
            ++result.dropped;
        }
    }
    return result;
}

AvailabilityTable availability_table(const PanelMap& panels, double threshold,
                                     Variable variable) {
    AvailabilityTable table;
    table.threshold = threshold;
    auto pick = [variable](const FirmObservation& o) {
        switch (variable) {
        case Variable::Y: return o.y;
        case Variable::K: return o.k;
        case Variable::L: return o.l;
        }
        return o.y;
    };

    std::map<PanelKey, std::size_t> counts;
    std::map<std::pair<std::string, std::string>, std::size_t> row_sums; // (isic, country)
    std::map<int, std::size_t> col_sums;                                 // year
    for (const auto& [key, panel] : panels) {
        std::size_t n = 0;
        for (const auto& obs : panel)
            if (pick(obs) > threshold) ++n;
        counts[key] = n;
        row_sums[{key.isic, key.country}] += n;
        col_sums[key.year] += n;
        table.total += n;
    }
    for (const auto& [key, n] : counts) {
        if (row_sums[{key.isic, key.country}] == 0) continue;
        if (col_sums[key.year] == 0) continue;
        table.cells[key] = n;
    }
    return table;
}

SummaryStats summarize(const std::vector<FirmObservation>& panel, Variable variable) {
    if (panel.empty()) throw EmptyPanel("summarize: empty panel");
    auto pick = [variable](const FirmObservation& o) {
        switch (variable) {
        case Variable::Y: return o.y;
        case Variable::K: return o.k;
        case Variable::L: return o.l;
        }
        return o.y;
    };

    SummaryStats s;
    s.variable = variable;
    s.count = panel.size();
    double sum = 0;
    s.min = pick(panel.front());
    s.max = s.min;
    for (const auto& o : panel) {
        const double v = pick(o);
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(s.count);
    double ss = 0;
    for (const auto& o : panel) {
        const double d = pick(o) - s.mean;
        ss += d * d;
    }
    s.std_dev = std::sqrt(ss / static_cast<double>(s.count));
    return s;
}

} // namespace hetero
