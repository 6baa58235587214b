#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hetero/errors.hpp"
#include "hetero/preprocess.hpp"
#include "hetero/rng.hpp"

using namespace hetero;

namespace {

SurveyRecord record(const std::string& country, int year, const std::string& isic,
                    std::optional<double> y, std::optional<double> k,
                    std::optional<double> l) {
    SurveyRecord r;
    r.country = country;
    r.year = year;
    r.isic = isic;
    r.sales = y;
    r.capital = k;
    r.labor_cost = l;
    return r;
}

// Brute-force z-scores of ln(x+1) for the level-trim oracle.
std::vector<double> level_z_scores(const std::vector<double>& xs) {
    std::vector<double> t;
    for (double x : xs) t.push_back(std::log1p(x));
    double mean = 0;
    for (double v : t) mean += v;
    mean /= static_cast<double>(t.size());
    double ss = 0;
    for (double v : t) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(t.size()));
    std::vector<double> z;
    for (double v : t) z.push_back(sd > 0 ? std::abs(v - mean) / sd : 0.0);
    return z;
}

} // namespace

TEST_CASE("currency conversion divides by rate then deflator") {
    RateTable rates;
    rates.insert("MEX", 2006, 0, {2.0, 1.0});
    const auto result = to_usd_real({record("MEX", 2006, "10", 100, 50, std::nullopt)}, rates);
    CHECK(*result.records[0].sales == 50.0);
    CHECK(*result.records[0].capital == 25.0);
    CHECK_FALSE(result.records[0].labor_cost.has_value()); // missing stays missing
    CHECK(result.report.converted == 1);
}

TEST_CASE("identity rates leave values unchanged") {
    RateTable rates;
    rates.insert("IND", 2010, 0, {1.0, 1.0});
    const auto result = to_usd_real({record("IND", 2010, "20", 7, 8, 9)}, rates);
    CHECK(*result.records[0].sales == 7.0);
    CHECK(*result.records[0].capital == 8.0);
    CHECK(*result.records[0].labor_cost == 9.0);
}

TEST_CASE("an unresolvable country/year raises RateNotFound") {
    RateTable rates;
    rates.insert("IND", 2010, 0, {1.0, 1.0});
    CHECK_THROWS_WITH_AS(to_usd_real({record("MEX", 2006, "10", 1, 1, 1)}, rates),
                         doctest::Contains("MEX"), RateNotFound);
}

TEST_CASE("a fiscal closing month selects the month-adjusted entry") {
    RateTable rates;
    rates.insert("MEX", 2006, 0, {2.0, 1.0});
    rates.insert("MEX", 2006, 6, {4.0, 1.0});
    SurveyRecord r = record("MEX", 2006, "10", 100, std::nullopt, std::nullopt);
    r.fiscal_close_month = 6;
    const auto monthly = to_usd_real({r}, rates);
    CHECK(*monthly.records[0].sales == 25.0);

    r.fiscal_close_month = 3; // no March entry: the annual one applies
    const auto annual = to_usd_real({r}, rates);
    CHECK(*annual.records[0].sales == 50.0);
}

TEST_CASE("conversion is linear in the monetary inputs") {
    RateTable rates;
    rates.insert("MEX", 2006, 0, {3.0, 1.3});
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double y = rng.uniform(1, 1000);
        const double c = rng.uniform(0.1, 10);
        const auto base = to_usd_real({record("MEX", 2006, "10", y, 1, 1)}, rates);
        const auto scaled = to_usd_real({record("MEX", 2006, "10", c * y, c, c)}, rates);
        CHECK(*scaled.records[0].sales ==
              doctest::Approx(c * *base.records[0].sales).epsilon(1e-12));
    }
}

TEST_CASE("rate tables load from CSV with optional month column") {
    std::istringstream in("country,year,month,exchange_rate,deflator\n"
                          "MEX,2006,,10.9,0.85\n"
                          "MEX,2006,6,11.2,0.86\n");
    const auto rates = RateTable::from_csv(in);
    CHECK(rates.size() == 2);
    CHECK(rates.find("MEX", 2006, std::nullopt)->exchange_rate == 10.9);
    CHECK(rates.find("MEX", 2006, 6)->exchange_rate == 11.2);
    CHECK(rates.find("MEX", 2007, std::nullopt) == nullptr);

    std::istringstream bad("country,year,exchange_rate,deflator\nMEX,2006,-1,1\n");
    CHECK_THROWS_AS(RateTable::from_csv(bad), MalformedCsv);
}

TEST_CASE("identical values are never level outliers") {
    std::vector<SurveyRecord> records(10, record("MEX", 2006, "10", 100, 100, 100));
    const auto result = trim_level_outliers(records);
    for (const auto& r : result.records) CHECK(r.sales.has_value());
    CHECK(result.report.level_outliers_nulled.at("Y") == 0);
}

TEST_CASE("an extreme level among near-identical values is nulled") {
    // 99 copies of e - 1 and one e^99 - 1: the transformed set is
    // {1 x99, 99}, whose extreme sits far beyond three sigma.
    std::vector<SurveyRecord> records;
    std::vector<double> values;
    for (int i = 0; i < 99; ++i) values.push_back(std::exp(1.0) - 1.0);
    values.push_back(std::exp(99.0) - 1.0);
    for (double v : values) records.push_back(record("MEX", 2006, "10", v, 1, 1));

    const auto z = level_z_scores(values);
    CHECK(z.back() > 3.0); // oracle confirms the flag
    CHECK(z.front() < 3.0);

    const auto result = trim_level_outliers(records);
    CHECK_FALSE(result.records[99].sales.has_value());
    for (int i = 0; i < 99; ++i) CHECK(result.records[i].sales.has_value());
    CHECK(result.report.level_outliers_nulled.at("Y") == 1);
    // untouched variables keep their values
    for (const auto& r : result.records) CHECK(r.capital.has_value());
}

TEST_CASE("zeros contribute ln(1) = 0 to the level statistics") {
    std::vector<SurveyRecord> records(5, record("MEX", 2006, "10", 0, 1, 1));
    const auto result = trim_level_outliers(records);
    for (const auto& r : result.records) CHECK(r.sales.has_value());
}

TEST_CASE("level groups are separated by economy") {
    // The outlier in MEX must not contaminate the IND group statistics.
    std::vector<SurveyRecord> records;
    for (int i = 0; i < 50; ++i) records.push_back(record("MEX", 2006, "10", 100, 1, 1));
    records.push_back(record("MEX", 2006, "10", std::exp(40.0), 1, 1));
    for (int i = 0; i < 30; ++i)
        records.push_back(record("IND", 2006, "10", 100 + i % 3, 1, 1));
    const auto result = trim_level_outliers(records);
    CHECK_FALSE(result.records[50].sales.has_value());
    for (std::size_t i = 51; i < records.size(); ++i)
        CHECK(result.records[i].sales.has_value());
}

TEST_CASE("identical ratios are never ratio outliers") {
    std::vector<SurveyRecord> records;
    for (int i = 1; i <= 10; ++i)
        records.push_back(record("MEX", 2006, "10", 2.0 * i, 3.0 * i, 1.0 * i));
    const auto result = trim_ratio_outliers(records);
    CHECK(result.report.ratio_outliers_nulled.at("Y/L") == 0);
    CHECK(result.report.ratio_outliers_nulled.at("K/L") == 0);
}

TEST_CASE("a million-fold productivity ratio is nulled on both sides") {
    Rng rng(11);
    std::vector<SurveyRecord> records;
    for (int i = 0; i < 99; ++i) {
        const double l = rng.uniform(50, 150);
        records.push_back(record("MEX", 2006, "10", l * rng.uniform(0.9, 1.1), 10, l));
    }
    records.push_back(record("MEX", 2006, "10", 1e6 * 100.0, 10, 100.0));
    const auto result = trim_ratio_outliers(records);
    CHECK_FALSE(result.records[99].sales.has_value());      // both participants
    CHECK_FALSE(result.records[99].labor_cost.has_value()); // go missing
    CHECK(result.records[99].capital.has_value());          // K untouched by Y/L
    CHECK(result.report.ratio_outliers_nulled.at("Y/L") == 1);
    for (int i = 0; i < 99; ++i) {
        CHECK(result.records[i].sales.has_value());
        CHECK(result.records[i].labor_cost.has_value());
    }
}

TEST_CASE("rows with a missing denominator never enter ratio statistics") {
    std::vector<SurveyRecord> records;
    for (int i = 0; i < 5; ++i)
        records.push_back(record("MEX", 2006, "10", 100, 10, 50));
    records.push_back(record("MEX", 2006, "10", 1e9, 10, std::nullopt));
    const auto result = trim_ratio_outliers(records);
    CHECK(result.records[5].sales.has_value()); // excluded, never flagged
    CHECK(result.report.ratio_outliers_nulled.at("Y/L") == 0);
}

TEST_CASE("trimming only toggles presence, never edits surviving values") {
    Rng rng(13);
    std::vector<SurveyRecord> records;
    for (int i = 0; i < 60; ++i) {
        records.push_back(record("MEX", 2006, "10", rng.uniform(10, 1000),
                                 rng.uniform(10, 1000), rng.uniform(10, 1000)));
    }
    const auto leveled = trim_level_outliers(records);
    const auto trimmed = trim_ratio_outliers(leveled.records);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (trimmed.records[i].sales) CHECK(*trimmed.records[i].sales == *records[i].sales);
        if (trimmed.records[i].capital)
            CHECK(*trimmed.records[i].capital == *records[i].capital);
        if (trimmed.records[i].labor_cost)
            CHECK(*trimmed.records[i].labor_cost == *records[i].labor_cost);
    }
}

TEST_CASE("a second pass never nulls values that sat at the group mean") {
    // After the first pass removes the extreme, the survivors are identical,
    // so the second pass has zero spread and flags nothing.
    std::vector<SurveyRecord> records(20, record("MEX", 2006, "10", 100, 1, 1));
    records.push_back(record("MEX", 2006, "10", std::exp(60.0), 1, 1));
    const auto first = trim_level_outliers(records);
    CHECK(first.report.level_outliers_nulled.at("Y") == 1);
    const auto second = trim_level_outliers(first.records);
    CHECK(second.report.level_outliers_nulled.at("Y") == 0);
    for (int i = 0; i < 20; ++i) CHECK(second.records[i].sales.has_value());
}

TEST_CASE("custom ratio sets and multipliers are honored") {
    OutlierPolicy policy;
    policy.sd_multiplier = 100.0; // effectively disables trimming
    policy.ratios = {{Variable::K, Variable::Y}};
    std::vector<SurveyRecord> records;
    Rng rng(17);
    for (int i = 0; i < 30; ++i)
        records.push_back(record("MEX", 2006, "10", rng.uniform(1, 10),
                                 rng.uniform(1, 10), rng.uniform(1, 10)));
    const auto result = trim_ratio_outliers(records, policy);
    CHECK(result.report.ratio_outliers_nulled.count("K/Y") == 1);
    CHECK(result.report.ratio_outliers_nulled.at("K/Y") == 0);
}
