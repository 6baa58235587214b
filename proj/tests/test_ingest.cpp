#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hetero/csv.hpp"
#include "hetero/errors.hpp"
#include "hetero/ingest.hpp"
#include "hetero/rng.hpp"

using namespace hetero;

namespace {

std::vector<SurveyRecord> parse(const std::string& csv) {
    std::istringstream in(csv);
    return parse_survey_csv(in);
}

const char* kHeader = "firm_id,country,year,isic,d2,n7a,n2a\n";

} // namespace

TEST_CASE("csv reader handles quoting and reports structural breaks") {
    std::istringstream ok("a,b\n\"x,y\",\"he said \"\"hi\"\"\"\n");
    const auto table = read_csv(ok);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0][0] == "x,y");
    CHECK(table.rows[0][1] == "he said \"hi\"");

    std::istringstream ragged("a,b\n1,2,3\n");
    CHECK_THROWS_AS(read_csv(ragged), MalformedCsv);
    std::istringstream unterminated("a,b\n\"open,2\n");
    CHECK_THROWS_AS(read_csv(unterminated), MalformedCsv);
}

TEST_CASE("CRLF line endings parse the same as LF") {
    const auto records = parse("firm_id,country,year,isic,d2,n7a,n2a\r\n"
                               "f1,MEX,2006,10,1200,10,100\r\n");
    REQUIRE(records.size() == 1);
    CHECK(records[0].country == "MEX");
    CHECK(*records[0].sales == 1200.0);
}

TEST_CASE("a fully valid row parses into a complete record") {
    const auto records = parse(std::string(kHeader) + "f1,MEX,2006,10,1200,10,100\n");
    REQUIRE(records.size() == 1);
    const auto& r = records[0];
    CHECK(r.firm_id == "f1");
    CHECK(r.country == "MEX");
    CHECK(r.year == 2006);
    CHECK(r.isic == "10");
    REQUIRE(r.sales.has_value());
    CHECK(*r.sales == 1200.0);
    CHECK(*r.capital == 10.0);
    CHECK(*r.labor_cost == 100.0);
}

TEST_CASE("negative and unparseable monetary cells become missing") {
    const auto records = parse(std::string(kHeader) +
                               "f1,MEX,2006,10,-5,n/a,100\n"
                               "f2,MEX,2006,10,,inf,50\n");
    REQUIRE(records.size() == 2);
    CHECK_FALSE(records[0].sales.has_value());
    CHECK_FALSE(records[0].capital.has_value());
    CHECK(records[0].labor_cost.has_value());
    CHECK_FALSE(records[1].sales.has_value());
    CHECK_FALSE(records[1].capital.has_value());
}

TEST_CASE("a mapped column missing from the header raises MissingColumn") {
    std::istringstream in("firm_id,country,year,isic,d2,n2a\nf,MEX,2006,10,1,2\n");
    CHECK_THROWS_AS(parse_survey_csv(in), MissingColumn);
}

TEST_CASE("column overrides rename the physical columns") {
    ColumnMap map = default_column_map();
    map["d2"] = "sales_total";
    std::istringstream in("firm_id,country,year,isic,sales_total,n7a,n2a\n"
                          "f,MEX,2006,10,7,8,9\n");
    const auto records = parse_survey_csv(in, map);
    REQUIRE(records.size() == 1);
    CHECK(*records[0].sales == 7.0);
}

TEST_CASE("broken key fields are structural errors") {
    CHECK_THROWS_AS(parse(std::string(kHeader) + "f,MEX,20x6,10,1,2,3\n"), MalformedCsv);
    CHECK_THROWS_AS(parse(std::string(kHeader) + "f,MEX,1850,10,1,2,3\n"), MalformedCsv);
    CHECK_THROWS_AS(parse(std::string(kHeader) + "f,MEX,2006,ab,1,2,3\n"), MalformedCsv);
}

TEST_CASE("single-digit isic codes normalize with a leading zero") {
    const auto records = parse(std::string(kHeader) + "f,MEX,2006,5,1,2,3\n");
    CHECK(records[0].isic == "05");
}

TEST_CASE("row order is preserved") {
    const auto records = parse(std::string(kHeader) +
                               "f3,MEX,2006,10,1,2,3\n"
                               "f1,MEX,2006,10,1,2,3\n"
                               "f2,MEX,2006,10,1,2,3\n");
    REQUIRE(records.size() == 3);
    CHECK(records[0].firm_id == "f3");
    CHECK(records[1].firm_id == "f1");
    CHECK(records[2].firm_id == "f2");
}

TEST_CASE("complete records land in one panel; incomplete ones are tallied") {
    const auto records = parse(std::string(kHeader) +
                               "a,MEX,2006,10,1200,10,100\n"
                               "b,MEX,2006,10,1300,10,100\n"
                               "c,MEX,2006,10,1100,10,100\n"
                               "d,MEX,2006,10,900,,100\n"
                               "e,MEX,2006,10,0,10,100\n");
    const auto result = build_panels(records);
    REQUIRE(result.panels.size() == 1);
    const auto& panel = result.panels.begin()->second;
    CHECK(panel.size() == 3);
    CHECK(result.dropped == 2); // missing capital; zero sales
    CHECK(panel[0].y == 1200.0);
    CHECK(panel[0].k == 10.0);
    CHECK(panel[0].l == 100.0);
}

TEST_CASE("records across two years split into two panels") {
    const auto records = parse(std::string(kHeader) +
                               "a,MEX,2006,10,1,2,3\n"
                               "b,MEX,2010,10,1,2,3\n");
    const auto result = build_panels(records);
    REQUIRE(result.panels.size() == 2);
    auto it = result.panels.begin();
    CHECK(it->first.year == 2006);
    CHECK((++it)->first.year == 2010);
}

TEST_CASE("panel partition: sizes plus drops equal the record count") {
    Rng rng(61);
    std::vector<SurveyRecord> records;
    for (int i = 0; i < 200; ++i) {
        SurveyRecord r;
        r.country = (rng.uniform() < 0.5) ? "MEX" : "IND";
        r.year = 2000 + static_cast<int>(rng.uniform_int(5));
        r.isic = (rng.uniform() < 0.5) ? "10" : "20";
        if (rng.uniform() < 0.8) r.sales = rng.uniform(0, 100);
        if (rng.uniform() < 0.8) r.capital = rng.uniform(0, 100);
        if (rng.uniform() < 0.8) r.labor_cost = rng.uniform(0, 100);
        records.push_back(r);
    }
    const auto result = build_panels(records);
    std::size_t total = result.dropped;
    for (const auto& [key, panel] : result.panels) total += panel.size();
    CHECK(total == records.size());
}

TEST_CASE("panel keys order by isic, then country, then year") {
    const PanelKey a{"ZAF", "10", 2010};
    const PanelKey b{"ARG", "20", 2000};
    const PanelKey c{"ARG", "10", 2011};
    CHECK(a < b);  // isic dominates country
    CHECK(c < a);  // country breaks isic ties
    CHECK(PanelKey{"ARG", "10", 2010} < c);
}

TEST_CASE("availability counts observations whose output exceeds the threshold") {
    PanelMap panels;
    panels[{"MEX", "10", 2006}] = {{50, 1, 1}, {150, 1, 1}, {200, 1, 1}};
    const auto table = availability_table(panels, 100.0);
    REQUIRE(table.cells.size() == 1);
    CHECK(table.cells.begin()->second == 2);
    CHECK(table.total == 2);
}

TEST_CASE("panels that qualify nowhere vanish from the table") {
    PanelMap panels;
    panels[{"MEX", "10", 2006}] = {{50, 1, 1}, {80, 1, 1}};
    panels[{"IND", "20", 2007}] = {{500, 1, 1}};
    const auto table = availability_table(panels, 100.0);
    REQUIRE(table.cells.size() == 1);
    CHECK(table.cells.begin()->first.country == "IND");
    CHECK(table.total == 1);
}

TEST_CASE("a zero cell survives when its row and column qualify elsewhere") {
    PanelMap panels;
    panels[{"MEX", "10", 2006}] = {{500, 1, 1}};
    panels[{"MEX", "10", 2007}] = {{50, 1, 1}};  // zero cell, row has 2006
    panels[{"IND", "20", 2007}] = {{900, 1, 1}}; // keeps the 2007 column alive
    const auto table = availability_table(panels, 100.0);
    CHECK(table.cells.size() == 3);
    CHECK(table.cells.at({"MEX", "10", 2007}) == 0);
}

TEST_CASE("availability can filter on a different variable") {
    PanelMap panels;
    panels[{"MEX", "10", 2006}] = {{50, 500, 1}, {60, 40, 1}};
    const auto by_k = availability_table(panels, 100.0, Variable::K);
    REQUIRE(by_k.cells.size() == 1);
    CHECK(by_k.cells.begin()->second == 1);
    CHECK(availability_table(panels, 100.0, Variable::Y).cells.empty());
}

TEST_CASE("zero threshold counts every positive observation") {
    PanelMap panels;
    panels[{"MEX", "10", 2006}] = {{1, 1, 1}, {2, 1, 1}, {3, 1, 1}, {4, 1, 1}, {5, 1, 1}};
    const auto table = availability_table(panels, 0.0);
    CHECK(table.cells.begin()->second == 5);
}

TEST_CASE("availability is monotone in the threshold") {
    Rng rng(71);
    PanelMap panels;
    for (int p = 0; p < 5; ++p) {
        std::vector<FirmObservation> panel;
        for (int i = 0; i < 30; ++i) panel.push_back({rng.uniform(0, 500), 1, 1});
        panels[{"C" + std::to_string(p), "10", 2000 + p}] = panel;
    }
    const auto low = availability_table(panels, 50.0);
    const auto high = availability_table(panels, 200.0);
    for (const auto& [key, count] : high.cells) {
        auto it = low.cells.find(key);
        if (it != low.cells.end()) CHECK(count <= it->second);
    }
    CHECK(high.total <= low.total);
}

TEST_CASE("summary statistics use the population convention") {
    const std::vector<FirmObservation> panel{{2, 5, 8}, {4, 5, 6}};
    const auto stats = summarize(panel, Variable::Y);
    CHECK(stats.mean == 3.0);
    CHECK(stats.std_dev == 1.0);
    CHECK(stats.min == 2.0);
    CHECK(stats.max == 4.0);
    CHECK(stats.count == 2);

    const auto l_stats = summarize(panel, Variable::L);
    CHECK(l_stats.mean == 7.0);
    CHECK(l_stats.std_dev == 1.0);
}

TEST_CASE("a single observation has zero spread") {
    const std::vector<FirmObservation> panel{{7, 1, 1}};
    const auto stats = summarize(panel, Variable::Y);
    CHECK(stats.std_dev == 0.0);
    CHECK(stats.min == stats.mean);
    CHECK(stats.max == stats.mean);
}

TEST_CASE("summarizing an empty panel raises EmptyPanel") {
    CHECK_THROWS_AS(summarize({}, Variable::Y), EmptyPanel);
}

TEST_CASE("summarize is permutation invariant") {
    Rng rng(83);
    std::vector<FirmObservation> panel;
    for (int i = 0; i < 50; ++i)
        panel.push_back({rng.uniform(1, 100), rng.uniform(1, 100), rng.uniform(1, 100)});
    auto reversed = panel;
    std::reverse(reversed.begin(), reversed.end());
    const auto a = summarize(panel, Variable::K);
    const auto b = summarize(reversed, Variable::K);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
    CHECK(a.std_dev == doctest::Approx(b.std_dev).epsilon(1e-12));
    CHECK(a.min == b.min);
    CHECK(a.max == b.max);
}
