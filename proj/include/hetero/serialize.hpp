#ifndef HETERO_SERIALIZE_HPP
#define HETERO_SERIALIZE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetero/ingest.hpp"
#include "hetero/meregress.hpp"
#include "hetero/metrics.hpp"
#include "hetero/preprocess.hpp"
#include "hetero/simulate.hpp"

namespace hetero {

/// All reports serialize through ordered_json so field order is stable and
/// repeated runs emit byte-identical output.
using Json = nlohmann::ordered_json;

std::string panel_key_name(const PanelKey& key);

Json to_json(const VolumeEstimate& v);
Json to_json(const ZonotopeMetrics& m);
Json to_json(const TangentReport& t); // {axis: angle} map
Json to_json(const BiasReport& b);
Json to_json(const MEReport& r);
Json to_json(const SummaryStats& s);
Json to_json(const AvailabilityTable& t);
Json to_json(const PreprocessReport& r);
Json to_json(const MECoefficients& c);
Json to_json(const FitReport& r);
Json to_json(const PanelMetrics& m);
Json to_json(const MetricsBundle& bundle);
Json to_json(const MonteCarloReport& r);

/// Newline-terminated JSON document.
void emit_json(std::ostream& out, const Json& value);

/// Fixed-header CSV views of the panel-keyed reports.
void emit_bundle_csv(std::ostream& out, const MetricsBundle& bundle);
void emit_monte_carlo_csv(std::ostream& out, const MonteCarloReport& report);
void emit_summary_csv(std::ostream& out,
                      const std::vector<std::pair<PanelKey, SummaryStats>>& rows);
void emit_availability_csv(std::ostream& out, const AvailabilityTable& table);

/// Write preprocessed records back out in long format (logical column names).
void emit_records_csv(std::ostream& out, const std::vector<SurveyRecord>& records);

} // namespace hetero

#endif // HETERO_SERIALIZE_HPP
