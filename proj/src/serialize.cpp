#include "hetero/serialize.hpp"

#include <ostream>

#include "hetero/csv.hpp"

namespace hetero {

std::string panel_key_name(const PanelKey& key) {
    if (key.isic.empty() && key.country.empty() && key.year == 0) return "dataset";
    return key.isic + "|" + key.country + "|" + std::to_string(key.year);
}

Json to_json(const VolumeEstimate& v) {
    Json j;
    j["value"] = v.value;
    j["mode"] = v.mode == VolumeMode::exact ? "exact" : "sampled";
    if (v.sample_count) j["sample_count"] = *v.sample_count;
    if (v.std_error) j["std_error"] = *v.std_error;
    return j;
}

Json to_json(const ZonotopeMetrics& m) {
    Json j;
    j["volume"] = m.volume.value;
    j["mode"] = m.volume.mode == VolumeMode::exact ? "exact" : "sampled";
    if (m.volume.std_error) j["std_error"] = *m.volume.std_error;
    j["diagonal"] = m.diagonal;
    j["parallelotope_volume"] = m.parallelotope_volume;
    j["gini"] = m.gini;
    j["degenerate"] = m.degenerate;
    return j;
}

Json to_json(const TangentReport& t) {
    Json j = Json::object();
    for (std::size_t i = 0; i < t.angles.size(); ++i) j[t.axis_labels[i]] = t.angles[i];
    return j;
}

Json to_json(const BiasReport& b) {
    Json j;
    j["biased_ratio"] = b.biased_ratio;
    j["adjusted_ratio"] = b.adjusted_ratio;
    j["relative_bias"] = b.relative_bias;
    return j;
}

Json to_json(const MEReport& r) {
    Json j;
    j["h_max"] = r.h_max;
    j["h_star"] = r.h_star;
    j["h_norm"] = r.h_norm;
    j["bins"] = r.bins;
    j["seed"] = r.seed;
    Json clusters = Json::array();
    for (const auto& row : r.rows) {
        Json c;
        c["id"] = row.cluster;
        c["n"] = row.n;
        c["weight"] = row.weight;
        c["y_min"] = row.y_min;
        c["y_max"] = row.y_max;
        c["y_mean"] = row.y_mean;
        c["h_cluster"] = row.h_max_cluster;
        clusters.push_back(std::move(c));
    }
    j["clusters"] = std::move(clusters);
    return j;
}

Json to_json(const SummaryStats& s) {
    Json j;
    j["variable"] = variable_name(s.variable);
    j["count"] = s.count;
    j["mean"] = s.mean;
    j["std_dev"] = s.std_dev;
    j["min"] = s.min;
    j["max"] = s.max;
    return j;
}

Json to_json(const AvailabilityTable& t) {
    Json j;
    j["threshold"] = t.threshold;
    j["total"] = t.total;
    Json cells = Json::object();
    for (const auto& [key, count] : t.cells) cells[panel_key_name(key)] = count;
    j["cells"] = std::move(cells);
    return j;
}

Json to_json(const PreprocessReport& r) {
    Json j;
    j["converted"] = r.converted;
    j["level_outliers_nulled"] = r.level_outliers_nulled;
    j["ratio_outliers_nulled"] = r.ratio_outliers_nulled;
    return j;
}

Json to_json(const MECoefficients& c) {
    Json j;
    j["orders"] = {c.basis.order_k, c.basis.order_l};
    j["representation"] = representation_name(c.representation);
    j["bounds"] = {{"k_min", c.basis.domain.k_min},
                   {"k_max", c.basis.domain.k_max},
                   {"l_min", c.basis.domain.l_min},
                   {"l_max", c.basis.domain.l_max}};
    j["s"] = c.s;
    if (c.c) j["c"] = *c.c;
    return j;
}

Json to_json(const FitReport& r) {
    Json j;
    j["r_squared"] = r.r_squared;
    j["moment_residual_norm"] = r.moment_residual_norm;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["damping_retries"] = r.damping_retries;
    return j;
}

Json to_json(const PanelMetrics& m) {
    Json j;
    j["n_firms"] = m.n_firms;
    j["gini"] = to_json(m.gini);
    j["me"] = to_json(m.me);
    j["tangent"] = to_json(m.tangent);
    return j;
}

Json to_json(const MetricsBundle& bundle) {
    Json j = Json::object();
    for (const auto& [key, metrics] : bundle) j[panel_key_name(key)] = to_json(metrics);
    return j;
}

Json to_json(const MonteCarloReport& r) {
    Json j;
    j["pairs"] = r.options.pairs;
    j["firms"] = r.options.firms;
    j["seed"] = r.options.master_seed;
    j["clusters"] = r.options.clusters;
    j["bins"] = r.options.bins;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json x;
        x["run"] = row.run;
        x["gini_high"] = row.gini_high;
        x["gini_low"] = row.gini_low;
        x["me_high"] = row.me_high;
        x["me_low"] = row.me_low;
        x["h_max_high"] = row.h_max_high;
        x["h_max_low"] = row.h_max_low;
        rows.push_back(std::move(x));
    }
    j["runs"] = std::move(rows);
    Json agg;
    agg["mean_gini_high"] = r.aggregate.mean_gini_high;
    agg["sd_gini_high"] = r.aggregate.sd_gini_high;
    agg["mean_gini_low"] = r.aggregate.mean_gini_low;
    agg["sd_gini_low"] = r.aggregate.sd_gini_low;
    agg["mean_me_high"] = r.aggregate.mean_me_high;
    agg["sd_me_high"] = r.aggregate.sd_me_high;
    agg["mean_me_low"] = r.aggregate.mean_me_low;
    agg["sd_me_low"] = r.aggregate.sd_me_low;
    agg["me_high_gt_low"] = r.aggregate.me_high_gt_low;
    agg["gini_high_gt_low"] = r.aggregate.gini_high_gt_low;
    agg["directional_agreement"] = r.aggregate.directional_agreement;
    j["aggregate"] = std::move(agg);
    return j;
}

void emit_json(std::ostream& out, const Json& value) {
    out << value.dump(2) << '\n';
}

void emit_bundle_csv(std::ostream& out, const MetricsBundle& bundle) {
    write_csv_row(out, {"isic", "country", "year", "n_firms", "gini", "volume", "mode",
                        "std_error", "parallelotope_volume", "degenerate", "h_max",
                        "h_star", "h_norm", "bins", "seed", "theta_K", "theta_L"});
    for (const auto& [key, m] : bundle) {
        std::vector<std::string> row{
            key.isic,
            key.country,
            std::to_string(key.year),
            std::to_string(m.n_firms),
            format_double(m.gini.gini),
            format_double(m.gini.volume.value),
            m.gini.volume.mode == VolumeMode::exact ? "exact" : "sampled",
            m.gini.volume.std_error ? format_double(*m.gini.volume.std_error) : "",
            format_double(m.gini.parallelotope_volume),
            m.gini.degenerate ? "1" : "0",
            format_double(m.me.h_max),
            format_double(m.me.h_star),
            format_double(m.me.h_norm),
            std::to_string(m.me.bins),
            std::to_string(m.me.seed)};
        for (std::size_t i = 0; i < 2; ++i)
            row.push_back(i < m.tangent.angles.size() ? format_double(m.tangent.angles[i])
                                                      : "");
        write_csv_row(out, row);
    }
}

void emit_monte_carlo_csv(std::ostream& out, const MonteCarloReport& report) {
    write_csv_row(out, {"run", "gini_high", "gini_low", "me_high", "me_low",
                        "h_max_high", "h_max_low"});
    for (const auto& row : report.rows) {
        write_csv_row(out, {std::to_string(row.run), format_double(row.gini_high),
                            format_double(row.gini_low), format_double(row.me_high),
                            format_double(row.me_low), format_double(row.h_max_high),
                            format_double(row.h_max_low)});
    }
}

void emit_summary_csv(std::ostream& out,
                      const std::vector<std::pair<PanelKey, SummaryStats>>& rows) {
    write_csv_row(out, {"isic", "country", "year", "variable", "count", "mean",
                        "std_dev", "min", "max"});
    for (const auto& [key, s] : rows) {
        write_csv_row(out, {key.isic, key.country, std::to_string(key.year),
                            variable_name(s.variable), std::to_string(s.count),
                            format_double(s.mean), format_double(s.std_dev),
                            format_double(s.min), format_double(s.max)});
    }
}

void emit_availability_csv(std::ostream& out, const AvailabilityTable& table) {
    write_csv_row(out, {"isic", "country", "year", "count"});
    for (const auto& [key, count] : table.cells) {
        write_csv_row(out, {key.isic, key.country, std::to_string(key.year),
                            std::to_string(count)});
    }
}

void emit_records_csv(std::ostream& out, const std::vector<SurveyRecord>& records) {
    write_csv_row(out, {"firm_id", "country", "year", "isic", "fiscal_close_month",
                        "d2", "n7a", "n2a"});
    auto cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const auto& rec : records) {
        write_csv_row(out,
                      {rec.firm_id, rec.country, std::to_string(rec.year), rec.isic,
                       rec.fiscal_close_month ? std::to_string(*rec.fiscal_close_month)
                                              : std::string(),
                       cell(rec.sales), cell(rec.capital), cell(rec.labor_cost)});
    }
}

} // namespace hetero
