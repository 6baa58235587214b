#include "hetero/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hetero/csv.hpp"
#include "hetero/entropy.hpp"
#include "hetero/errors.hpp"
#include "hetero/ingest.hpp"
#include "hetero/meregress.hpp"
#include "hetero/metrics.hpp"
#include "hetero/preprocess.hpp"
#include "hetero/serialize.hpp"
#include "hetero/simulate.hpp"
#include "hetero/zonotope.hpp"

namespace hetero {

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("HETERO_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
        }
    }
    return 42;
}

// Thrown by handlers for bad flag values detected after CLI11 parsing.
struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_to(const std::string& path, std::ostream& fallback,
              const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoFailure("cannot open " + path + " for writing");
    writer(file);
    if (!file) throw IoFailure("write failed for " + path);
}

ColumnMap parse_column_overrides(const std::string& spec) {
    ColumnMap map = default_column_map();
    if (spec.empty()) return map;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
            throw ValidationFailure("--columns entry '" + token + "' is not logical=actual");
        const std::string logical = token.substr(0, eq);
        if (map.find(logical) == map.end())
            throw ValidationFailure("--columns: unknown logical column '" + logical + "'");
        map[logical] = token.substr(eq + 1);
    }
    return map;
}

Variable variable_from(const std::string& name) {
    if (name == "Y") return Variable::Y;
    if (name == "K") return Variable::K;
    if (name == "L") return Variable::L;
    throw ValidationFailure("unknown variable '" + name + "' (expected Y, K or L)");
}

std::vector<std::pair<Variable, Variable>> parse_ratios(const std::string& spec) {
    std::vector<std::pair<Variable, Variable>> ratios;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto slash = token.find('/');
        if (slash == std::string::npos)
            throw ValidationFailure("--ratios entry '" + token + "' is not NUM/DEN");
        ratios.emplace_back(variable_from(token.substr(0, slash)),
                            variable_from(token.substr(slash + 1)));
    }
    if (ratios.empty()) throw ValidationFailure("--ratios: no ratios given");
    return ratios;
}

/// A dataset CSV (K,L,Y header) loads as one anonymous panel; anything else
/// is treated as a long-format survey file.
PanelMap load_panels(const std::string& path, const ColumnMap& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    const CsvTable table = read_csv(in);
    const bool is_dataset =
        table.column("K") && table.column("L") && table.column("Y");

    PanelMap panels;
    if (is_dataset) {
        std::stringstream buffer;
        write_csv(buffer, table.header, table.rows);
        const Dataset data = read_dataset_csv(buffer);
        std::vector<FirmObservation> panel;
        panel.reserve(data.size());
        for (std::size_t i = 0; i < data.size(); ++i)
            panel.push_back({data.Y[i], data.K[i], data.L[i]});
        panels.emplace(PanelKey{}, std::move(panel));
        return panels;
    }
    std::stringstream buffer;
    write_csv(buffer, table.header, table.rows);
    const auto records = parse_survey_csv(buffer, columns);
    return build_panels(records).panels;
}

// ---------------------------------------------------------------- preprocess

struct PreprocessArgs {
    std::string input, rates, output, columns;
    std::string ratios = "Y/L,K/L";
    double sd = 3.0;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
    OutlierPolicy policy;
    if (!(a.sd > 0)) throw ValidationFailure("--sd must be positive");
    policy.sd_multiplier = a.sd;
    policy.ratios = parse_ratios(a.ratios);
    const ColumnMap columns = parse_column_overrides(a.columns);

    std::ifstream in(a.input, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + a.input);
    const auto records = parse_survey_csv(in, columns);
    const RateTable rates = RateTable::from_csv_file(a.rates);

    PreprocessResult converted = to_usd_real(records, rates);
    PreprocessResult levels = trim_level_outliers(converted.records, policy);
    PreprocessResult ratios = trim_ratio_outliers(levels.records, policy);

    PreprocessReport report;
    report.converted = converted.report.converted;
    report.level_outliers_nulled = levels.report.level_outliers_nulled;
    report.ratio_outliers_nulled = ratios.report.ratio_outliers_nulled;

    write_to(a.output, out, [&](std::ostream& os) { emit_records_csv(os, ratios.records); });
    emit_json(err, to_json(report));
    return 0;
}

// ------------------------------------------------------------------- metrics

struct MetricsArgs {
    std::string input, output, columns;
    std::string format = "json";
    std::string volume_mode = "exact";
    std::size_t clusters = 10;
    std::size_t bins = 10;
    std::uint64_t seed = 42;
    std::uint64_t samples = 100000;
    std::uint64_t subset_cap = 100000000ULL;
};

enum class MetricChoice { gini, me, tangent, all };

int cmd_metrics(const MetricsArgs& a, MetricChoice which, std::ostream& out,
                std::ostream& err) {
    if (a.format != "json" && a.format != "csv")
        throw ValidationFailure("--format must be json or csv");
    MetricsOptions options;
    options.clusters = a.clusters;
    options.bins = a.bins;
    options.seed = a.seed;
    if (a.volume_mode == "exact") {
        options.volume.mode = VolumeMode::exact;
    } else if (a.volume_mode == "sampled") {
        options.volume.mode = VolumeMode::sampled;
    } else {
        throw ValidationFailure("--volume-mode must be exact or sampled");
    }
    options.volume.sample_count = a.samples;
    options.volume.seed = a.seed;
    options.volume.subset_cap = a.subset_cap;

    const PanelMap panels = load_panels(a.input, parse_column_overrides(a.columns));

    if (a.format == "json") {
        Json bundle = Json::object();
        for (const auto& [key, panel] : panels) {
            Json entry;
            switch (which) {
            case MetricChoice::gini:
                entry = to_json(gini_volume(panel_generators(panel), options.volume));
                break;
            case MetricChoice::me:
                entry = to_json(me_report(panel, options.clusters, options.seed, options.bins));
                break;
            case MetricChoice::tangent:
                entry = to_json(tangent_angles(panel_generators(panel)));
                break;
            case MetricChoice::all:
                entry = to_json(compute_panel_metrics(panel, options));
                break;
            }
            bundle[panel_key_name(key)] = std::move(entry);
        }
        write_to(a.output, out, [&](std::ostream& os) { emit_json(os, bundle); });
    } else {
        write_to(a.output, out, [&](std::ostream& os) {
            switch (which) {
            case MetricChoice::gini: {
                write_csv_row(os, {"isic", "country", "year", "n_firms", "gini", "volume",
                                   "mode", "std_error", "parallelotope_volume",
                                   "degenerate"});
                for (const auto& [key, panel] : panels) {
                    const auto m = gini_volume(panel_generators(panel), options.volume);
                    write_csv_row(os, {key.isic, key.country, std::to_string(key.year),
                                       std::to_string(panel.size()), format_double(m.gini),
                                       format_double(m.volume.value),
                                       m.volume.mode == VolumeMode::exact ? "exact"
                                                                          : "sampled",
                                       m.volume.std_error
                                           ? format_double(*m.volume.std_error)
                                           : "",
                                       format_double(m.parallelotope_volume),
                                       m.degenerate ? "1" : "0"});
                }
                break;
            }
            case MetricChoice::me: {
                write_csv_row(os, {"isic", "country", "year", "n_firms", "h_max", "h_star",
                                   "h_norm", "bins", "seed"});
                for (const auto& [key, panel] : panels) {
                    const auto r =
                        me_report(panel, options.clusters, options.seed, options.bins);
                    write_csv_row(os, {key.isic, key.country, std::to_string(key.year),
                                       std::to_string(panel.size()),
                                       format_double(r.h_max), format_double(r.h_star),
                                       format_double(r.h_norm), std::to_string(r.bins),
                                       std::to_string(r.seed)});
                }
                break;
            }
            case MetricChoice::tangent: {
                write_csv_row(os, {"isic", "country", "year", "n_firms", "theta_K",
                                   "theta_L"});
                for (const auto& [key, panel] : panels) {
                    const auto t = tangent_angles(panel_generators(panel));
                    std::vector<std::string> row{key.isic, key.country,
                                                 std::to_string(key.year),
                                                 std::to_string(panel.size())};
                    for (std::size_t i = 0; i < 2; ++i)
                        row.push_back(i < t.angles.size() ? format_double(t.angles[i])
                                                          : "");
                    write_csv_row(os, row);
                }
                break;
            }
            case MetricChoice::all:
                emit_bundle_csv(os, compute_bundle(panels, options));
                break;
            }
        });
    }
    if (which == MetricChoice::me || which == MetricChoice::all ||
        options.volume.mode == VolumeMode::sampled)
        err << "seed=" << a.seed << "\n";
    return 0;
}

// ----------------------------------------------------------------------- fit

struct FitArgs {
    std::string input, output;
    std::size_t order_k = 3, order_l = 3;
    bool polar = false;
    bool density = false;
    double tol = 1e-8;
    std::size_t max_iter = 200;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    if (!(a.tol > 0)) throw ValidationFailure("--tol must be positive");
    const Dataset data = read_dataset_csv_file(a.input);
    std::vector<SamplePoint> sample;
    sample.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        sample.push_back({data.K[i], data.L[i], data.Y[i]});

    const ScaledSample scaled = scale_to_unit(sample);
    const BasisSpec spec(a.order_k, a.order_l);
    FitOptions options;
    options.tol = a.tol;
    options.max_iter = a.max_iter;
    options.representation = a.polar ? Representation::polar : Representation::cartesian;

    FitResult result = fit_me_regression(scaled, spec, options);
    if (a.density) result.coefficients.c = fit_me_density(scaled, spec, options);
    if (!result.report.converged)
        err << "warning: moment matching stopped at residual "
            << result.report.moment_residual_norm << " (not converged)\n";

    Json j;
    j["coefficients"] = to_json(result.coefficients);
    j["report"] = to_json(result.report);
    write_to(a.output, out, [&](std::ostream& os) { emit_json(os, j); });
    return 0;
}

// ------------------------------------------------------------------ simulate

struct SimulateCesArgs {
    std::string out_path;
    std::size_t size = 2000;
    double sigma_u = 0.1;
    std::uint64_t seed = 42;
};

int cmd_simulate_ces(const SimulateCesArgs& a, std::ostream& out, std::ostream& err) {
    CesParams params;
    params.sample_size = a.size;
    params.sigma_u = a.sigma_u;
    params.seed = a.seed;
    const Dataset data = gen_ces(params);
    write_to(a.out_path, out, [&](std::ostream& os) {
        os << "K,L,Y\n";
        for (std::size_t i = 0; i < data.size(); ++i)
            os << format_double(data.K[i]) << ',' << format_double(data.L[i]) << ','
               << format_double(data.Y[i]) << '\n';
    });
    err << "seed=" << a.seed << "\n";
    return 0;
}

struct SimulateCdArgs {
    std::string out_path;
    std::string regime = "high";
    std::size_t firms = 100;
    std::uint64_t seed = 42;
};

int cmd_simulate_cobb_douglas(const SimulateCdArgs& a, std::ostream& out,
                              std::ostream& err) {
    CobbDouglasScenario scenario;
    if (a.regime == "high") {
        scenario.regime = Regime::high;
    } else if (a.regime == "low") {
        scenario.regime = Regime::low;
    } else {
        throw ValidationFailure("--regime must be high or low");
    }
    scenario.firms = a.firms;
    scenario.seed = a.seed;
    const Dataset data = gen_cobb_douglas(scenario);
    write_to(a.out_path, out, [&](std::ostream& os) {
        os << "K,L,Y\n";
        for (std::size_t i = 0; i < data.size(); ++i)
            os << format_double(data.K[i]) << ',' << format_double(data.L[i]) << ','
               << format_double(data.Y[i]) << '\n';
    });
    err << "seed=" << a.seed << "\n";
    return 0;
}

struct SimulateMcArgs {
    std::string outdir, output;
    std::string format = "json";
    std::size_t pairs = 100;
    std::size_t firms = 100;
    std::size_t clusters = 10;
    std::size_t bins = 10;
    std::uint64_t seed = 42;
};

int cmd_simulate_monte_carlo(const SimulateMcArgs& a, std::ostream& out,
                             std::ostream& err) {
    if (a.format != "json" && a.format != "csv")
        throw ValidationFailure("--format must be json or csv");
    MonteCarloOptions options;
    options.pairs = a.pairs;
    options.firms = a.firms;
    options.master_seed = a.seed;
    options.clusters = a.clusters;
    options.bins = a.bins;
    if (!a.outdir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(a.outdir, ec);
        if (ec) throw IoFailure("cannot create directory " + a.outdir);
        options.outdir = a.outdir;
    }
    const MonteCarloReport report = run_monte_carlo(options);
    write_to(a.output, out, [&](std::ostream& os) {
        if (a.format == "json")
            emit_json(os, to_json(report));
        else
            emit_monte_carlo_csv(os, report);
    });
    err << "seed=" << a.seed << "\n";
    return 0;
}

// ------------------------------------------------------------------- summary

struct SummaryArgs {
    std::string input, output, columns;
    std::string format = "json";
    std::string variable = "Y";
    double threshold = 100.0;
    bool availability = false;
};

int cmd_summary(const SummaryArgs& a, std::ostream& out, std::ostream& err) {
    (void)err;
    if (a.format != "json" && a.format != "csv")
        throw ValidationFailure("--format must be json or csv");
    const PanelMap panels = load_panels(a.input, parse_column_overrides(a.columns));
    if (panels.empty()) throw EmptyPanel("summary: no complete observations in input");

    const AvailabilityTable availability =
        availability_table(panels, a.threshold, variable_from(a.variable));

    std::vector<std::pair<PanelKey, SummaryStats>> rows;
    std::vector<FirmObservation> pooled;
    for (const auto& [key, panel] : panels) {
        for (Variable v : {Variable::Y, Variable::K, Variable::L})
            rows.emplace_back(key, summarize(panel, v));
        pooled.insert(pooled.end(), panel.begin(), panel.end());
    }
    const PanelKey overall{"*", "*", 0};
    for (Variable v : {Variable::Y, Variable::K, Variable::L})
        rows.emplace_back(overall, summarize(pooled, v));

    if (a.format == "json") {
        Json j;
        Json panels_json = Json::object();
        for (const auto& [key, panel] : panels) {
            Json stats;
            for (Variable v : {Variable::Y, Variable::K, Variable::L})
                stats[variable_name(v)] = to_json(summarize(panel, v));
            panels_json[panel_key_name(key)] = std::move(stats);
        }
        j["panels"] = std::move(panels_json);
        Json overall_json;
        for (Variable v : {Variable::Y, Variable::K, Variable::L})
            overall_json[variable_name(v)] = to_json(summarize(pooled, v));
        j["overall"] = std::move(overall_json);
        j["availability"] = to_json(availability);
        write_to(a.output, out, [&](std::ostream& os) { emit_json(os, j); });
    } else {
        write_to(a.output, out, [&](std::ostream& os) {
            if (a.availability)
                emit_availability_csv(os, availability);
            else
                emit_summary_csv(os, rows);
        });
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Industrial heterogeneity metrics: zonotope Gini volume, normalized "
                 "maximum entropy, ME production-function fits and the Monte Carlo "
                 "method comparison."};
    app.name("hetero");
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    const std::uint64_t seed_default = default_seed();

    // preprocess
    PreprocessArgs pre;
    CLI::App* preprocess =
        app.add_subcommand("preprocess", "Convert a survey CSV to real USD and trim "
                                         "level/ratio outliers (3-sigma rule)");
    preprocess->add_option("--input", pre.input, "survey CSV")->required();
    preprocess->add_option("--rates", pre.rates, "rate table CSV")->required();
    preprocess->add_option("--sd", pre.sd, "standard-deviation multiplier")
        ->capture_default_str();
    preprocess->add_option("--ratios", pre.ratios, "ratios to trim, e.g. Y/L,K/L")->capture_default_str();
    preprocess->add_option("--columns", pre.columns, "logical=actual column overrides");
    preprocess->add_option("--output", pre.output, "output path (default stdout)");

    // metrics
    MetricsArgs met;
    CLI::App* metrics = app.add_subcommand(
        "metrics", "Per-panel heterogeneity metrics from a survey or K,L,Y CSV");
    metrics->require_subcommand(1);
    metrics->fallthrough();
    metrics->add_option("--input", met.input, "input CSV")->required();
    metrics->add_option("--clusters", met.clusters, "k-means cluster count")->capture_default_str();
    metrics->add_option("--bins", met.bins, "histogram bins for H*")->capture_default_str();
    met.seed = seed_default;
    metrics->add_option("--seed", met.seed, "clustering seed")->capture_default_str();
    metrics->add_option("--volume-mode", met.volume_mode, "exact or sampled")->capture_default_str();
    metrics->add_option("--samples", met.samples, "sampled-mode subset draws")->capture_default_str();
    metrics->add_option("--subset-cap", met.subset_cap, "exact-mode subset cap")->capture_default_str();
    metrics->add_option("--columns", met.columns, "logical=actual column overrides");
    metrics->add_option("--format", met.format, "json or csv")->capture_default_str();
    metrics->add_option("--output", met.output, "output path (default stdout)");
    CLI::App* metrics_gini = metrics->add_subcommand("gini", "zonotope Gini volume");
    CLI::App* metrics_me = metrics->add_subcommand("me", "normalized maximum entropy");
    CLI::App* metrics_tangent =
        metrics->add_subcommand("tangent", "tangent against input axes");
    CLI::App* metrics_all = metrics->add_subcommand("all", "all metrics");

    // fit
    FitArgs fit;
    CLI::App* fit_cmd = app.add_subcommand(
        "fit", "Fit the maximum-entropy regression surface to a K,L,Y dataset");
    fit_cmd->add_option("--input", fit.input, "dataset CSV")->required();
    fit_cmd->add_option("--order-k", fit.order_k, "basis order in K")->capture_default_str();
    fit_cmd->add_option("--order-l", fit.order_l, "basis order in L")->capture_default_str();
    fit_cmd->add_flag("--polar", fit.polar, "fit in polar coordinates");
    fit_cmd->add_flag("--density", fit.density, "also fit the ME input density");
    fit_cmd->add_option("--tol", fit.tol, "moment residual tolerance")->capture_default_str();
    fit_cmd->add_option("--max-iter", fit.max_iter, "Newton iteration cap")->capture_default_str();
    fit_cmd->add_option("--output", fit.output, "output path (default stdout)");

    // simulate
    CLI::App* simulate = app.add_subcommand("simulate", "Synthetic data generators and "
                                                        "the Monte Carlo comparison");
    simulate->require_subcommand(1);
    SimulateCesArgs ces;
    ces.seed = seed_default;
    CLI::App* sim_ces = simulate->add_subcommand("ces", "CES baseline sample");
    sim_ces->add_option("--size", ces.size, "sample size")->capture_default_str();
    sim_ces->add_option("--sigma-u", ces.sigma_u, "residual standard deviation")->capture_default_str();
    sim_ces->add_option("--seed", ces.seed, "generator seed")->capture_default_str();
    sim_ces->add_option("--out", ces.out_path, "output CSV (default stdout)");

    SimulateCdArgs cd;
    cd.seed = seed_default;
    CLI::App* sim_cd = simulate->add_subcommand("cobb-douglas",
                                                "Cobb-Douglas heterogeneity regime");
    sim_cd->add_option("--regime", cd.regime, "high or low")->required();
    sim_cd->add_option("--firms", cd.firms, "firms per dataset")->capture_default_str();
    sim_cd->add_option("--seed", cd.seed, "generator seed")->capture_default_str();
    sim_cd->add_option("--out", cd.out_path, "output CSV (default stdout)");

    SimulateMcArgs mc;
    mc.seed = seed_default;
    CLI::App* sim_mc = simulate->add_subcommand(
        "monte-carlo", "paired high/low comparison of Gini volume vs normalized ME");
    sim_mc->add_option("--pairs", mc.pairs, "dataset pairs")->capture_default_str();
    sim_mc->add_option("--firms", mc.firms, "firms per dataset")->capture_default_str();
    sim_mc->add_option("--outdir", mc.outdir, "directory for the dataset CSV pairs");
    sim_mc->add_option("--seed", mc.seed, "master seed")->capture_default_str();
    sim_mc->add_option("--clusters", mc.clusters, "k-means cluster count")->capture_default_str();
    sim_mc->add_option("--bins", mc.bins, "histogram bins for H*")->capture_default_str();
    sim_mc->add_option("--format", mc.format, "json or csv")->capture_default_str();
    sim_mc->add_option("--output", mc.output, "report path (default stdout)");

    // summary
    SummaryArgs sum;
    CLI::App* summary = app.add_subcommand(
        "summary", "Availability table and per-panel Y/K/L summary statistics");
    summary->add_option("--input", sum.input, "input CSV")->required();
    summary->add_option("--threshold", sum.threshold, "availability threshold")->capture_default_str();
    summary->add_option("--variable", sum.variable, "availability variable (Y, K or L)")
        ->capture_default_str();
    summary->add_flag("--availability", sum.availability,
                      "emit the availability table in CSV mode");
    summary->add_option("--columns", sum.columns, "logical=actual column overrides");
    summary->add_option("--format", sum.format, "json or csv")->capture_default_str();
    summary->add_option("--output", sum.output, "output path (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    try {
        if (*preprocess) return cmd_preprocess(pre, out, err);
        if (*metrics) {
            MetricChoice which = MetricChoice::all;
            if (*metrics_gini) which = MetricChoice::gini;
            else if (*metrics_me) which = MetricChoice::me;
            else if (*metrics_tangent) which = MetricChoice::tangent;
            else if (*metrics_all) which = MetricChoice::all;
            return cmd_metrics(met, which, out, err);
        }
        if (*fit_cmd) return cmd_fit(fit, out, err);
        if (*simulate) {
            if (*sim_ces) return cmd_simulate_ces(ces, out, err);
            if (*sim_cd) return cmd_simulate_cobb_douglas(cd, out, err);
            if (*sim_mc) return cmd_simulate_monte_carlo(mc, out, err);
        }
        if (*summary) return cmd_summary(sum, out, err);
        err << "error: no command selected\n";
        return 1;
    } catch (const ValidationFailure& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace hetero
