#include "hetero/simulate.hpp"

#include <cmath>
#include <fstream>

#include "hetero/csv.hpp"
#include "hetero/entropy.hpp"
#include "hetero/errors.hpp"
#include "hetero/ingest.hpp"
#include "hetero/rng.hpp"
#include "hetero/zonotope.hpp"

namespace hetero {

double ces_deterministic(const CesParams& p, double K, double L) {
    const double bracket =
        p.delta * std::pow(K, -p.rho) + (1.0 - p.delta) * std::pow(L, -p.rho);
    return p.gamma * std::pow(bracket, -p.upsilon / p.rho);
}

Dataset gen_ces(const CesParams& p) {
    Rng rng(p.seed);
    Dataset data;
    data.K.resize(p.sample_size);
    data.L.resize(p.sample_size);
    data.Y.resize(p.sample_size);
    // Column-ordered draws: all K, then all L, then all residuals.
    // K^-rho needs strictly positive inputs; redraw the measure-zero 0.
    auto positive_uniform = [&rng] {
        double v;
        do {
            v = rng.uniform();
        } while (v == 0.0);
        return v;
    };
    for (auto& k : data.K) k = positive_uniform();
    for (auto& l : data.L) l = positive_uniform();
    for (std::size_t t = 0; t < p.sample_size; ++t) {
        const double u = rng.normal(0.0, p.sigma_u);
        data.Y[t] = ces_deterministic(p, data.K[t], data.L[t]) * std::exp(u);
    }
    return data;
}

double cobb_douglas_output(double A, double K, double L, double alpha, double beta) {
    return A * std::pow(K, alpha) * std::pow(L, beta);
}

Dataset gen_cobb_douglas(const CobbDouglasScenario& sc) {
    Rng rng(sc.seed);
    Dataset data;
    data.K.resize(sc.firms);
    data.L.resize(sc.firms);
    data.Y.resize(sc.firms);
    std::vector<double> tfp(sc.firms);

    if (sc.regime == Regime::high) {
        for (auto& k : data.K) k = rng.uniform(sc.k_lo, sc.k_hi);
        for (auto& l : data.L) l = rng.uniform(sc.l_lo, sc.l_hi);
        for (auto& a : tfp) a = rng.uniform(sc.a_lo, sc.a_hi);
    } else {
        // mu = ln(target) - sigma^2/2 makes the lognormal mean hit the target.
        const double mu_k = std::log(sc.k_target_mean) - 0.5 * sc.sigma_k * sc.sigma_k;
        const double mu_l = std::log(sc.l_target_mean) - 0.5 * sc.sigma_l * sc.sigma_l;
        for (auto& k : data.K) k = std::exp(rng.normal(mu_k, sc.sigma_k));
        for (auto& l : data.L) l = std::exp(rng.normal(mu_l, sc.sigma_l));
        for (auto& a : tfp) a = std::exp(rng.normal(0.0, sc.sigma_a));
    }
    for (std::size_t i = 0; i < sc.firms; ++i)
        data.Y[i] = cobb_douglas_output(tfp[i], data.K[i], data.L[i], sc.alpha, sc.beta);
    return data;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << "K,L,Y\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << format_double(data.K[i]) << ',' << format_double(data.L[i]) << ','
            << format_double(data.Y[i]) << '\n';
    }
    if (!out) throw IoFailure("write failed for " + path);
}

Dataset read_dataset_csv(std::istream& in) {
    const CsvTable table = read_csv(in);
    auto col = [&](const char* name) {
        auto idx = table.column(name);
        if (!idx) throw MissingColumn(std::string("dataset lacks column '") + name + "'");
        return *idx;
    };
    const std::size_t ck = col("K"), cl = col("L"), cy = col("Y");
    Dataset data;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        try {
            data.K.push_back(std::stod(table.rows[r][ck]));
            data.L.push_back(std::stod(table.rows[r][cl]));
            data.Y.push_back(std::stod(table.rows[r][cy]));
        } catch (...) {
            throw MalformedCsv("dataset row " + std::to_string(r + 1) + ": unparseable value");
        }
    }
    return data;
}

Dataset read_dataset_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    return read_dataset_csv(in);
}

std::pair<std::string, std::string> write_dataset_pair(std::size_t run_index,
                                                       const std::string& dir,
                                                       const Dataset& high,
                                                       const Dataset& low) {
    const std::string base = dir.empty() ? std::string() : dir + "/";
    const std::string high_path =
        base + std::to_string(run_index) + "-high_heterogeneity_data.csv";
    const std::string low_path =
        base + std::to_string(run_index) + "-low_heterogeneity_data.csv";
    write_dataset_csv(high, high_path);
    write_dataset_csv(low, low_path);
    return {high_path, low_path};
}

namespace {

std::vector<FirmObservation> to_observations(const Dataset& data) {
    std::vector<FirmObservation> obs;
    obs.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        obs.push_back({data.Y[i], data.K[i], data.L[i]});
    return obs;
}

GeneratorSet to_generators(const Dataset& data) {
    std::vector<std::vector<double>> vectors;
    vectors.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        vectors.push_back({data.K[i], data.L[i], data.Y[i]});
    return GeneratorSet(std::move(vectors), 2, {"K", "L", "Y"});
}

struct MeanSd {
    double mean = 0, sd = 0;
};

MeanSd mean_sd(const std::vector<MonteCarloRun>& rows, double MonteCarloRun::*field) {
    MeanSd out;
    if (rows.empty()) return out;
    for (const auto& r : rows) out.mean += r.*field;
    out.mean /= static_cast<double>(rows.size());
    double ss = 0;
    for (const auto& r : rows) {
        const double d = r.*field - out.mean;
        ss += d * d;
    }
    out.sd = std::sqrt(ss / static_cast<double>(rows.size()));
    return out;
}

} // namespace

MonteCarloReport run_monte_carlo(const MonteCarloOptions& options) {
    MonteCarloReport report;
    report.options = options;

    for (std::size_t i = 1; i <= options.pairs; ++i) {
        // Independent streams per run: data draws and clustering each get
        // their own derived seed, so runs can execute in any order.
        CobbDouglasScenario high;
        high.regime = Regime::high;
        high.firms = options.firms;
        high.seed = mix_seed(options.master_seed, 4 * i);
        CobbDouglasScenario low = high;
        low.regime = Regime::low;
        low.seed = mix_seed(options.master_seed, 4 * i + 1);

        const Dataset data_high = gen_cobb_douglas(high);
        const Dataset data_low = gen_cobb_douglas(low);
        if (options.outdir) write_dataset_pair(i, *options.outdir, data_high, data_low);

        MonteCarloRun row;
        row.run = i;
        row.gini_high = gini_volume(to_generators(data_high)).gini;
        row.gini_low = gini_volume(to_generators(data_low)).gini;

        const MEReport me_high =
            me_report(to_observations(data_high), options.clusters,
                      mix_seed(options.master_seed, 4 * i + 2), options.bins);
        const MEReport me_low =
            me_report(to_observations(data_low), options.clusters,
                      mix_seed(options.master_seed, 4 * i + 3), options.bins);
        row.me_high = me_high.h_norm;
        row.me_low = me_low.h_norm;
        row.h_max_high = me_high.h_max;
        row.h_max_low = me_low.h_max;
        report.rows.push_back(row);
    }

    auto& agg = report.aggregate;
    const MeanSd gh = mean_sd(report.rows, &MonteCarloRun::gini_high);
    const MeanSd gl = mean_sd(report.rows, &MonteCarloRun::gini_low);
    const MeanSd mh = mean_sd(report.rows, &MonteCarloRun::me_high);
    const MeanSd ml = mean_sd(report.rows, &MonteCarloRun::me_low);
    agg.mean_gini_high = gh.mean;
    agg.sd_gini_high = gh.sd;
    agg.mean_gini_low = gl.mean;
    agg.sd_gini_low = gl.sd;
    agg.mean_me_high = mh.mean;
    agg.sd_me_high = mh.sd;
    agg.mean_me_low = ml.mean;
    agg.sd_me_low = ml.sd;
    for (const auto& r : report.rows) {
        const bool me_gt = r.me_high > r.me_low;
        const bool gini_gt = r.gini_high > r.gini_low;
        if (me_gt) ++agg.me_high_gt_low;
        if (gini_gt) ++agg.gini_high_gt_low;
        if (me_gt == gini_gt) ++agg.directional_agreement;
    }
    return report;
}

} // namespace hetero
