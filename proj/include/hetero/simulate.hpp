#ifndef HETERO_SIMULATE_HPP
#define HETERO_SIMULATE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hetero {

/// CES baseline y = gamma [delta K^-rho + (1-delta) L^-rho]^(-upsilon/rho) e^u
/// with Kmenta's parameter values; inputs uniform on [0, 1],
/// u ~ Normal(0, sigma_u^2) with sigma_u = 0.1 by default.
struct CesParams {
    double gamma = std::exp(1.0564);
    double delta = 0.4064;
    double upsilon = 0.8222;
    double rho = 0.6042;
    double sigma_u = 0.1;
    std::size_t sample_size = 2000;
    std::uint64_t seed = 42;
};

/// Column-oriented (K, L, Y) dataset.
struct Dataset {
    std::vector<double> K, L, Y;
    std::size_t size() const { return Y.size(); }
};

double ces_deterministic(const CesParams& params, double K, double L);
Dataset gen_ces(const CesParams& params);

enum class Regime { high, low };

/// Cobb-Douglas Y = A K^alpha L^beta. The "high heterogeneity" regime draws
/// all three factors from uniform ranges; the "low" regime draws lognormal
/// inputs calibrated to the same means and a lognormal TFP exp(N(0, 0.5)).
/// The naming follows the uniform-is-high convention even though the
/// uniform regime has the tighter output dispersion.
struct CobbDouglasScenario {
    double alpha = 0.33; // alpha + beta = 0.99, near constant returns
    double beta = 0.66;
    std::size_t firms = 100;
    Regime regime = Regime::high;
    std::uint64_t seed = 42;

    // high regime
    double k_lo = 2900, k_hi = 3100;
    double l_lo = 120, l_hi = 130;
    double a_lo = 1.5, a_hi = 2.5;
    // low regime
    double sigma_k = 0.01344;
    double sigma_l = 0.01661;
    double sigma_a = 0.5;
    double k_target_mean = 3000;
    double l_target_mean = 125;
};

double cobb_douglas_output(double A, double K, double L, double alpha, double beta);
Dataset gen_cobb_douglas(const CobbDouglasScenario& scenario);

/// Write a dataset as CSV with header "K,L,Y", 17 significant digits.
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);

/// Write "{i}-high_heterogeneity_data.csv" and
/// "{i}-low_heterogeneity_data.csv" into dir; returns the two paths.
std::pair<std::string, std::string> write_dataset_pair(std::size_t run_index,
                                                       const std::string& dir,
                                                       const Dataset& high,
                                                       const Dataset& low);

struct MonteCarloRun {
    std::size_t run = 0;     // 1-based
    double gini_high = 0;
    double gini_low = 0;
    double me_high = 0;      // normalized ME (h_norm)
    double me_low = 0;
    double h_max_high = 0;   // unnormalized variant, reported alongside
    double h_max_low = 0;
};

struct MonteCarloAggregate {
    double mean_gini_high = 0, sd_gini_high = 0;
    double mean_gini_low = 0, sd_gini_low = 0;
    double mean_me_high = 0, sd_me_high = 0;
    double mean_me_low = 0, sd_me_low = 0;
    std::size_t me_high_gt_low = 0;
    std::size_t gini_high_gt_low = 0;
    std::size_t directional_agreement = 0; // runs where gini ordering matches ME's
};

struct MonteCarloOptions {
    std::size_t pairs = 100;
    std::size_t firms = 100;
    std::uint64_t master_seed = 42;
    std::size_t clusters = 10;
    std::size_t bins = 10;
    std::optional<std::string> outdir; // when set, dataset pairs are written
};

struct MonteCarloReport {
    std::vector<MonteCarloRun> rows;
    MonteCarloAggregate aggregate;
    MonteCarloOptions options;
};

/// The paired-design comparison: per run, generate a high and a low
/// heterogeneity dataset from per-run seeds derived from the master seed,
/// score both with the exact Gini volume (d = 3) and the normalized ME
/// (k-means on log-inputs), and aggregate directional statistics.
MonteCarloReport run_monte_carlo(const MonteCarloOptions& options = {});

} // namespace hetero

#endif // HETERO_SIMULATE_HPP
