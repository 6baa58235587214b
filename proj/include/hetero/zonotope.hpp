#ifndef HETERO_ZONOTOPE_HPP
#define HETERO_ZONOTOPE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hetero {

/// Generators of the production zonotope: one nonnegative vector per firm,
/// inputs first, outputs after (dimension d = n_inputs + n_outputs).
/// The segment family [0, a_n] and the signed family [-a_n, a_n] share the
/// same diagonal sum, so one generator set serves both the volume and the
/// tangent computations.
class GeneratorSet {
public:
    GeneratorSet(std::vector<std::vector<double>> vectors, std::size_t n_inputs,
                 std::vector<std::string> axis_labels = {});

    std::size_t size() const { return vectors_.size(); }
    std::size_t dimension() const { return dim_; }
    std::size_t n_inputs() const { return n_inputs_; }
    const std::vector<std::vector<double>>& vectors() const { return vectors_; }
    const std::vector<std::string>& axis_labels() const { return labels_; }

    /// Generator indices sorted by componentwise lexicographic order.
    /// All reductions walk this order, so every metric is independent of
    /// the order generators were supplied in, bit for bit.
    const std::vector<std::size_t>& canonical_order() const { return order_; }

    /// Diagonal d_Y = sum of all generators, accumulated in canonical order.
    std::vector<double> diagonal() const;

private:
    std::vector<std::vector<double>> vectors_;
    std::size_t dim_ = 0;
    std::size_t n_inputs_ = 0;
    std::vector<std::string> labels_;
    std::vector<std::size_t> order_;
};

enum class VolumeMode { exact, sampled };

struct VolumeEstimate {
    double value = 0;
    VolumeMode mode = VolumeMode::exact;
    std::optional<std::uint64_t> sample_count;
    std::optional<double> std_error;
};

struct VolumeOptions {
    VolumeMode mode = VolumeMode::exact;
    std::uint64_t sample_count = 100000;      // sampled mode draws
    std::uint64_t seed = 42;                  // sampled mode stream
    std::uint64_t subset_cap = 100000000ULL;  // exact mode C(N, d) limit
};

struct ZonotopeMetrics {
    VolumeEstimate volume;
    std::vector<double> diagonal;
    double parallelotope_volume = 0;
    double gini = 0;
    bool degenerate = false; // zero parallelotope volume
};

struct TangentReport {
    std::vector<double> angles; // radians, one per input axis, in [0, pi/2]
    std::vector<std::string> axis_labels;
    std::vector<double> diagonal;
    std::vector<double> parallel_norms;
    std::vector<double> perp_norms;
};

struct BiasReport {
    double biased_ratio = 0;   // volume / y_max
    double adjusted_ratio = 0; // volume / (y_max - y_min)
    double relative_bias = 0;  // 1 - biased/adjusted = y_min / y_max
};

/// Zonotope volume: sum of |det| over all d-element generator subsets,
/// enumerated lexicographically with compensated chunk-merged accumulation
/// (exact mode), or the unbiased C(N,d) * mean(|det|) estimator over
/// uniformly drawn subsets (sampled mode). N < d yields a zero volume.
/// Throws SubsetCapExceeded when exact mode would enumerate more than
/// options.subset_cap subsets.
VolumeEstimate zonotope_volume(const GeneratorSet& g, const VolumeOptions& options = {});

/// Volume of the axis-aligned parallelotope with diagonal d_Y (the product
/// of the diagonal's components).
double parallelotope_volume(const GeneratorSet& g);

/// Gini volume G(Y) = Vol(Y) / Vol(P_Y); a zero denominator yields
/// gini = 0 with the degenerate flag set rather than NaN.
ZonotopeMetrics gini_volume(const GeneratorSet& g, const VolumeOptions& options = {});

/// Angle between the zonotope's main diagonal and each input axis.
/// Throws ZeroDiagonal when the diagonal is the zero vector.
TangentReport tangent_angles(const GeneratorSet& g);

/// The normalization-denominator diagnostic: the ratio against [0, y_max]
/// versus the entry-threshold-adjusted range [y_min, y_max].
/// Throws InvalidRange unless y_max > y_min >= 0 and volume >= 0.
BiasReport normalization_bias_report(double volume, double y_min, double y_max);

/// Number of d-subsets of n items, or nullopt when it exceeds `cap`.
std::optional<std::uint64_t> subset_count(std::size_t n, std::size_t d, std::uint64_t cap);

} // namespace hetero

#endif // HETERO_ZONOTOPE_HPP
