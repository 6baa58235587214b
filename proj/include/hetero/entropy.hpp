#ifndef HETERO_ENTROPY_HPP
#define HETERO_ENTROPY_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hetero/ingest.hpp"

namespace hetero {

struct Point2 {
    double x = 0;
    double y = 0;
};

/// Fitted k-means state. Every observation is assigned to its nearest
/// centroid under squared Euclidean distance, ties resolved to the lowest
/// cluster index. Identical (points, k, seed) inputs reproduce the model
/// exactly.
struct ClusterModel {
    std::size_t k = 0;           // effective cluster count (reduced when |X| < k)
    std::size_t requested_k = 0;
    std::vector<Point2> centroids;
    std::vector<std::size_t> assignments;
    std::uint64_t seed = 0;
    std::size_t iterations_run = 0;
    double inertia = 0;
};

/// Lloyd's algorithm with seeded k-means++ initialization. Iterates until
/// the largest centroid shift drops below tol or max_iter is reached.
/// Empty clusters are refilled with the point farthest from its centroid
/// (skipped when every point already sits on its centroid).
ClusterModel kmeans_fit(const std::vector<Point2>& points, std::size_t k,
                        std::uint64_t seed, std::size_t max_iter = 300,
                        double tol = 1e-4);

/// Per-cluster maximum entropy over log-output values:
///   h = ln(y_max - y_min) + ln(mean(y)), clamped to zero when the range is
/// zero, the mean is nonpositive, or the value is not finite.
/// Throws EmptyCluster on empty input.
double cluster_max_entropy(const std::vector<double>& y_values);

struct ClusterEntropyRow {
    std::size_t cluster = 0;
    std::size_t n = 0;
    double weight = 0; // n / total
    double y_min = 0;  // over log-output
    double y_max = 0;
    double y_mean = 0;
    double h_max_cluster = 0;
};

struct MEReport {
    double h_max = 0;
    double h_star = 0;
    double h_norm = 0;
    std::vector<ClusterEntropyRow> rows;
    std::size_t bins = 10;
    std::size_t clusters = 10; // requested k
    std::uint64_t seed = 0;
};

/// Cluster firms on (ln K, ln L) and take the firm-weighted average of
/// per-cluster maximum entropies of ln Y. Returns a report with h_max and
/// the per-cluster rows populated. Throws EmptyPanel.
MEReport h_max_report(const std::vector<FirmObservation>& panel, std::size_t k = 10,
                      std::uint64_t seed = 42);

/// Realized entropy estimate: per cluster, the discrete Shannon entropy of
/// ln Y over `bins` equal-width bins spanning the cluster's own range,
/// firm-weighted across clusters. Zero-range clusters contribute zero.
double h_star(const std::vector<FirmObservation>& panel, const ClusterModel& model,
              std::size_t bins = 10);

/// H_norm = H* / H_max clamped to [0, 1]; zero when h_max is zero.
double normalized_me(double h_star, double h_max);

/// Full bundle: h_max, h_star and h_norm from one clustering pass.
MEReport me_report(const std::vector<FirmObservation>& panel, std::size_t k = 10,
                   std::uint64_t seed = 42, std::size_t bins = 10);

} // namespace hetero

#endif // HETERO_ENTROPY_HPP
