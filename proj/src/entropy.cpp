#include "hetero/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hetero/errors.hpp"
#include "hetero/rng.hpp"

namespace hetero {

namespace {

double dist_sq(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

std::size_t nearest_centroid(const Point2& p, const std::vector<Point2>& centroids) {
    std::size_t best = 0;
    double best_d = dist_sq(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = dist_sq(p, centroids[c]);
        if (d < best_d) { // strict: ties keep the lowest index
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::vector<Point2> kmeanspp_init(const std::vector<Point2>& points, std::size_t k,
                                  Rng& rng) {
    const std::size_t n = points.size();
    std::vector<Point2> centroids;
    centroids.push_back(points[rng.uniform_int(n)]);
    std::vector<double> d2(n);
    while (centroids.size() < k) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = dist_sq(points[i], centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c)
                best = std::min(best, dist_sq(points[i], centroids[c]));
            d2[i] = best;
            total += best;
        }
        if (total <= 0) {
            centroids.push_back(points[rng.uniform_int(n)]);
            continue;
        }
        const double r = rng.uniform() * total;
        double cum = 0;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            cum += d2[i];
            if (r < cum) {
                pick = i;
                break;
            }
        }
        centroids.push_back(points[pick]);
    }
    return centroids;
}

} // namespace

ClusterModel kmeans_fit(const std::vector<Point2>& points, std::size_t k,
                        std::uint64_t seed, std::size_t max_iter, double tol) {
    if (points.empty()) throw EmptyPanel("kmeans_fit: no points");
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("kmeans_fit: non-finite point");
    }

    ClusterModel model;
    model.requested_k = k;
    model.seed = seed;
    const std::size_t n = points.size();
    if (k == 0) k = 1;
    if (k > n) k = n;
    model.k = k;

    Rng rng(seed);
    model.centroids = kmeanspp_init(points, k, rng);
    model.assignments.assign(n, 0);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            model.assignments[i] = nearest_centroid(points[i], model.centroids);

        std::vector<Point2> sums(k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[model.assignments[i]].x += points[i].x;
            sums[model.assignments[i]].y += points[i].y;
            ++counts[model.assignments[i]];
        }
        std::vector<Point2> updated(k);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                updated[c] = {sums[c].x / static_cast<double>(counts[c]),
                              sums[c].y / static_cast<double>(counts[c])};
            } else {
                updated[c] = model.centroids[c]; // refilled below
            }
        }

        // Refill empty clusters with the point farthest from its centroid.
        std::vector<bool> claimed(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            double far_d = 0;
            std::size_t far_i = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (claimed[i]) continue;
                const double d = dist_sq(points[i], updated[model.assignments[i]]);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            if (far_i == n) continue; // every point sits on its centroid
            updated[c] = points[far_i];
            claimed[far_i] = true;
        }

        double shift = 0;
        for (std::size_t c = 0; c < k; ++c)
            shift = std::max(shift, std::sqrt(dist_sq(updated[c], model.centroids[c])));
        model.centroids = updated;
        model.iterations_run = iter + 1;
        if (shift < tol) break;
    }

    // Final assignment pass against the final centroids keeps the
    // nearest-centroid invariant.
    model.inertia = 0;
    for (std::size_t i = 0; i < n; ++i) {
        model.assignments[i] = nearest_centroid(points[i], model.centroids);
        model.inertia += dist_sq(points[i], model.centroids[model.assignments[i]]);
    }
    return model;
}

double cluster_max_entropy(const std::vector<double>& y_values) {
    if (y_values.empty()) throw EmptyCluster("cluster_max_entropy: empty cluster");
    double lo = y_values.front(), hi = y_values.front(), sum = 0;
    for (double v : y_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    const double range = hi - lo;
    const double mean = sum / static_cast<double>(y_values.size());
    if (!(range > 0) || !(mean > 0)) return 0;
    const double h = std::log(range) + std::log(mean);
    if (!std::isfinite(h)) return 0;
    return std::max(h, 0.0);
}

namespace {

struct Clustered {
    ClusterModel model;
    std::vector<std::vector<double>> log_y; // per cluster
};

Clustered cluster_panel(const std::vector<FirmObservation>& panel, std::size_t k,
                        std::uint64_t seed) {
    if (panel.empty()) throw EmptyPanel("entropy: empty panel");
    std::vector<Point2> inputs;
    inputs.reserve(panel.size());
    for (const auto& obs : panel) inputs.push_back({std::log(obs.k), std::log(obs.l)});

    Clustered result;
    result.model = kmeans_fit(inputs, k, seed);
    result.log_y.resize(result.model.k);
    for (std::size_t i = 0; i < panel.size(); ++i)
        result.log_y[result.model.assignments[i]].push_back(std::log(panel[i].y));
    return result;
}

MEReport report_from(const Clustered& clustered, std::size_t total) {
    MEReport report;
    report.seed = clustered.model.seed;
    report.clusters = clustered.model.requested_k;
    for (std::size_t c = 0; c < clustered.model.k; ++c) {
        const auto& ys = clustered.log_y[c];
        if (ys.empty()) continue;
        ClusterEntropyRow row;
        row.cluster = c;
        row.n = ys.size();
        row.weight = static_cast<double>(ys.size()) / static_cast<double>(total);
        row.y_min = *std::min_element(ys.begin(), ys.end());
        row.y_max = *std::max_element(ys.begin(), ys.end());
        double sum = 0;
        for (double v : ys) sum += v;
        row.y_mean = sum / static_cast<double>(ys.size());
        row.h_max_cluster = cluster_max_entropy(ys);
        report.h_max += row.weight * row.h_max_cluster;
        report.rows.push_back(row);
    }
    return report;
}

double binned_entropy(const std::vector<double>& values, std::size_t bins) {
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    const double range = hi - lo;
    if (!(range > 0)) return 0;
    std::vector<std::size_t> counts(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / range * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        ++counts[b];
    }
    double entropy = 0;
    const double n = static_cast<double>(values.size());
    for (std::size_t count : counts) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / n;
        entropy -= p * std::log(p);
    }
    return entropy;
}

} // namespace

MEReport h_max_report(const std::vector<FirmObservation>& panel, std::size_t k,
                      std::uint64_t seed) {
    const Clustered clustered = cluster_panel(panel, k, seed);
    return report_from(clustered, panel.size());
}

double h_star(const std::vector<FirmObservation>& panel, const ClusterModel& model,
              std::size_t bins) {
    if (panel.size() != model.assignments.size())
        throw std::invalid_argument("h_star: model fitted on a different panel");
    if (bins == 0) throw std::invalid_argument("h_star: bins must be positive");
    std::vector<std::vector<double>> log_y(model.k);
    for (std::size_t i = 0; i < panel.size(); ++i)
        log_y[model.assignments[i]].push_back(std::log(panel[i].y));

    double total_entropy = 0;
    for (const auto& ys : log_y) {
        if (ys.empty()) continue;
        const double w = static_cast<double>(ys.size()) / static_cast<double>(panel.size());
        total_entropy += w * binned_entropy(ys, bins);
    }
    return total_entropy;
}

double normalized_me(double h_star_value, double h_max_value) {
    if (!(h_max_value > 0)) return 0;
    return std::clamp(h_star_value / h_max_value, 0.0, 1.0);
}

MEReport me_report(const std::vector<FirmObservation>& panel, std::size_t k,
                   std::uint64_t seed, std::size_t bins) {
    const Clustered clustered = cluster_panel(panel, k, seed);
    MEReport report = report_from(clustered, panel.size());
    report.bins = bins;
    report.h_star = h_star(panel, clustered.model, bins);
    report.h_norm = normalized_me(report.h_star, report.h_max);
    return report;
}

} // namespace hetero
