#include "hetero/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "hetero/errors.hpp"
#include "hetero/rng.hpp"

namespace hetero {

GeneratorSet::GeneratorSet(std::vector<std::vector<double>> vectors, std::size_t n_inputs,
                           std::vector<std::string> axis_labels)
    : vectors_(std::move(vectors)), n_inputs_(n_inputs), labels_(std::move(axis_labels)) {
    if (vectors_.empty()) throw std::invalid_argument("GeneratorSet: no generators");
    dim_ = vectors_.front().size();
    if (dim_ == 0) throw std::invalid_argument("GeneratorSet: zero-dimensional vectors");
    if (n_inputs_ > dim_)
        throw std::invalid_argument("GeneratorSet: n_inputs exceeds dimension");
    for (const auto& v : vectors_) {
        if (v.size() != dim_)
            throw std::invalid_argument("GeneratorSet: inconsistent dimensions");
        for (double x : v) {
            if (!std::isfinite(x) || x < 0)
                throw std::invalid_argument(
                    "GeneratorSet: components must be finite and nonnegative");
        }
    }
    if (labels_.empty()) {
        for (std::size_t i = 0; i < dim_; ++i) {
            labels_.push_back(i < n_inputs_
                                  ? "x" + std::to_string(i + 1)
                                  : "y" + std::to_string(i - n_inputs_ + 1));
        }
    } else if (labels_.size() != dim_) {
        throw std::invalid_argument("GeneratorSet: label count mismatch");
    }

    order_.resize(vectors_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(vectors_[a].begin(), vectors_[a].end(),
                                            vectors_[b].begin(), vectors_[b].end());
    });
}

std::vector<double> GeneratorSet::diagonal() const {
    std::vector<double> d(dim_, 0.0);
    for (std::size_t idx : order_) {
        const auto& v = vectors_[idx];
        for (std::size_t i = 0; i < dim_; ++i) d[i] += v[i];
    }
    return d;
}

std::optional<std::uint64_t> subset_count(std::size_t n, std::size_t d, std::uint64_t cap) {
    if (d > n) return 0;
    // C(n, d) via the multiplicative formula, bailing out past the cap.
    long double c = 1.0L;
    for (std::size_t i = 1; i <= d; ++i) {
        c = c * static_cast<long double>(n - d + i) / static_cast<long double>(i);
        if (c > static_cast<long double>(cap) * 1.0000001L)
            return std::nullopt;
    }
    return static_cast<std::uint64_t>(c + 0.5L);
}

namespace {

// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0;
    double comp = 0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
};

double abs_det(const std::vector<const std::vector<double>*>& rows, std::size_t d) {
    switch (d) {
    case 1:
        return std::abs((*rows[0])[0]);
    case 2: {
        const auto& a = *rows[0];
        const auto& b = *rows[1];
        return std::abs(a[0] * b[1] - a[1] * b[0]);
    }
    case 3: {
        const auto& a = *rows[0];
        const auto& b = *rows[1];
        const auto& c = *rows[2];
        return std::abs(a[0] * (b[1] * c[2] - b[2] * c[1]) -
                        a[1] * (b[0] * c[2] - b[2] * c[0]) +
                        a[2] * (b[0] * c[1] - b[1] * c[0]));
    }
    default: {
        Eigen::MatrixXd m(d, d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) m(r, c) = (*rows[r])[c];
        return std::abs(m.determinant());
    }
    }
}

// Advance a lexicographic d-combination over [0, n); false when exhausted.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t d = idx.size();
    std::size_t i = d;
    while (i-- > 0) {
        if (idx[i] != i + n - d) {
            ++idx[i];
            for (std::size_t j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

VolumeEstimate exact_volume(const GeneratorSet& g, const VolumeOptions& options) {
    const std::size_t n = g.size();
    const std::size_t d = g.dimension();
    const auto& order = g.canonical_order();
    const auto& vecs = g.vectors();

    auto count = subset_count(n, d, options.subset_cap);
    if (!count) {
        throw SubsetCapExceeded("exact mode needs more than " +
                                std::to_string(options.subset_cap) +
                                " subsets; use sampled mode");
    }

    // Fixed-size lexicographic chunks, each compensated independently and
    // merged in chunk order: a parallel partition by chunk index would
    // reproduce the serial result bit for bit.
    constexpr std::uint64_t kChunk = 1 << 16;
    CompensatedSum outer;
    CompensatedSum inner;
    std::uint64_t in_chunk = 0;

    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<const std::vector<double>*> rows(d);
    do {
        for (std::size_t i = 0; i < d; ++i) rows[i] = &vecs[order[idx[i]]];
        inner.add(abs_det(rows, d));
        if (++in_chunk == kChunk) {
            outer.add(inner.total());
            inner = CompensatedSum{};
            in_chunk = 0;
        }
    } while (next_combination(idx, n));
    if (in_chunk > 0) outer.add(inner.total());

    VolumeEstimate est;
    est.value = outer.total();
    est.mode = VolumeMode::exact;
    return est;
}

VolumeEstimate sampled_volume(const GeneratorSet& g, const VolumeOptions& options) {
    const std::size_t n = g.size();
    const std::size_t d = g.dimension();
    const auto& order = g.canonical_order();
    const auto& vecs = g.vectors();

    // C(N, d) as long double; may exceed 64 bits for large N.
    long double total_subsets = 1.0L;
    for (std::size_t i = 1; i <= d; ++i)
        total_subsets = total_subsets * static_cast<long double>(n - d + i) /
                        static_cast<long double>(i);

    const std::uint64_t draws = std::max<std::uint64_t>(options.sample_count, 2);
    Rng rng(options.seed);

    // Welford accumulation of |det| over uniformly drawn subsets.
    double mean = 0, m2 = 0;
    std::vector<std::size_t> chosen;
    std::vector<const std::vector<double>*> rows(d);
    for (std::uint64_t s = 0; s < draws; ++s) {
        // Floyd's algorithm: uniform d-subset of [0, n).
        chosen.clear();
        for (std::size_t j = n - d; j < n; ++j) {
            std::size_t t = static_cast<std::size_t>(rng.uniform_int(j + 1));
            if (std::find(chosen.begin(), chosen.end(), t) != chosen.end()) t = j;
            chosen.push_back(t);
        }
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t i = 0; i < d; ++i) rows[i] = &vecs[order[chosen[i]]];
        const double v = abs_det(rows, d);
        const double delta = v - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (v - mean);
    }
    const double scale = static_cast<double>(total_subsets);
    const double sample_sd = std::sqrt(m2 / static_cast<double>(draws - 1));

    VolumeEstimate est;
    est.value = scale * mean;
    est.mode = VolumeMode::sampled;
    est.sample_count = draws;
    est.std_error = scale * sample_sd / std::sqrt(static_cast<double>(draws));
    return est;
}

} // namespace

VolumeEstimate zonotope_volume(const GeneratorSet& g, const VolumeOptions& options) {
    if (g.size() < g.dimension()) {
        // Fewer generators than dimensions: the zonotope is flat.
        VolumeEstimate est;
        est.value = 0;
        est.mode = VolumeMode::exact;
        return est;
    }
    return options.mode == VolumeMode::exact ? exact_volume(g, options)
                                             : sampled_volume(g, options);
}

double parallelotope_volume(const GeneratorSet& g) {
    double volume = 1.0;
    for (double component : g.diagonal()) volume *= component;
    return volume;
}

ZonotopeMetrics gini_volume(const GeneratorSet& g, const VolumeOptions& options) {
    ZonotopeMetrics m;
    m.volume = zonotope_volume(g, options);
    m.diagonal = g.diagonal();
    m.parallelotope_volume = parallelotope_volume(g);
    if (m.parallelotope_volume > 0) {
        m.gini = m.volume.value / m.parallelotope_volume;
    } else {
        m.gini = 0;
        m.degenerate = true;
    }
    return m;
}

TangentReport tangent_angles(const GeneratorSet& g) {
    TangentReport report;
    report.diagonal = g.diagonal();
    const auto& d = report.diagonal;
    const std::size_t n_in = g.n_inputs();

    bool all_zero = true;
    for (double x : d)
        if (x != 0) all_zero = false;
    if (all_zero) throw ZeroDiagonal("tangent_angles: diagonal is the zero vector");

    for (std::size_t j = 0; j < n_in; ++j) {
        const double parallel = std::abs(d[j]);
        double perp_sq = 0;
        for (std::size_t k = 0; k < n_in; ++k)
            if (k != j) perp_sq += d[k] * d[k];
        for (std::size_t m = n_in; m < d.size(); ++m) perp_sq += d[m] * d[m];
        const double perp = std::sqrt(perp_sq);
        report.angles.push_back(std::atan2(perp, parallel));
        report.parallel_norms.push_back(parallel);
        report.perp_norms.push_back(perp);
        report.axis_labels.push_back(g.axis_labels()[j]);
    }
    return report;
}

BiasReport normalization_bias_report(double volume, double y_min, double y_max) {
    if (!(y_max > y_min) || y_min < 0)
        throw InvalidRange("normalization_bias_report: need y_max > y_min >= 0");
    if (volume < 0) throw InvalidRange("normalization_bias_report: negative volume");
    BiasReport report;
    report.biased_ratio = volume / y_max;
    report.adjusted_ratio = volume / (y_max - y_min);
    report.relative_bias = y_min / y_max;
    return report;
}

} // namespace hetero
