#ifndef HETERO_METRICS_HPP
#define HETERO_METRICS_HPP

#include <cstdint>
#include <map>

#include "hetero/entropy.hpp"
#include "hetero/ingest.hpp"
#include "hetero/zonotope.hpp"

namespace hetero {

struct MetricsOptions {
    std::size_t clusters = 10;
    std::size_t bins = 10;
    std::uint64_t seed = 42;
    VolumeOptions volume;
};

/// Everything the CLI reports per panel.
struct PanelMetrics {
    ZonotopeMetrics gini;
    MEReport me;
    TangentReport tangent;
    std::size_t n_firms = 0;
};

/// Bundle keyed and ordered by (isic, country, year).
using MetricsBundle = std::map<PanelKey, PanelMetrics>;

/// Build (K, L, Y) generators from a panel's observations.
GeneratorSet panel_generators(const std::vector<FirmObservation>& panel);

PanelMetrics compute_panel_metrics(const std::vector<FirmObservation>& panel,
                                   const MetricsOptions& options = {});

MetricsBundle compute_bundle(const PanelMap& panels, const MetricsOptions& options = {});

} // namespace hetero

#endif // HETERO_METRICS_HPP
