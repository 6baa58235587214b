#include "hetero/metrics.hpp"

namespace hetero {

GeneratorSet panel_generators(const std::vector<FirmObservation>& panel) {
    std::vector<std::vector<double>> vectors;
    vectors.reserve(panel.size());
    for (const auto& obs : panel) vectors.push_back({obs.k, obs.l, obs.y});
    return GeneratorSet(std::move(vectors), 2, {"K", "L", "Y"});
}

PanelMetrics compute_panel_metrics(const std::vector<FirmObservation>& panel,
                                   const MetricsOptions& options) {
    PanelMetrics m;
    m.n_firms = panel.size();
    const GeneratorSet generators = panel_generators(panel);
    m.gini = gini_volume(generators, options.volume);
    m.me = me_report(panel, options.clusters, options.seed, options.bins);
    m.tangent = tangent_angles(generators);
    return m;
}

MetricsBundle compute_bundle(const PanelMap& panels, const MetricsOptions& options) {
    MetricsBundle bundle;
    for (const auto& [key, panel] : panels)
        bundle.emplace(key, compute_panel_metrics(panel, options));
    return bundle;
}

} // namespace hetero
