#include "hetero/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hetero {

QuadRule gauss_legendre_unit(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre_unit: n must be positive");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-flavored initial guess for the i-th root of P_n.
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n and P_n' by the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1, 1] to [0, 1]; roots come in symmetric pairs.
        rule.nodes[i] = (1.0 - x) / 2.0;
        rule.nodes[n - 1 - i] = (1.0 + x) / 2.0;
        rule.weights[i] = w / 2.0;
        rule.weights[n - 1 - i] = w / 2.0;
    }
    return rule;
}

} // namespace hetero
