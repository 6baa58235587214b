#ifndef HETERO_QUADRATURE_HPP
#define HETERO_QUADRATURE_HPP

#include <cstddef>
#include <vector>

namespace hetero {

/// Gauss-Legendre rule transplanted to [0, 1].
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes and weights via Newton iteration on the Legendre recurrence;
/// exact for polynomials of degree <= 2n - 1.
QuadRule gauss_legendre_unit(std::size_t n);

} // namespace hetero

#endif // HETERO_QUADRATURE_HPP
