#ifndef HETERO_MEREGRESS_HPP
#define HETERO_MEREGRESS_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace hetero {

/// Min-max bounds used to map raw (K, L) inputs onto the basis domain
/// [0, 1]^2. A constant dimension maps to 0.5.
struct ScalingBounds {
    double k_min = 0, k_max = 1;
    double l_min = 0, l_max = 1;
};

double scale_value(double v, double lo, double hi);   // -> [0, 1]
double unscale_value(double u, double lo, double hi); // inverse map

/// Tensor basis of orthonormal shifted Legendre polynomials on [0, 1]:
/// phi_0 = 1, phi_1(u) = sqrt(3)(2u - 1), phi_n(u) = sqrt(2n+1) P_n(2u-1).
/// Construction verifies the Gram identity numerically (64-node quadrature,
/// 1e-10) and throws std::logic_error if it fails.
struct BasisSpec {
    std::size_t order_k = 3;
    std::size_t order_l = 3;
    ScalingBounds domain;

    BasisSpec(std::size_t order_k = 3, std::size_t order_l = 3, ScalingBounds domain = {});

    std::size_t terms() const { return (order_k + 1) * (order_l + 1); }
};

/// Orthonormal shifted Legendre member m at u in [0, 1].
/// Throws OutOfDomain when u is outside [0, 1] or m exceeds the spec order.
double basis_eval(const BasisSpec& spec, double u, std::size_t m);

struct SamplePoint {
    double k = 0;
    double l = 0;
    double y = 0;
};

/// Sample with inputs mapped to [0, 1]^2; outputs are left untouched.
struct ScaledSample {
    std::vector<SamplePoint> points;
    ScalingBounds bounds;
};

ScaledSample scale_to_unit(const std::vector<SamplePoint>& sample);

/// Empirical moments nu_hat[mk][ml] = (1/T) sum_t phi_mk(K_t) phi_ml(L_t) y_t.
struct MomentMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> values; // row-major
    std::size_t sample_size = 0;

    double& at(std::size_t mk, std::size_t ml) { return values[mk * cols + ml]; }
    double at(std::size_t mk, std::size_t ml) const { return values[mk * cols + ml]; }
};

MomentMatrix empirical_moments(const ScaledSample& sample, const BasisSpec& spec);

enum class Representation { cartesian, polar };

const char* representation_name(Representation r);

/// Exponential-form surface y(K, L) = exp[sum S phi phi] with optional
/// density coefficients C of the same shape.
struct MECoefficients {
    std::vector<double> s; // row-major (order_k+1) x (order_l+1)
    std::optional<std::vector<double>> c;
    BasisSpec basis;
    Representation representation = Representation::cartesian;
};

struct FitReport {
    double r_squared = 0;
    double moment_residual_norm = 0; // sup-norm at the returned iterate
    std::size_t iterations = 0;
    bool converged = false;
    std::size_t damping_retries = 0;
};

struct FitOptions {
    std::size_t max_iter = 200;
    double tol = 1e-8;
    std::size_t max_damping_retries = 20;
    Representation representation = Representation::cartesian;
    std::size_t density_quad_nodes = 32; // per axis, for fit_me_density
};

struct FitResult {
    MECoefficients coefficients;
    FitReport report;
};

/// Match model moments (1/T) sum phi phi exp[S phi phi] to the empirical
/// moments by damped Newton with a backtracking line search on the residual
/// sup-norm, warm-started from least squares of ln y on the tensor basis.
/// Non-convergence returns the best iterate with converged = false;
/// an irreparably singular Jacobian throws SingularJacobian.
FitResult fit_me_regression(const ScaledSample& sample, const BasisSpec& spec,
                            const FitOptions& options = {});

/// Maximum-entropy density on [0, 1]^2: coefficients C such that
/// exp[sum C phi phi] matches the empirical basis expectations; matching
/// the phi_0 expectation pins the normalization, so the result integrates
/// to one. Throws NotConverged.
std::vector<double> fit_me_density(const ScaledSample& sample, const BasisSpec& spec,
                                   const FitOptions& options = {});

struct Prediction {
    double value = 0;
    bool clamped = false; // inputs fell outside the stored bounds
};

/// Evaluate the fitted surface at raw (K, L), clamping to the training
/// bounds and flagging when clamping occurred.
Prediction predict(const MECoefficients& coeffs, double K, double L);

/// Map scaled inputs to polar coordinates in [0, 1]^2:
/// r = sqrt(K^2 + L^2)/sqrt(2), t = atan2(L, K)/(pi/2); t(0, 0) = 0.
std::pair<double, double> polar_transform(double k01, double l01);

/// R^2 = 1 - sum (y - y_hat)^2 / (sum y^2 - T ybar^2).
/// Throws DegenerateVariance when the denominator is nonpositive.
double r_squared(const std::vector<double>& y, const std::vector<double>& y_hat);

/// Model moments at coefficients s: the re-verification path for the
/// moment-matching contract (same empirical averaging as the fit).
MomentMatrix model_moments(const ScaledSample& sample, const BasisSpec& spec,
                           const std::vector<double>& s,
                           Representation representation = Representation::cartesian);

/// Analytic Jacobian d(model moments)/d(s), row-major M x M with
/// M = (order_k+1)(order_l+1); exposed for finite-difference cross-checks.
std::vector<double> moment_jacobian(const ScaledSample& sample, const BasisSpec& spec,
                                    const std::vector<double>& s,
                                    Representation representation = Representation::cartesian);

} // namespace hetero

#endif // HETERO_MEREGRESS_HPP
