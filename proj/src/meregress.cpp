#include "hetero/meregress.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "hetero/errors.hpp"
#include "hetero/quadrature.hpp"

namespace hetero {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double scale_value(double v, double lo, double hi) {
    if (!(hi > lo)) return 0.5;
    return (v - lo) / (hi - lo);
}

double unscale_value(double u, double lo, double hi) {
    if (!(hi > lo)) return lo;
    return lo + u * (hi - lo);
}

namespace {

// Orthonormal shifted Legendre, no domain checks (callers validate).
double phi_raw(std::size_t m, double u) {
    const double t = 2.0 * u - 1.0;
    double p0 = 1.0;
    if (m == 0) return 1.0;
    double p1 = t;
    for (std::size_t j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * static_cast<double>(m) + 1.0) * p1;
}

} // namespace

BasisSpec::BasisSpec(std::size_t ok, std::size_t ol, ScalingBounds dom)
    : order_k(ok), order_l(ol), domain(dom) {
    const std::size_t max_order = std::max(order_k, order_l);
    const QuadRule quad = gauss_legendre_unit(64);
    for (std::size_t a = 0; a <= max_order; ++a) {
        for (std::size_t b = a; b <= max_order; ++b) {
            double inner = 0;
            for (std::size_t q = 0; q < quad.nodes.size(); ++q)
                inner += quad.weights[q] * phi_raw(a, quad.nodes[q]) *
                         phi_raw(b, quad.nodes[q]);
            const double expected = (a == b) ? 1.0 : 0.0;
            if (std::abs(inner - expected) > 1e-10)
                throw std::logic_error("BasisSpec: Gram identity violated at order " +
                                       std::to_string(b));
        }
    }
}

double basis_eval(const BasisSpec& spec, double u, std::size_t m) {
    if (!(u >= 0.0 && u <= 1.0))
        throw OutOfDomain("basis_eval: u outside [0, 1]");
    if (m > std::max(spec.order_k, spec.order_l))
        throw OutOfDomain("basis_eval: member index exceeds basis order");
    return phi_raw(m, u);
}

ScaledSample scale_to_unit(const std::vector<SamplePoint>& sample) {
    if (sample.empty()) throw std::invalid_argument("scale_to_unit: empty sample");
    ScaledSample scaled;
    scaled.bounds.k_min = scaled.bounds.k_max = sample.front().k;
    scaled.bounds.l_min = scaled.bounds.l_max = sample.front().l;
    for (const auto& p : sample) {
        if (!std::isfinite(p.k) || !std::isfinite(p.l))
            throw std::invalid_argument("scale_to_unit: non-finite input");
        scaled.bounds.k_min = std::min(scaled.bounds.k_min, p.k);
        scaled.bounds.k_max = std::max(scaled.bounds.k_max, p.k);
        scaled.bounds.l_min = std::min(scaled.bounds.l_min, p.l);
        scaled.bounds.l_max = std::max(scaled.bounds.l_max, p.l);
    }
    scaled.points.reserve(sample.size());
    for (const auto& p : sample) {
        scaled.points.push_back({scale_value(p.k, scaled.bounds.k_min, scaled.bounds.k_max),
                                 scale_value(p.l, scaled.bounds.l_min, scaled.bounds.l_max),
                                 p.y});
    }
    return scaled;
}

std::pair<double, double> polar_transform(double k01, double l01) {
    if (k01 == 0.0 && l01 == 0.0) return {0.0, 0.0};
    const double r = std::sqrt(k01 * k01 + l01 * l01) / std::sqrt(2.0);
    const double t = std::atan2(l01, k01) / (kPi / 2.0);
    return {std::clamp(r, 0.0, 1.0), std::clamp(t, 0.0, 1.0)};
}

const char* representation_name(Representation r) {
    return r == Representation::cartesian ? "cartesian" : "polar";
}

namespace {

// Design matrix: row t holds phi_mk(u_t) phi_ml(v_t) for all index pairs.
Eigen::MatrixXd design_matrix(const std::vector<std::pair<double, double>>& uv,
                              const BasisSpec& spec) {
    const std::size_t T = uv.size();
    const std::size_t M = spec.terms();
    Eigen::MatrixXd design(T, M);
    std::vector<double> pk(spec.order_k + 1), pl(spec.order_l + 1);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t a = 0; a <= spec.order_k; ++a) pk[a] = phi_raw(a, uv[t].first);
        for (std::size_t b = 0; b <= spec.order_l; ++b) pl[b] = phi_raw(b, uv[t].second);
        std::size_t m = 0;
        for (std::size_t a = 0; a <= spec.order_k; ++a)
            for (std::size_t b = 0; b <= spec.order_l; ++b) design(t, m++) = pk[a] * pl[b];
    }
    return design;
}

std::vector<std::pair<double, double>> fit_coordinates(const ScaledSample& sample,
                                                       Representation representation) {
    std::vector<std::pair<double, double>> uv;
    uv.reserve(sample.points.size());
    for (const auto& p : sample.points) {
        const double u = std::clamp(p.k, 0.0, 1.0);
        const double v = std::clamp(p.l, 0.0, 1.0);
        uv.push_back(representation == Representation::polar ? polar_transform(u, v)
                                                             : std::make_pair(u, v));
    }
    return uv;
}

struct NewtonProblem {
    Eigen::MatrixXd design; // P x M evaluation points
    Eigen::VectorXd weights; // per point
    Eigen::VectorXd target;  // moments to match
};

struct NewtonOutcome {
    Eigen::VectorXd s;
    double residual_norm = 0;
    std::size_t iterations = 0;
    bool converged = false;
    std::size_t damping_retries = 0;
};

Eigen::VectorXd residual_at(const NewtonProblem& prob, const Eigen::VectorXd& s) {
    const Eigen::ArrayXd expo = (prob.design * s).array().min(700.0);
    const Eigen::VectorXd wy = (expo.exp() * prob.weights.array()).matrix();
    return prob.design.transpose() * wy - prob.target;
}

/// Damped Newton on the moment residual with sup-norm backtracking.
NewtonOutcome newton_solve(const NewtonProblem& prob, const Eigen::VectorXd& init,
                           const FitOptions& options) {
    NewtonOutcome out;
    out.s = init;

    Eigen::VectorXd residual = residual_at(prob, out.s);
    double norm = residual.lpNorm<Eigen::Infinity>();
    Eigen::VectorXd best_s = out.s;
    double best_norm = norm;

    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        if (norm <= options.tol) {
            out.converged = true;
            break;
        }
        const Eigen::ArrayXd expo = (prob.design * out.s).array().min(700.0);
        const Eigen::VectorXd wy = (expo.exp() * prob.weights.array()).matrix();
        const Eigen::MatrixXd jac =
            prob.design.transpose() * wy.asDiagonal() * prob.design;

        // Solve J step = -residual, ridging the diagonal on failure.
        Eigen::VectorXd step;
        double lambda = 0;
        while (true) {
            Eigen::MatrixXd damped = jac;
            if (lambda > 0) damped.diagonal().array() += lambda;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            if (ldlt.info() == Eigen::Success) {
                step = ldlt.solve(-residual);
                if (step.allFinite()) break;
            }
            ++out.damping_retries;
            if (out.damping_retries > options.max_damping_retries)
                throw SingularJacobian("newton_solve: Jacobian singular after " +
                                       std::to_string(out.damping_retries) +
                                       " damping retries");
            lambda = (lambda == 0) ? 1e-10 * std::max(1.0, jac.norm()) : lambda * 100;
        }

        // Backtrack until the residual sup-norm improves.
        double alpha = 1.0;
        bool improved = false;
        Eigen::VectorXd trial_res;
        for (int half = 0; half < 60; ++half) {
            trial_res = residual_at(prob, out.s + alpha * step);
            const double trial_norm = trial_res.lpNorm<Eigen::Infinity>();
            if (std::isfinite(trial_norm) && trial_norm < norm) {
                out.s += alpha * step;
                residual = trial_res;
                norm = trial_norm;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        out.iterations = iter + 1;
        if (!improved) break; // stalled; report the best iterate
        if (norm < best_norm) {
            best_norm = norm;
            best_s = out.s;
        }
    }
    if (norm <= options.tol) out.converged = true;

    if (best_norm < norm) {
        out.s = best_s;
        norm = best_norm;
    }
    out.residual_norm = norm;
    return out;
}

} // namespace

MomentMatrix empirical_moments(const ScaledSample& sample, const BasisSpec& spec) {
    if (sample.points.empty())
        throw std::invalid_argument("empirical_moments: empty sample");
    const auto uv = fit_coordinates(sample, Representation::cartesian);
    const Eigen::MatrixXd design = design_matrix(uv, spec);
    Eigen::VectorXd y(sample.points.size());
    for (std::size_t t = 0; t < sample.points.size(); ++t) y(t) = sample.points[t].y;
    const Eigen::VectorXd nu = design.transpose() * y / static_cast<double>(y.size());

    MomentMatrix m;
    m.rows = spec.order_k + 1;
    m.cols = spec.order_l + 1;
    m.sample_size = sample.points.size();
    m.values.assign(nu.data(), nu.data() + nu.size());
    return m;
}

MomentMatrix model_moments(const ScaledSample& sample, const BasisSpec& spec,
                           const std::vector<double>& s, Representation representation) {
    const auto uv = fit_coordinates(sample, representation);
    const Eigen::MatrixXd design = design_matrix(uv, spec);
    const Eigen::Map<const Eigen::VectorXd> sv(s.data(), static_cast<Eigen::Index>(s.size()));
    const Eigen::ArrayXd expo = (design * sv).array().min(700.0);
    const Eigen::VectorXd nu =
        design.transpose() * expo.exp().matrix() / static_cast<double>(uv.size());

    MomentMatrix m;
    m.rows = spec.order_k + 1;
    m.cols = spec.order_l + 1;
    m.sample_size = uv.size();
    m.values.assign(nu.data(), nu.data() + nu.size());
    return m;
}

std::vector<double> moment_jacobian(const ScaledSample& sample, const BasisSpec& spec,
                                    const std::vector<double>& s,
                                    Representation representation) {
    const auto uv = fit_coordinates(sample, representation);
    const Eigen::MatrixXd design = design_matrix(uv, spec);
    const Eigen::Map<const Eigen::VectorXd> sv(s.data(), static_cast<Eigen::Index>(s.size()));
    const Eigen::ArrayXd expo = (design * sv).array().min(700.0);
    const Eigen::VectorXd wy = expo.exp().matrix() / static_cast<double>(uv.size());
    const Eigen::MatrixXd jac = design.transpose() * wy.asDiagonal() * design;

    std::vector<double> out(jac.size());
    for (Eigen::Index r = 0; r < jac.rows(); ++r)
        for (Eigen::Index c = 0; c < jac.cols(); ++c)
            out[static_cast<std::size_t>(r * jac.cols() + c)] = jac(r, c);
    return out;
}

FitResult fit_me_regression(const ScaledSample& sample, const BasisSpec& spec,
                            const FitOptions& options) {
    const std::size_t T = sample.points.size();
    const std::size_t M = spec.terms();
    if (T <= M)
        throw std::invalid_argument("fit_me_regression: sample size must exceed " +
                                    std::to_string(M));

    NewtonProblem prob;
    const auto uv = fit_coordinates(sample, options.representation);
    prob.design = design_matrix(uv, spec);
    prob.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(T),
                                             1.0 / static_cast<double>(T));
    Eigen::VectorXd y(static_cast<Eigen::Index>(T));
    for (std::size_t t = 0; t < T; ++t) y(static_cast<Eigen::Index>(t)) = sample.points[t].y;
    prob.target = prob.design.transpose() * y / static_cast<double>(T);

    // Warm start: least squares of ln y on the basis (the model is
    // log-linear in S).
    Eigen::VectorXd init = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
    std::vector<Eigen::Index> positive;
    for (std::size_t t = 0; t < T; ++t)
        if (sample.points[t].y > 0) positive.push_back(static_cast<Eigen::Index>(t));
    if (positive.size() >= M) {
        Eigen::MatrixXd a(static_cast<Eigen::Index>(positive.size()),
                          static_cast<Eigen::Index>(M));
        Eigen::VectorXd b(static_cast<Eigen::Index>(positive.size()));
        for (std::size_t i = 0; i < positive.size(); ++i) {
            a.row(static_cast<Eigen::Index>(i)) = prob.design.row(positive[i]);
            b(static_cast<Eigen::Index>(i)) = std::log(y(positive[i]));
        }
        init = a.colPivHouseholderQr().solve(b);
    } else if (!positive.empty()) {
        double sum = 0;
        for (Eigen::Index t : positive) sum += y(t);
        init(0) = std::log(sum / static_cast<double>(positive.size()));
    }

    const NewtonOutcome outcome = newton_solve(prob, init, options);

    FitResult result;
    result.coefficients.s.assign(outcome.s.data(), outcome.s.data() + outcome.s.size());
    result.coefficients.basis = spec;
    result.coefficients.basis.domain = sample.bounds;
    result.coefficients.representation = options.representation;

    result.report.iterations = outcome.iterations;
    result.report.converged = outcome.converged;
    result.report.damping_retries = outcome.damping_retries;
    // Independent re-evaluation of the moment residual at the returned S.
    const MomentMatrix check =
        model_moments(sample, spec, result.coefficients.s, options.representation);
    double residual = 0;
    for (std::size_t m = 0; m < M; ++m)
        residual = std::max(residual,
                            std::abs(check.values[m] - prob.target(static_cast<Eigen::Index>(m))));
    result.report.moment_residual_norm = residual;
    if (result.report.converged && residual > options.tol) result.report.converged = false;

    // R^2 on the original (unscaled-output) sample. Constant outputs have no
    // variance to explain; score them by whether the surface reproduces them.
    std::vector<double> actual(T), fitted(T);
    const Eigen::ArrayXd expo = (prob.design * outcome.s).array().min(700.0);
    double worst_gap = 0;
    for (std::size_t t = 0; t < T; ++t) {
        actual[t] = sample.points[t].y;
        fitted[t] = std::exp(expo(static_cast<Eigen::Index>(t)));
        worst_gap = std::max(worst_gap, std::abs(actual[t] - fitted[t]));
    }
    try {
        result.report.r_squared = r_squared(actual, fitted);
    } catch (const DegenerateVariance&) {
        result.report.r_squared =
            worst_gap <= 1e-9 * (1.0 + std::abs(actual.front())) ? 1.0 : 0.0;
    }
    return result;
}

std::vector<double> fit_me_density(const ScaledSample& sample, const BasisSpec& spec,
                                   const FitOptions& options) {
    const std::size_t T = sample.points.size();
    const std::size_t M = spec.terms();
    if (T <= M)
        throw std::invalid_argument("fit_me_density: sample size must exceed " +
                                    std::to_string(M));

    // Empirical basis expectations (phi_0 term pins the normalization).
    const auto uv = fit_coordinates(sample, options.representation);
    const Eigen::MatrixXd sample_design = design_matrix(uv, spec);
    const Eigen::VectorXd target =
        sample_design.colwise().sum().transpose() / static_cast<double>(T);

    // Quadrature grid on [0, 1]^2 for the model-side integrals.
    const QuadRule quad = gauss_legendre_unit(options.density_quad_nodes);
    std::vector<std::pair<double, double>> nodes;
    std::vector<double> weights;
    nodes.reserve(quad.nodes.size() * quad.nodes.size());
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
        for (std::size_t j = 0; j < quad.nodes.size(); ++j) {
            nodes.emplace_back(quad.nodes[i], quad.nodes[j]);
            weights.push_back(quad.weights[i] * quad.weights[j]);
        }
    }

    NewtonProblem prob;
    prob.design = design_matrix(nodes, spec);
    prob.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                     static_cast<Eigen::Index>(weights.size()));
    prob.target = target;

    const NewtonOutcome outcome =
        newton_solve(prob, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M)), options);
    if (!outcome.converged)
        throw NotConverged("fit_me_density: residual " +
                           std::to_string(outcome.residual_norm) + " after " +
                           std::to_string(outcome.iterations) + " iterations");
    return {outcome.s.data(), outcome.s.data() + outcome.s.size()};
}

Prediction predict(const MECoefficients& coeffs, double K, double L) {
    const ScalingBounds& b = coeffs.basis.domain;
    Prediction p;
    const double kc = std::clamp(K, b.k_min, b.k_max);
    const double lc = std::clamp(L, b.l_min, b.l_max);
    p.clamped = (kc != K) || (lc != L);

    double u = scale_value(kc, b.k_min, b.k_max);
    double v = scale_value(lc, b.l_min, b.l_max);
    if (coeffs.representation == Representation::polar) {
        auto [r, t] = polar_transform(u, v);
        u = r;
        v = t;
    }
    double expo = 0;
    std::size_t m = 0;
    for (std::size_t a = 0; a <= coeffs.basis.order_k; ++a)
        for (std::size_t bidx = 0; bidx <= coeffs.basis.order_l; ++bidx)
            expo += coeffs.s[m++] * phi_raw(a, u) * phi_raw(bidx, v);
    p.value = std::exp(std::min(expo, 700.0));
    return p;
}

double r_squared(const std::vector<double>& y, const std::vector<double>& y_hat) {
    if (y.size() != y_hat.size())
        throw std::invalid_argument("r_squared: size mismatch");
    if (y.size() < 2) throw std::invalid_argument("r_squared: need at least 2 points");
    const double n = static_cast<double>(y.size());
    double sum = 0, sum_sq = 0, rss = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sum += y[i];
        sum_sq += y[i] * y[i];
        const double d = y[i] - y_hat[i];
        rss += d * d;
    }
    const double mean = sum / n;
    const double denom = sum_sq - n * mean * mean;
    if (!(denom > 0)) throw DegenerateVariance("r_squared: zero output variance");
    return 1.0 - rss / denom;
}

} // namespace hetero
