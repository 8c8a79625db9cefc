#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "hoelderflow/errors.hpp"

namespace hoelderflow {

/// A driver path on a uniform grid. Row i of `values` is the point at
/// t0 + i*dt; `beta_prime` is the declared Hoelder exponent of the path.
struct SampledPath {
    double t0 = 0.0;
    double dt = 0.0;
    Eigen::MatrixXd values;  // (steps+1) x m
    double beta_prime = 0.0;

    std::size_t steps() const { return static_cast<std::size_t>(values.rows()) - 1; }
    Eigen::Index dim() const { return values.cols(); }
    double horizon() const { return static_cast<double>(steps()) * dt; }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    Eigen::RowVectorXd value(std::size_t i) const { return values.row(static_cast<Eigen::Index>(i)); }

    // Grid index of time t; throws std::domain_error if t is off-grid.
    std::size_t index_of(double t) const;

    void validate() const;  // dt > 0, non-empty, finite entries
};

/// Matrix-valued integrand on the same uniform-grid layout; entry i is a
/// d x m matrix. `beta` is the declared Hoelder exponent of the integrand.
struct MatrixPath {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<Eigen::MatrixXd> values;
    double beta = 0.0;

    std::size_t steps() const { return values.size() - 1; }
    double horizon() const { return static_cast<double>(steps()) * dt; }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    std::size_t index_of(double t) const;

    void validate() const;
};

/// Discrete Hoelder statistics of a path over a grid window.
struct HoelderStats {
    double seminorm = 0.0;  // sup over pairs of |x(r)-x(q)| / (r-q)^beta
    double sup = 0.0;       // sup over the window of |x(r)|
    bool lag_capped = false;
    std::size_t pairs_evaluated = 0;

    double norm() const { return seminorm + sup; }
};

// Pair-lag cap: windows with more than this many steps use all lags up to
// the cap plus dyadic long lags, and set `lag_capped` in the result.
inline constexpr std::size_t kSeminormLagCap = std::size_t{1} << 13;

HoelderStats holder_stats(const SampledPath& path, double beta, double a, double b);
double holder_seminorm(const SampledPath& path, double beta, double a, double b);
double sup_norm(const SampledPath& path, double a, double b);
double holder_norm(const SampledPath& path, double beta, double a, double b);

HoelderStats holder_stats(const MatrixPath& path, double beta, double a, double b);

/// Wiener shift: (theta_tau x)(s) = x(s + tau) - x(tau), on the grid.
SampledPath wiener_shift(const SampledPath& path, double tau);

/// Garsia-Rodemich-Rumsey diagnostic: the double-grid quadrature
///   ( sum_{i != j} |x(u_i)-x(u_j)|^{2p} / |u_i-u_j|^{2 gamma p + 2} du^2 )^{1/(2p)}
/// with the constant taken as 1. Meant for ratio comparison against the
/// discrete seminorm, not as a sharp bound.
double grr_bound(const SampledPath& path, double gamma, double p);

struct GrrRefinement {
    std::vector<std::size_t> strides;  // coarse -> fine
    std::vector<double> values;
    bool diverging = false;  // monotone growth beyond 30% over the sweep
};

/// grr_bound evaluated on dyadic coarsenings of the grid (coarse to fine).
GrrRefinement grr_refinement(const SampledPath& path, double gamma, double p, int levels);

/// { |x(t_i)| / t_i : t_i >= 1 }, for paths with t0 = 0 and horizon > 1.
std::vector<double> growth_ratio(const SampledPath& path);

/// Sample a scalar function on a uniform grid.
SampledPath sample_scalar_path(const std::function<double(double)>& f, double t0, double horizon,
                               std::size_t steps, double beta_prime);

/// Sample a vector-valued function on a uniform grid.
SampledPath sample_vector_path(const std::function<Eigen::VectorXd(double)>& f, Eigen::Index m,
                               double t0, double horizon, std::size_t steps, double beta_prime);

/// Sample a matrix-valued integrand on a uniform grid.
MatrixPath sample_matrix_path(const std::function<Eigen::MatrixXd(double)>& f, double t0,
                              double horizon, std::size_t steps, double beta);

/// View a scalar path as a 1x1 integrand with declared exponent `beta`.
MatrixPath as_integrand(const SampledPath& path, double beta);

/// Piecewise-linear interpolation of the path sampled at stride `stride`,
/// re-evaluated on the original grid.
SampledPath piecewise_linear_coarsening(const SampledPath& path, std::size_t stride);

}  // namespace hoelderflow
