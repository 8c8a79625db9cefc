#pragma once

#include <Eigen/Core>
#include <vector>

#include "hoelderflow/errors.hpp"

namespace hoelderflow {

// Eigenvalue routines are sized for desk-scale matrices.
inline constexpr Eigen::Index kMaxEigenDim = 50;

/// Largest real part over the eigenvalues of a square matrix.
double spectral_abscissa(const Eigen::MatrixXd& a);

/// Spectral norm (largest singular value), by power iteration on A^T A.
double spectral_norm(const Eigen::MatrixXd& a);

/// e^{At} by scaling-and-squaring with a truncated-series core.
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a, double t);

/// Simultaneously e^{At} and int_0^t e^{As} ds via the augmented matrix
/// exp([[A, I], [0, 0]] t).
void matrix_exp_with_integral(const Eigen::MatrixXd& a, double t, Eigen::MatrixXd& exp_at,
                              Eigen::MatrixXd& int_exp);

/// A matrix together with a verified spectral margin: Re sigma(A) < -lambda.
struct StableMatrix {
    Eigen::MatrixXd a;
    double lambda_margin = 0.0;

    StableMatrix(Eigen::MatrixXd matrix, double lambda);  // throws StabilityError
};

/// Constants of the semigroup decay bound |e^{At}| <= M e^{-lambda t},
/// together with the sampling grid the estimate was taken on.
struct SemigroupBound {
    double m_const = 1.0;
    double lambda = 0.0;
    std::vector<double> grid;
};

/// M = max(1, sup_t |e^{At}| e^{lambda t}) over log-spaced samples of
/// [0, 10/lambda], polished by local refinement around the sampled argmax.
SemigroupBound estimate_M(const StableMatrix& a, int grid_points = 100);

struct SemigroupCheckReport {
    // Worst-case slack (RHS - LHS) of each inequality; >= 0 means it holds.
    double slack_difference = 0.0;   // |e^{At}-e^{As}| <= M|A|(t-s)e^{-lambda s}
    double slack_seminorm = 0.0;     // |||e^{A(t-.)}|||_{beta,0,t} <= M|A| t^{1-beta}
    double slack_increment = 0.0;    // |||e^{A(t-.)}-e^{A(s-.)}|||_{beta,0,s} <= M^2|A|^2 (t-s) s^{1-beta}
    int grid_size = 0;

    double min_slack() const;
};

/// Verify the three semigroup increment inequalities on a dense (s,t) grid
/// in (0, 1].
SemigroupCheckReport semigroup_increment_check(const StableMatrix& a, const SemigroupBound& bound,
                                               double beta, int grid_size = 24);

}  // namespace hoelderflow
