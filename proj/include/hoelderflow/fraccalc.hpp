#pragma once

#include <Eigen/Core>
#include <vector>

#include "hoelderflow/path.hpp"

namespace hoelderflow {

/// Order of a one-sided fractional derivative. Call sites additionally
/// require 1 - beta' < alpha < beta.
struct FracOrder {
    double alpha;

    explicit FracOrder(double a);  // throws std::domain_error outside (0,1)
};

/// Midpoint of the admissible window (1 - beta', beta), clamped inward.
FracOrder default_alpha(double beta, double beta_prime);

/// Quadrature node counts: graded composite midpoint rule. Inner integrals
/// of the fractional derivatives use kInnerNodes, the outer r-integral of
/// the fractional representation uses kOuterNodes.
inline constexpr int kInnerNodes = 256;
inline constexpr int kOuterNodes = 512;

// Tolerance the graded quadrature is sized for on smooth integrands.
inline constexpr double kQuadratureTol = 1e-4;

struct YoungResult {
    Eigen::VectorXd value;                  // finest-grid left-endpoint sum
    Eigen::VectorXd extrapolated;           // Richardson estimate from the dyadic sequence
    std::vector<std::size_t> strides;       // coarse -> fine, last is 1
    std::vector<Eigen::VectorXd> sequence;  // sums at the dyadic coarsenings
    double last_delta = 0.0;                // |S_finest - S_previous|, 0 if single level
    bool converged = false;                 // refinement deltas dropped below 1e-8
};

/// Young integral int_s^t g dw as a left-endpoint Riemann-Stieltjes sum on
/// the finest shared grid, together with its dyadic refinement sequence.
YoungResult young_integral_rs(const MatrixPath& g, const SampledPath& omega, double s, double t);

/// D^alpha_{s+} g evaluated at r (the paper's formal complex prefactor is
/// omitted; the representation fixes the overall sign instead).
Eigen::MatrixXd frac_derivative_plus(const MatrixPath& g, double s, FracOrder alpha, double r);

/// D^{1-alpha}_{t-} w_{t-} evaluated at r, without the formal prefactor.
Eigen::VectorXd frac_derivative_minus(const SampledPath& omega, double t, FracOrder alpha,
                                      double r);

/// Young integral via the fractional-derivative representation
///   int_s^t D^alpha_{s+} g [r] . D^{1-alpha}_{t-} w_{t-} [r] dr,
/// sign fixed so a constant integrand reproduces C (w(t) - w(s)).
Eigen::VectorXd young_integral_fracrep(const MatrixPath& g, const SampledPath& omega, double s,
                                       double t, FracOrder alpha);

/// The explicit constant C_{alpha,beta,beta'} of the a-priori estimate.
double young_bound_constant(double alpha, double beta, double beta_prime);

/// A-priori bound C |||w|||_{beta',s,t} ( |g|_inf + (t-s)^beta |||g|||_beta )
/// (t-s)^{beta'}; dominates the norm of the integral.
double young_bound(const MatrixPath& g, const SampledPath& omega, double s, double t,
                   FracOrder alpha);

struct ShiftResidual {
    double rs = 0.0;       // Riemann-Stieltjes evaluation of both sides
    double fracrep = 0.0;  // fractional-representation evaluation
};

/// Residual | int_{s+tau}^{t+tau} g dw  -  int_s^t g(.+tau) d theta_tau w |.
ShiftResidual verify_shift_property(const MatrixPath& g, const SampledPath& omega, double s,
                                    double t, double tau, FracOrder alpha,
                                    bool with_fracrep = true);

}  // namespace hoelderflow
