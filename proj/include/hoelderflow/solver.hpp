#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "hoelderflow/fields.hpp"
#include "hoelderflow/path.hpp"

namespace hoelderflow {

enum class Scheme { euler, mild };

// States with norm beyond this truncate the trajectory with a blow-up
// marker instead of raising; stability experiments probe escape on purpose.
inline constexpr double kBlowupNorm = 1e12;

struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    Eigen::MatrixXd values;  // (recorded steps + 1) x d
    Scheme scheme = Scheme::euler;
    double beta = 0.0;
    bool blew_up = false;
    std::size_t blowup_index = 0;  // last valid index when blew_up

    std::vector<double> per_unit_norms;  // |u|_{beta,n,n+1} per unit interval
    std::vector<double> per_unit_sup;

    std::size_t steps() const { return static_cast<std::size_t>(values.rows()) - 1; }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    SampledPath as_path() const;
};

struct YoungProblem {
    FieldPair pair;
    SampledPath omega;
    Eigen::VectorXd u0;
    double horizon = 1.0;  // uses the omega grid step; must lie inside the path
    double beta = 0.0;     // solution Hoelder exponent, 1/2 < beta < beta'

    void validate() const;
};

/// Explicit left-point scheme u_{i+1} = u_i + F(u_i) dt + G(u_i) dw_i.
Trajectory solve_euler(const YoungProblem& problem);

/// Exponential-Euler scheme for the mild form
///   u_{i+1} = e^{A dt} u_i + (int_0^dt e^{As} ds) Fhat(u_i) + e^{A dt} G(u_i) dw_i.
Trajectory solve_mild(const Linearization& lin, const YoungProblem& problem);

/// Mild scheme with explicit right-hand sides (used with localized fields).
Trajectory solve_mild_fields(const Eigen::MatrixXd& a, const VectorField& f_hat,
                             const MatrixField& g, const SampledPath& omega,
                             const Eigen::VectorXd& u0, double horizon, double beta);

struct WongZakaiReport {
    std::vector<std::size_t> strides;    // coarse -> fine interpolation strides
    std::vector<double> sup_distance;    // to the finest-level solution
    bool tail_nonincreasing = false;
};

/// Solves the problem with piecewise-linear interpolations of the driver at
/// dyadic strides and reports sup-distances to the finest-level solution.
WongZakaiReport wong_zakai_check(const YoungProblem& problem, int levels);

/// Scalar problem du = F(u) dt + gamma u dw with F = -lambda x + Fhat(x),
/// |Fhat(x)| <= mu |x|, 0 <= mu < lambda.
struct DossProblem {
    double lambda = 1.0;
    double gamma = 0.5;
    double mu = 0.0;
    std::function<double(double)> f_hat;  // may be null for Fhat == 0
    SampledPath omega;                    // scalar
    double u0 = 1.0;

    void validate() const;  // dense-sample check of |Fhat(x)| <= mu |x|
};

/// Doss-Sussmann solver: integrates the random ODE
///   dD = e^{-gamma w(t) + lambda t} Fhat(e^{gamma w(t) - lambda t} D) dt
/// with classical RK4 on the driver grid (w linear within steps) and
/// reconstructs u(t) = e^{-lambda t + gamma w(t)} D(t) in log-magnitude form.
Trajectory doss_solve(const DossProblem& problem);

struct DossSlackReport {
    std::vector<double> slack;  // e^{gamma |w|} e^{(mu-lambda) t} |u0| - |u(t)|
    double min_slack = 0.0;
    double tol = 0.0;
    bool ok = false;  // min_slack >= -tol
};

DossSlackReport doss_bound_check(const Trajectory& traj, const DossProblem& problem,
                                 double tol_factor = 1e-6);

}  // namespace hoelderflow
