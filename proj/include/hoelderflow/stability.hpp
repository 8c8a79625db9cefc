#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "hoelderflow/fields.hpp"
#include "hoelderflow/path.hpp"
#include "hoelderflow/solver.hpp"

namespace hoelderflow {

/// Largest eps_hat satisfying e^{-lambda} + eps_hat <= (1+eps_hat) e^{-(lambda-eps)}
/// with equality, clamped below 1.
double eps_hat_max(double lambda, double eps);

/// Parameters of the unit-interval stability iteration. Construction
/// rejects (lambda, eps, eps_hat) violating
///   e^{-lambda} + eps_hat <= (1+eps_hat) e^{-(lambda-eps)}   and
///   log(1+eps_hat) <= lambda - eps,  eps_hat < 1.
struct StabilityParams {
    double lambda;
    double eps;
    double eps_hat;
    double beta;
    double beta_prime;
    double alpha;
    int n_intervals;
    Eigen::VectorXd u0;

    StabilityParams(double lambda, double eps, double eps_hat, double beta, double beta_prime,
                    double alpha, int n_intervals, Eigen::VectorXd u0);

    double theorem_rate() const;  // (lambda - eps) - log(1 + eps_hat)
};

struct GronwallVerdict {
    bool hypothesis_ok = false;
    bool conclusion_ok = false;
    std::vector<int> hypothesis_violations;
    std::vector<int> conclusion_violations;
    double conclusion_min_slack = 0.0;
};

/// Checks the hypothesis v_n <= k z0 e^{-lambda n} + eps_hat sum v_j e^{-lambda(n-j-1)}
/// for each n, and when it holds everywhere asserts the conclusion
/// v_n <= (1+eps_hat)^n e^{-n(lambda-eps)} k z0.
GronwallVerdict gronwall_check(const std::vector<double>& v, double zeta0, double k, double lambda,
                               double eps, double eps_hat);

struct ComparisonVerdict {
    bool inputs_ok = false;  // R_i >= C e^{-eps i} and v_i <= v0 e^{-mu i}
    bool holds = false;      // v_i <= R_i for all i
    std::vector<int> violations;
    double threshold = 0.0;  // sharp v0 threshold = C_eps (worst case at i = 0)
};

ComparisonVerdict comparison_check(const std::vector<double>& r, const std::vector<double>& v,
                                   double c_eps, double eps, double mu);

struct StabilityReport {
    std::vector<double> norms;     // |u^n|_{beta,0,1}
    std::vector<double> rhat_seq;  // Rhat(theta_n w)
    std::vector<double> r_seq;     // R(theta_n w)
    std::vector<bool> cutoff_active;
    double fitted_rate = 0.0;  // +inf when all norms vanish
    double fitted_residual = 0.0;
    double theorem_rate = 0.0;
    double m_used = 0.0;
    double k_used = 0.0;   // k = 2 M (1 + |A|)
    double big_k = 0.0;    // the constant K
    bool escaped = false;  // any cutoff activity or a blow-up
    int escape_index = -1;
    bool blew_up = false;
    Eigen::MatrixXd chained;  // the concatenated trajectory on [0, N]
    int intervals_run = 0;
};

struct StabilityOptions {
    bool stop_on_escape = false;   // stop iterating once a flag trips
    int m_grid_points = 100;
};

/// The unit-interval iteration: for each n solve the mild equation on [0,1]
/// driven by theta_n w with fields localized at Rhat(theta_n w), chain the
/// endpoint, record the Hoelder norm and the cutoff-activity flag
/// (|u^n|_{beta,0,1} > Rhat/2), and fit the decay rate.
StabilityReport iterate_unit_intervals(const Linearization& lin, const FieldPair& pair,
                                       const CutoffKit& kit, const StabilityParams& params,
                                       const SampledPath& omega,
                                       const HoelderBoundMap& bound,
                                       const StabilityOptions& options = {});

/// Largest |u0| (bisection, 12 steps, bracket [1e-10, rho]) whose iteration
/// never activates the cutoff. Direction taken from params.u0.
double admissible_neighborhood(const Linearization& lin, const FieldPair& pair,
                               const CutoffKit& kit, const StabilityParams& params,
                               const SampledPath& omega, const HoelderBoundMap& bound);

struct UncutCheck {
    bool consistent = false;              // all cutoff flags false
    double crosscheck_sup_distance = 0.0; // localized chain vs unlocalized solve
};

/// When no cutoff flag is active the chained localized solution must solve
/// the unlocalized mild equation on [0, N]; cross-checked by re-solving.
UncutCheck uncut_consistency(const Linearization& lin, const FieldPair& pair,
                             const StabilityParams& params, const SampledPath& omega,
                             const StabilityReport& report);

}  // namespace hoelderflow
