#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hoelderflow/path.hpp"

namespace hoelderflow {

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
using MatrixField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
// Partial derivatives of G: entry k is dG/dx_k, a d x m matrix.
using MatrixDerivativeField = std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)>;

/// Drift F and diffusion G with derivative oracles, on the closed ball of
/// radius rho. Construction validates the oracles against central finite
/// differences and records which structural assumptions hold:
/// F(0)=0, G(0)=0 (zero_at_origin) and DG(0)=0 (flat_diffusion_at_origin).
struct FieldPair {
    Eigen::Index dim_d = 0;
    Eigen::Index dim_m = 0;
    VectorField f;
    JacobianField df;
    MatrixField g;
    MatrixDerivativeField dg;
    MatrixDerivativeField d2g_diag;  // optional: d/dx_k of dG/dx_k, for validation only
    double rho = 1.0;

    bool zero_at_origin = false;
    bool flat_diffusion_at_origin = false;

    static FieldPair make(Eigen::Index d, Eigen::Index m, VectorField f, JacobianField df,
                          MatrixField g, MatrixDerivativeField dg, double rho,
                          MatrixDerivativeField d2g_diag = nullptr);

    // Throws ValidationError unless F(0)=0, G(0)=0 and DG(0)=0.
    void require_localizable() const;

    // |DG(x)|: sigma_max of the flattened (d*m) x d derivative. Upper bound
    // of the induced operator norm, exact for m = 1.
    double dg_norm(const Eigen::VectorXd& x) const;
};

/// The linearization split F(x) = A x + Fhat(x) with A = DF(0).
struct Linearization {
    Eigen::MatrixXd a;
    VectorField f_hat;
    JacobianField df_hat;

    double df_hat_norm(const Eigen::VectorXd& x) const;
};

Linearization split_linearization(const FieldPair& pair);

/// C^2 cut-off: chi(u) = phi(|u|) u with a quintic-smoothstep radial
/// profile, identity on the half ball, zero outside the unit ball. The
/// derivative bounds are scanned once and frozen with 1% headroom.
class CutoffKit {
public:
    CutoffKit();

    double l_dchi() const { return l_dchi_; }
    double l_d2chi() const { return l_d2chi_; }

    double profile(double r) const;        // phi
    double profile_deriv(double r) const;  // phi'
    double profile_deriv2(double r) const; // phi''

    // chi_R(u) = R chi(u/R); exact identity for |u| <= R/2, exact zero
    // for |u| >= R.
    Eigen::VectorXd apply(const Eigen::VectorXd& u, double r_hat) const;

private:
    double l_dchi_ = 0.0;
    double l_d2chi_ = 0.0;
};

const CutoffKit& shared_cutoff_kit();

/// Cut-off composition of the split fields: Fhat_R = Fhat o chi_R and
/// G_R = G o chi_R, defined on all of R^d.
struct LocalizedPair {
    double r_hat = 0.0;
    VectorField f_hat;
    MatrixField g;
};

LocalizedPair localized_fields(const Linearization& lin, const FieldPair& pair,
                               const CutoffKit& kit, double r_hat);

struct Lemma6Report {
    double max_violation = 0.0;  // over all sampled inequalities; <= 0 means all hold
    std::size_t samples = 0;
};

/// Checks |Fhat_R(u)| <= R L |u|, |G_R(u)| <= R L |u| and the Lipschitz
/// bound |G_R(u)-G_R(z)| <= R L |u-z| on random samples.
Lemma6Report lemma6_check(const LocalizedPair& localized, double r_target, const CutoffKit& kit,
                          const FieldPair& pair, std::size_t samples = 10000,
                          std::uint64_t seed = 0x5eed);

/// Monotone envelope of H(r) = sup_{|v| <= r} (|DG(v)| + |DFhat(v)|),
/// estimated over a deterministic low-discrepancy sample of the ball plus
/// radial shells and stored as a piecewise-linear monotone table. A
/// user-supplied closed form overrides sampling.
class HoelderBoundMap {
public:
    HoelderBoundMap(const Linearization& lin, const FieldPair& pair, std::size_t ball_points = 4096,
                    std::size_t shell_directions = 32, std::size_t radius_cells = 1024);
    HoelderBoundMap(std::function<double(double)> exact, double rho);

    double operator()(double r) const;  // throws std::domain_error for r outside [0, rho]
    double rho() const { return rho_; }

private:
    double rho_ = 0.0;
    std::function<double(double)> exact_;
    std::vector<double> table_;  // value at radius rho * i / (table size - 1)
};

/// Largest r in [0, rho] with h(r) <= x, by bisection (h non-decreasing,
/// h(0) = 0). Absolute tolerance 1e-10 * rho.
double inverse_j(const std::function<double(double)>& h, double x, double rho);

/// R(w) = eps_hat / (2 K (1 + |||w|||_{beta',0,1})).
double r_of_omega(double eps_hat, double k_const, const SampledPath& omega);

/// Rhat(w) = J(R(w)) ^ rho with J the generalized inverse of the bound map.
double rhat_of_omega(const HoelderBoundMap& bound, double eps_hat, double k_const,
                     const SampledPath& omega);

/// K = max{1, C_{alpha,beta,beta'}} M^2 L_{Dchi} (2 + 3|A| + |A|^2).
double k_constant(double m_const, double a_norm, double l_dchi, double c_ybb);

struct KappaDiagnostic {
    std::vector<double> r_values;
    std::vector<double> ratios;       // Rhat(R) / R
    std::vector<double> running_min;  // over the sweep so far (largest R first)
};

/// Ratio Rhat(R)/R over a sweep of target radii; evidences the positive
/// liminf of the radius ratio for C^1 bound maps.
KappaDiagnostic kappa_diagnostic(const HoelderBoundMap& bound, const std::vector<double>& r_sweep);

struct TemperednessEstimate {
    std::vector<double> tail;      // log+ (v_n) / n for n >= 1
    double last_quartile_max = 0.0;
};

/// Subexponential-growth diagnostic of a positive sequence.
TemperednessEstimate temperedness_diagnostic(const std::vector<double>& values);

// ---- built-in field catalog ------------------------------------------------

/// Named fields reachable from CLI configs:
///   linear     F = A x,            G = Gamma x
///   quadratic  F = A x + cf x.^2,  G_{ij} = cg x_i x_j'
///   sine       F = -lambda x + mu sin(x), G = gamma x   (scalar)
struct CatalogSpec {
    std::string name;
    Eigen::MatrixXd a;      // linear / quadratic: d x d
    Eigen::MatrixXd gamma;  // linear: d x m
    double cf = 1.0;        // quadratic drift coefficient
    double cg = 1.0;        // quadratic diffusion coefficient
    Eigen::Index dim_m = 1;
    double lambda = 1.0;    // sine
    double mu = 0.5;        // sine
    double noise = 0.5;     // sine: gamma
    double rho = 1.0;
};

FieldPair make_catalog_field(const CatalogSpec& spec);

}  // namespace hoelderflow
