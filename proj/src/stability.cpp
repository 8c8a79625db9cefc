#include "hoelderflow/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hoelderflow/errors.hpp"
#include "hoelderflow/fraccalc.hpp"
#include "hoelderflow/linops.hpp"

namespace hoelderflow {

namespace {

bool eq15_holds(double lambda, double eps, double eps_hat, double slack = 1e-12) {
    return std::exp(-lambda) + eps_hat <= (1.0 + eps_hat) * std::exp(-(lambda - eps)) + slack;
}

}  // namespace

double eps_hat_max(double lambda, double eps) {
    if (!(eps > 0.0 && eps < lambda))
        throw std::domain_error("eps_hat_max: requires 0 < eps < lambda");
    const double a = lambda - eps;
    const double value = std::exp(-a) * (1.0 - std::exp(-eps)) / (1.0 - std::exp(-a));
    return std::min(value, 1.0 - 1e-12);
}

StabilityParams::StabilityParams(double lambda_, double eps_, double eps_hat_, double beta_,
                                 double beta_prime_, double alpha_, int n_intervals_,
                                 Eigen::VectorXd u0_)
    : lambda(lambda_),
      eps(eps_),
      eps_hat(eps_hat_),
      beta(beta_),
      beta_prime(beta_prime_),
      alpha(alpha_),
      n_intervals(n_intervals_),
      u0(std::move(u0_)) {
    if (!(lambda > 0.0)) throw ConfigError("stability params: lambda must be positive");
    if (!(eps > 0.0 && eps < lambda)) throw ConfigError("stability params: requires 0 < eps < lambda");
    if (!(eps_hat > 0.0 && eps_hat < 1.0))
        throw ConfigError("stability params: requires eps_hat in (0,1)");
    if (!eq15_holds(lambda, eps, eps_hat))
        throw ConfigError("stability params: e^-lambda + eps_hat <= (1+eps_hat) e^-(lambda-eps) fails");
    if (std::log1p(eps_hat) > lambda - eps + 1e-12)
        throw ConfigError("stability params: log(1+eps_hat) <= lambda - eps fails");
    if (!(beta > 0.5 && beta < beta_prime && beta_prime < 1.0))
        throw ConfigError("stability params: requires 1/2 < beta < beta' < 1");
    if (!(alpha > 1.0 - beta_prime && alpha < beta))
        throw ConfigError("stability params: alpha outside (1-beta', beta)");
    if (n_intervals < 1) throw ConfigError("stability params: need at least one interval");
    if (u0.size() < 1 || !u0.allFinite()) throw ConfigError("stability params: invalid u0");
}

double StabilityParams::theorem_rate() const { return (lambda - eps) - std::log1p(eps_hat); }

GronwallVerdict gronwall_check(const std::vector<double>& v, double zeta0, double k, double lambda,
                               double eps, double eps_hat) {
    if (!(zeta0 > 0.0 && k > 0.0)) throw std::domain_error("gronwall: k and zeta0 must be positive");
    if (!(eps > 0.0 && eps < lambda)) throw std::domain_error("gronwall: requires 0 < eps < lambda");
    if (!eq15_holds(lambda, eps, eps_hat))
        throw std::domain_error("gronwall: eps_hat violates the admissibility inequality");

    GronwallVerdict verdict;
    verdict.hypothesis_ok = true;
    verdict.conclusion_min_slack = std::numeric_limits<double>::infinity();

    double tail = 0.0;  // sum_{j<n} v_j e^{-lambda (n-j-1)}
    const double decay = std::exp(-lambda);
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (!(v[n] > 0.0)) throw std::domain_error("gronwall: sequence must be positive");
        const double rhs = k * zeta0 * std::exp(-lambda * static_cast<double>(n)) + eps_hat * tail;
        if (v[n] > rhs + 1e-12 * std::max(1.0, rhs)) {
            verdict.hypothesis_ok = false;
            verdict.hypothesis_violations.push_back(static_cast<int>(n));
        }
        tail = decay * tail + v[n];
    }

    if (verdict.hypothesis_ok) {
        verdict.conclusion_ok = true;
        for (std::size_t n = 0; n < v.size(); ++n) {
            const double nn = static_cast<double>(n);
            const double bound =
                std::pow(1.0 + eps_hat, nn) * std::exp(-nn * (lambda - eps)) * k * zeta0;
            const double slack = bound - v[n];
            verdict.conclusion_min_slack = std::min(verdict.conclusion_min_slack, slack);
            if (slack < -1e-12 * std::max(1.0, bound)) {
                verdict.conclusion_ok = false;
                verdict.conclusion_violations.push_back(static_cast<int>(n));
            }
        }
    }
    return verdict;
}

ComparisonVerdict comparison_check(const std::vector<double>& r, const std::vector<double>& v,
                                   double c_eps, double eps, double mu) {
    if (!(eps > 0.0 && eps < mu)) throw std::domain_error("comparison: requires 0 < eps < mu");
    if (r.size() != v.size()) throw std::domain_error("comparison: sequences must share length");
    if (v.empty()) throw std::domain_error("comparison: empty sequences");

    ComparisonVerdict verdict;
    verdict.threshold = c_eps;  // worst case sits at i = 0 because mu > eps
    verdict.inputs_ok = true;
    const double v0 = v.front();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double ii = static_cast<double>(i);
        if (r[i] < c_eps * std::exp(-eps * ii) * (1.0 - 1e-12)) verdict.inputs_ok = false;
        if (v[i] > v0 * std::exp(-mu * ii) * (1.0 + 1e-12)) verdict.inputs_ok = false;
    }
    verdict.holds = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > r[i]) {
            verdict.holds = false;
            verdict.violations.push_back(static_cast<int>(i));
        }
    }
    return verdict;
}

StabilityReport iterate_unit_intervals(const Linearization& lin, const FieldPair& pair,
                                       const CutoffKit& kit, const StabilityParams& params,
                                       const SampledPath& omega, const HoelderBoundMap& bound,
                                       const StabilityOptions& options) {
    pair.require_localizable();
    omega.validate();
    const int n_intervals = params.n_intervals;
    if (omega.horizon() < static_cast<double>(n_intervals) + 1.0 - 1e-9)
        throw std::domain_error("stability: driver horizon must reach N + 1");
    const double spu_raw = 1.0 / omega.dt;
    const auto spu = static_cast<long long>(std::llround(spu_raw));
    if (spu < 1 || std::abs(spu_raw - static_cast<double>(spu)) > 1e-9)
        throw std::domain_error("stability: grid must subdivide unit intervals");

    StabilityReport report;
    const StableMatrix stable(lin.a, params.lambda);
    const SemigroupBound semigroup = estimate_M(stable, options.m_grid_points);
    const double a_norm = spectral_norm(lin.a);
    const double c_ybb = young_bound_constant(params.alpha, params.beta, params.beta_prime);
    report.m_used = semigroup.m_const;
    report.k_used = 2.0 * semigroup.m_const * (1.0 + a_norm);
    report.big_k = k_constant(semigroup.m_const, a_norm, kit.l_dchi(), c_ybb);
    report.theorem_rate = params.theorem_rate();

    const auto per_unit = static_cast<std::size_t>(spu);
    report.chained.resize(static_cast<Eigen::Index>(per_unit) * n_intervals + 1, pair.dim_d);

    Eigen::VectorXd u = params.u0;
    report.chained.row(0) = u.transpose();

    for (int n = 0; n < n_intervals; ++n) {
        SampledPath shifted = wiener_shift(omega, static_cast<double>(n));
        shifted.beta_prime = params.beta_prime;

        const double r_n = r_of_omega(params.eps_hat, report.big_k, shifted);
        const double rhat = rhat_of_omega(bound, params.eps_hat, report.big_k, shifted);
        report.r_seq.push_back(r_n);
        report.rhat_seq.push_back(rhat);

        const LocalizedPair loc = localized_fields(lin, pair, kit, rhat);
        const Trajectory traj =
            solve_mild_fields(lin.a, loc.f_hat, loc.g, shifted, u, 1.0, params.beta);
        report.intervals_run = n + 1;

        if (traj.blew_up) {
            report.blew_up = true;
            report.escaped = true;
            report.escape_index = n;
            report.cutoff_active.push_back(true);
            break;
        }

        const double norm = traj.per_unit_norms.empty()
                                ? holder_stats(traj.as_path(), params.beta, traj.t0, traj.t0 + 1.0).norm()
                                : traj.per_unit_norms.front();
        report.norms.push_back(norm);
        // Active means the norm condition |u^n| <= Rhat/2 failed AND the
        // cut-off actually altered the fields seen by the solver; fields
        // that localization leaves untouched (e.g. G = 0, linear F) never
        // flag, so the localized run is still the true equation.
        bool active = norm > 0.5 * rhat;
        if (active) {
            bool modified = false;
            for (Eigen::Index i = 0; i < traj.values.rows() && !modified; ++i) {
                const Eigen::VectorXd u_i = traj.values.row(i).transpose();
                const double u_norm = u_i.norm();
                if (u_norm <= 0.5 * rhat) continue;  // chi is the identity there
                if (u_norm > pair.rho) {
                    modified = true;  // outside the field domain altogether
                } else {
                    modified = (lin.f_hat(u_i) - loc.f_hat(u_i)).norm() > 1e-12 ||
                               (pair.g(u_i) - loc.g(u_i)).norm() > 1e-12;
                }
            }
            active = modified;
        }
        report.cutoff_active.push_back(active);
        if (active && report.escape_index < 0) {
            report.escaped = true;
            report.escape_index = n;
        }

        for (std::size_t i = 0; i <= per_unit; ++i)
            report.chained.row(static_cast<Eigen::Index>(per_unit) * n + static_cast<Eigen::Index>(i)) =
                traj.values.row(static_cast<Eigen::Index>(i));
        u = traj.values.row(traj.values.rows() - 1).transpose();

        if (report.escaped && options.stop_on_escape) break;
    }

    if (report.intervals_run < n_intervals)
        report.chained.conservativeResize(
            static_cast<Eigen::Index>(per_unit) * report.intervals_run + 1, Eigen::NoChange);

    // Decay fit: least squares of -log |u^n| against n over the last 80%
    // of completed intervals, zeros skipped.
    const std::size_t count = report.norms.size();
    bool any_positive = false;
    for (double x : report.norms) any_positive = any_positive || x > 0.0;
    if (!any_positive) {
        report.fitted_rate = std::numeric_limits<double>::infinity();
        report.fitted_residual = 0.0;
    } else {
        std::vector<double> xs, ys;
        const std::size_t start = count / 5;
        for (std::size_t n = start; n < count; ++n) {
            if (report.norms[n] > 0.0) {
                xs.push_back(static_cast<double>(n));
                ys.push_back(-std::log(report.norms[n]));
            }
        }
        if (xs.size() < 2) {
            report.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        } else {
            const auto m = static_cast<double>(xs.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sx += xs[i];
                sy += ys[i];
                sxx += xs[i] * xs[i];
                sxy += xs[i] * ys[i];
            }
            const double denom = m * sxx - sx * sx;
            report.fitted_rate = (m * sxy - sx * sy) / denom;
            const double intercept = (sy - report.fitted_rate * sx) / m;
            double ss = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double e = ys[i] - (intercept + report.fitted_rate * xs[i]);
                ss += e * e;
            }
            report.fitted_residual = std::sqrt(ss / m);
        }
    }
    return report;
}

double admissible_neighborhood(const Linearization& lin, const FieldPair& pair,
                               const CutoffKit& kit, const StabilityParams& params,
                               const SampledPath& omega, const HoelderBoundMap& bound) {
    Eigen::VectorXd dir = params.u0;
    if (dir.norm() == 0.0)
        dir = Eigen::VectorXd::Unit(pair.dim_d, 0);
    else
        dir.normalize();

    StabilityOptions options;
    options.stop_on_escape = true;

    auto stays_local = [&](double magnitude) {
        StabilityParams p(params.lambda, params.eps, params.eps_hat, params.beta, params.beta_prime,
                          params.alpha, params.n_intervals, magnitude * dir);
        return !iterate_unit_intervals(lin, pair, kit, p, omega, bound, options).escaped;
    };

    double hi = pair.rho;
    if (stays_local(hi)) return hi;
    double lo = 1e-10;
    if (!stays_local(lo))
        throw ConfigError("admissible neighborhood: even |u0| = 1e-10 escapes; constants inconsistent");

    for (int step = 0; step < 12; ++step) {
        const double mid = std::sqrt(lo * hi);  // geometric split across the decades
        if (stays_local(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

UncutCheck uncut_consistency(const Linearization& lin, const FieldPair& pair,
                             const StabilityParams& params, const SampledPath& omega,
                             const StabilityReport& report) {
    UncutCheck check;
    check.consistent = !report.blew_up && report.intervals_run == params.n_intervals;
    for (bool flag : report.cutoff_active) check.consistent = check.consistent && !flag;
    if (!check.consistent) return check;

    const Trajectory full =
        solve_mild_fields(lin.a, lin.f_hat, pair.g, omega, params.u0,
                          static_cast<double>(params.n_intervals), params.beta);
    const Eigen::Index rows = std::min(full.values.rows(), report.chained.rows());
    check.crosscheck_sup_distance =
        (full.values.topRows(rows) - report.chained.topRows(rows)).rowwise().norm().maxCoeff();
    return check;
}

}  // namespace hoelderflow
