#include "hoelderflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hoelderflow/errors.hpp"
#include "hoelderflow/linops.hpp"

namespace hoelderflow {

namespace {

std::size_t horizon_steps(const SampledPath& omega, double horizon) {
    const double raw = horizon / omega.dt;
    const auto n = static_cast<long long>(std::llround(raw));
    if (n < 1 || std::abs(raw - static_cast<double>(n)) > 1e-9)
        throw std::domain_error("solver: horizon is not a grid multiple");
    if (static_cast<std::size_t>(n) > omega.steps())
        throw std::domain_error("solver: horizon exceeds the sampled driver");
    return static_cast<std::size_t>(n);
}

void attach_unit_norms(Trajectory& traj) {
    const double spu_raw = 1.0 / traj.dt;
    const auto spu = static_cast<long long>(std::llround(spu_raw));
    if (spu < 1 || std::abs(spu_raw - static_cast<double>(spu)) > 1e-6) return;
    const std::size_t per_unit = static_cast<std::size_t>(spu);
    const std::size_t units = traj.steps() / per_unit;
    if (units == 0) return;
    const SampledPath path = traj.as_path();
    for (std::size_t n = 0; n < units; ++n) {
        const double a = traj.t0 + static_cast<double>(n);
        const HoelderStats stats = holder_stats(path, traj.beta, a, a + 1.0);
        traj.per_unit_norms.push_back(stats.norm());
        traj.per_unit_sup.push_back(stats.sup);
    }
}

bool state_ok(const Eigen::VectorXd& u) { return u.allFinite() && u.norm() <= kBlowupNorm; }

}  // namespace

SampledPath Trajectory::as_path() const {
    SampledPath p;
    p.t0 = t0;
    p.dt = dt;
    p.values = values;
    p.beta_prime = beta;
    return p;
}

void YoungProblem::validate() const {
    omega.validate();
    if (!(beta > 0.5 && beta < omega.beta_prime))
        throw RegularityError("young problem: requires 1/2 < beta < beta'");
    if (u0.size() != pair.dim_d) throw std::domain_error("young problem: u0 has wrong dimension");
    if (!u0.allFinite()) throw std::domain_error("young problem: u0 must be finite");
    if (omega.dim() != pair.dim_m)
        throw std::domain_error("young problem: driver dimension does not match G");
}

Trajectory solve_euler(const YoungProblem& problem) {
    problem.validate();
    const SampledPath& w = problem.omega;
    const std::size_t n = horizon_steps(w, problem.horizon);

    Trajectory traj;
    traj.t0 = w.t0;
    traj.dt = w.dt;
    traj.scheme = Scheme::euler;
    traj.beta = problem.beta;
    traj.values.resize(static_cast<Eigen::Index>(n + 1), problem.pair.dim_d);

    Eigen::VectorXd u = problem.u0;
    traj.values.row(0) = u.transpose();
    std::size_t recorded = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!state_ok(u)) {
            traj.blew_up = true;
            traj.blowup_index = i == 0 ? 0 : i - 1;
            break;
        }
        const Eigen::VectorXd dw = (w.values.row(static_cast<Eigen::Index>(i + 1)) -
                                    w.values.row(static_cast<Eigen::Index>(i)))
                                       .transpose();
        u = u + problem.pair.f(u) * traj.dt + problem.pair.g(u) * dw;
        if (!state_ok(u)) {
            traj.blew_up = true;
            traj.blowup_index = i;
            break;
        }
        traj.values.row(static_cast<Eigen::Index>(i + 1)) = u.transpose();
        recorded = i + 1;
    }
    if (traj.blew_up) traj.values.conservativeResize(static_cast<Eigen::Index>(recorded + 1), Eigen::NoChange);
    attach_unit_norms(traj);
    return traj;
}

Trajectory solve_mild_fields(const Eigen::MatrixXd& a, const VectorField& f_hat,
                             const MatrixField& g, const SampledPath& omega,
                             const Eigen::VectorXd& u0, double horizon, double beta) {
    const std::size_t n = horizon_steps(omega, horizon);
    const double dt = omega.dt;

    Eigen::MatrixXd exp_a, int_exp;
    matrix_exp_with_integral(a, dt, exp_a, int_exp);

    Trajectory traj;
    traj.t0 = omega.t0;
    traj.dt = dt;
    traj.scheme = Scheme::mild;
    traj.beta = beta;
    traj.values.resize(static_cast<Eigen::Index>(n + 1), u0.size());

    Eigen::VectorXd u = u0;
    traj.values.row(0) = u.transpose();
    std::size_t recorded = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd dw = (omega.values.row(static_cast<Eigen::Index>(i + 1)) -
                                    omega.values.row(static_cast<Eigen::Index>(i)))
                                       .transpose();
        u = exp_a * u + int_exp * f_hat(u) + exp_a * (g(u) * dw);
        if (!state_ok(u)) {
            traj.blew_up = true;
            traj.blowup_index = i;
            break;
        }
        traj.values.row(static_cast<Eigen::Index>(i + 1)) = u.transpose();
        recorded = i + 1;
    }
    if (traj.blew_up) traj.values.conservativeResize(static_cast<Eigen::Index>(recorded + 1), Eigen::NoChange);
    attach_unit_norms(traj);
    return traj;
}

Trajectory solve_mild(const Linearization& lin, const YoungProblem& problem) {
    problem.validate();
    return solve_mild_fields(lin.a, lin.f_hat, problem.pair.g, problem.omega, problem.u0,
                             problem.horizon, problem.beta);
}

WongZakaiReport wong_zakai_check(const YoungProblem& problem, int levels) {
    if (levels < 2) throw std::domain_error("wong-zakai: at least two levels required");
    const std::size_t n = horizon_steps(problem.omega, problem.horizon);

    std::vector<std::size_t> strides;
    for (std::size_t s = 1; n % s == 0 && static_cast<int>(strides.size()) < levels; s *= 2)
        strides.push_back(s);
    std::reverse(strides.begin(), strides.end());

    const Trajectory finest = solve_euler(problem);

    WongZakaiReport report;
    for (std::size_t s : strides) {
        YoungProblem coarse = problem;
        coarse.omega = piecewise_linear_coarsening(problem.omega, s);
        const Trajectory t = solve_euler(coarse);
        const Eigen::Index rows = std::min(t.values.rows(), finest.values.rows());
        const double dist =
            (t.values.topRows(rows) - finest.values.topRows(rows)).rowwise().norm().maxCoeff();
        report.strides.push_back(s);
        report.sup_distance.push_back(dist);
    }

    const std::size_t k = report.sup_distance.size();
    if (k >= 2) {
        report.tail_nonincreasing = true;
        for (std::size_t i = k / 2; i + 1 < k; ++i)
            report.tail_nonincreasing =
                report.tail_nonincreasing && report.sup_distance[i + 1] <= report.sup_distance[i] + 1e-15;
    }
    return report;
}

void DossProblem::validate() const {
    omega.validate();
    if (omega.dim() != 1) throw std::domain_error("doss: driver must be scalar");
    if (!(lambda > 0.0)) throw std::domain_error("doss: lambda must be positive");
    if (!(mu >= 0.0 && mu < lambda)) throw std::domain_error("doss: requires 0 <= mu < lambda");
    if (!std::isfinite(u0)) throw std::domain_error("doss: u0 must be finite");
    if (f_hat) {
        // |Fhat(x)| <= mu |x| on a dense sample around the working scale.
        const double span = std::max(100.0, 10.0 * std::abs(u0));
        for (int i = -2000; i <= 2000; ++i) {
            const double x = span * static_cast<double>(i) / 2000.0;
            if (std::abs(f_hat(x)) > mu * std::abs(x) + 1e-12)
                throw ValidationError("doss: |Fhat(x)| <= mu |x| fails at x = " + std::to_string(x));
        }
    }
}

Trajectory doss_solve(const DossProblem& problem) {
    problem.validate();
    const SampledPath& w = problem.omega;
    const std::size_t n = w.steps();
    const double dt = w.dt;
    const double lambda = problem.lambda;
    const double gamma = problem.gamma;

    auto w_at = [&](double frac_index) {
        const auto lo = static_cast<std::size_t>(frac_index);
        const std::size_t hi = std::min(lo + 1, n);
        const double c = frac_index - static_cast<double>(lo);
        return (1.0 - c) * w.values(static_cast<Eigen::Index>(lo), 0) +
               c * w.values(static_cast<Eigen::Index>(hi), 0);
    };

    // dD = e^{-a(t)} Fhat(e^{a(t)} D) dt with a(t) = gamma w(t) - lambda t;
    // evaluated through logs so e^{lambda t} never overflows a product.
    auto rhs = [&](double t, double w_t, double d_val) -> double {
        if (!problem.f_hat || d_val == 0.0) return 0.0;
        const double a = gamma * w_t - lambda * t;
        const double x = std::exp(a) * d_val;
        const double fx = problem.f_hat(x);
        if (fx == 0.0) return 0.0;
        const double mag = std::log(std::abs(fx)) - a;
        return (fx > 0.0 ? 1.0 : -1.0) * std::exp(mag);
    };

    Trajectory traj;
    traj.t0 = w.t0;
    traj.dt = dt;
    traj.scheme = Scheme::mild;
    traj.beta = w.beta_prime;
    traj.values.resize(static_cast<Eigen::Index>(n + 1), 1);

    double d_val = problem.u0;
    auto reconstruct = [&](std::size_t i, double d) {
        if (d == 0.0) return 0.0;
        const double expo = -lambda * w.time(i) + gamma * w.values(static_cast<Eigen::Index>(i), 0) +
                            std::log(std::abs(d));
        return (d > 0.0 ? 1.0 : -1.0) * std::exp(expo);
    };

    traj.values(0, 0) = reconstruct(0, d_val);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = w.time(i);
        const double w0 = w.values(static_cast<Eigen::Index>(i), 0);
        const double wh = w_at(static_cast<double>(i) + 0.5);
        const double w1 = w.values(static_cast<Eigen::Index>(i + 1), 0);

        const double k1 = rhs(t, w0, d_val);
        const double k2 = rhs(t + 0.5 * dt, wh, d_val + 0.5 * dt * k1);
        const double k3 = rhs(t + 0.5 * dt, wh, d_val + 0.5 * dt * k2);
        const double k4 = rhs(t + dt, w1, d_val + dt * k3);
        d_val += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(d_val)) {
            traj.blew_up = true;
            traj.blowup_index = i;
            traj.values.conservativeResize(static_cast<Eigen::Index>(i + 1), Eigen::NoChange);
            attach_unit_norms(traj);
            return traj;
        }
        traj.values(static_cast<Eigen::Index>(i + 1), 0) = reconstruct(i + 1, d_val);
    }
    attach_unit_norms(traj);
    return traj;
}

DossSlackReport doss_bound_check(const Trajectory& traj, const DossProblem& problem,
                                 double tol_factor) {
    DossSlackReport report;
    report.tol = tol_factor * std::abs(problem.u0);
    report.min_slack = std::numeric_limits<double>::infinity();
    const double rate = problem.mu - problem.lambda;
    for (std::size_t i = 0; i <= traj.steps(); ++i) {
        const double t = traj.time(i);
        const double w_abs = std::abs(problem.omega.values(static_cast<Eigen::Index>(i), 0));
        const double bound =
            std::exp(problem.gamma * w_abs + rate * t) * std::abs(problem.u0);
        const double slack = bound - std::abs(traj.values(static_cast<Eigen::Index>(i), 0));
        report.slack.push_back(slack);
        report.min_slack = std::min(report.min_slack, slack);
    }
    report.ok = report.min_slack >= -report.tol;
    return report;
}

}  // namespace hoelderflow
