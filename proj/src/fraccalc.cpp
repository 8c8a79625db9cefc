#include "hoelderflow/fraccalc.hpp"

#include <algorithm>
#include <cmath>

#include "hoelderflow/errors.hpp"

namespace hoelderflow {

namespace {

struct GridWindow {
    std::size_t g_start = 0;
    std::size_t w_start = 0;
    std::size_t n = 0;  // steps between s and t
};

GridWindow aligned_window(const MatrixPath& g, const SampledPath& omega, double s, double t) {
    if (std::abs(g.dt - omega.dt) > 1e-9 * omega.dt)
        throw std::domain_error("young integral: integrand and integrator grids differ");
    if (!(s < t)) throw std::domain_error("young integral: requires s < t");
    GridWindow win;
    win.g_start = g.index_of(s);
    win.w_start = omega.index_of(s);
    win.n = omega.index_of(t) - win.w_start;
    if (g.index_of(t) - win.g_start != win.n)
        throw std::domain_error("young integral: inconsistent window");
    return win;
}

void require_young_regularity(const MatrixPath& g, const SampledPath& omega) {
    if (g.beta + omega.beta_prime <= 1.0)
        throw RegularityError("young integral: beta + beta' must exceed 1 (got " +
                              std::to_string(g.beta) + " + " + std::to_string(omega.beta_prime) + ")");
}

// Kahan-compensated accumulation of d-vectors.
struct CompensatedSum {
    Eigen::VectorXd sum;
    Eigen::VectorXd carry;

    explicit CompensatedSum(Eigen::Index d)
        : sum(Eigen::VectorXd::Zero(d)), carry(Eigen::VectorXd::Zero(d)) {}

    void add(const Eigen::VectorXd& x) {
        for (Eigen::Index i = 0; i < sum.size(); ++i) {
            const double y = x(i) - carry(i);
            const double t = sum(i) + y;
            carry(i) = (t - sum(i)) - y;
            sum(i) = t;
        }
    }
};

Eigen::VectorXd rs_sum_at_stride(const MatrixPath& g, const SampledPath& omega,
                                 const GridWindow& win, std::size_t stride) {
    const Eigen::Index d = g.values.front().rows();
    CompensatedSum acc(d);
    for (std::size_t i = 0; i < win.n; i += stride) {
        const Eigen::RowVectorXd dw =
            omega.values.row(static_cast<Eigen::Index>(win.w_start + i + stride)) -
            omega.values.row(static_cast<Eigen::Index>(win.w_start + i));
        acc.add(g.values[win.g_start + i] * dw.transpose());
    }
    return acc.sum;
}

// Piecewise-linear point evaluation, clamped to the sampled horizon.
Eigen::VectorXd eval_path(const SampledPath& p, double t) {
    const double raw = std::clamp((t - p.t0) / p.dt, 0.0, static_cast<double>(p.steps()));
    const auto lo = static_cast<std::size_t>(raw);
    const std::size_t hi = std::min(lo + 1, p.steps());
    const double w = raw - static_cast<double>(lo);
    return ((1.0 - w) * p.values.row(static_cast<Eigen::Index>(lo)) +
            w * p.values.row(static_cast<Eigen::Index>(hi)))
        .transpose();
}

Eigen::MatrixXd eval_integrand(const MatrixPath& g, double t) {
    const double raw = std::clamp((t - g.t0) / g.dt, 0.0, static_cast<double>(g.steps()));
    const auto lo = static_cast<std::size_t>(raw);
    const std::size_t hi = std::min(lo + 1, g.steps());
    const double w = raw - static_cast<double>(lo);
    return (1.0 - w) * g.values[lo] + w * g.values[hi];
}

MatrixPath shift_integrand(const MatrixPath& g, double tau) {
    const double raw = tau / g.dt;
    const auto k = static_cast<long long>(std::llround(raw));
    if (k < 0 || std::abs(raw - static_cast<double>(k)) > 1e-9)
        throw std::domain_error("integrand shift: tau is not a nonnegative grid multiple");
    const auto offset = static_cast<std::size_t>(k);
    if (offset > g.steps()) throw std::domain_error("integrand shift: tau beyond the horizon");
    MatrixPath out;
    out.t0 = g.t0;
    out.dt = g.dt;
    out.beta = g.beta;
    out.values.assign(g.values.begin() + static_cast<std::ptrdiff_t>(offset), g.values.end());
    return out;
}

// Graded midpoint nodes for int_0^1 f(w) dw with f ~ w^{c-1} near 0:
// w = v^{1/c} makes the transformed integrand bounded.
struct GradedNodes {
    std::vector<double> w;       // node positions in (0,1)
    std::vector<double> weight;  // dw contributions
};

GradedNodes graded_nodes(int n, double c) {
    const double grade = 1.0 / std::max(c, 0.05);
    GradedNodes out;
    out.w.resize(static_cast<std::size_t>(n));
    out.weight.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double v = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
        out.w[static_cast<std::size_t>(j)] = std::pow(v, grade);
        out.weight[static_cast<std::size_t>(j)] =
            grade * std::pow(v, grade - 1.0) / static_cast<double>(n);
    }
    return out;
}

}  // namespace

FracOrder::FracOrder(double a) : alpha(a) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("fractional order must lie in (0,1)");
}

FracOrder default_alpha(double beta, double beta_prime) {
    double a = 0.5 * (1.0 - beta_prime + beta);
    a = std::clamp(a, 1.0 - beta_prime + 1e-3, beta - 1e-3);
    return FracOrder(a);
}

YoungResult young_integral_rs(const MatrixPath& g, const SampledPath& omega, double s, double t) {
    g.validate();
    omega.validate();
    require_young_regularity(g, omega);
    const GridWindow win = aligned_window(g, omega, s, t);
    if (g.values.front().cols() != omega.dim())
        throw std::domain_error("young integral: integrand columns must match path dimension");

    YoungResult out;
    std::vector<std::size_t> strides;
    for (std::size_t st = 1; win.n % st == 0; st *= 2) strides.push_back(st);
    std::reverse(strides.begin(), strides.end());

    for (std::size_t st : strides) {
        out.strides.push_back(st);
        out.sequence.push_back(rs_sum_at_stride(g, omega, win, st));
        const std::size_t k = out.sequence.size();
        if (k >= 2) {
            const double delta = (out.sequence[k - 1] - out.sequence[k - 2]).norm();
            out.last_delta = delta;
            if (delta < 1e-8) out.converged = true;
        }
    }
    out.value = out.sequence.back();

    // Richardson estimate from the dyadic tail, with the order fitted from
    // the last three levels when available.
    out.extrapolated = out.value;
    const std::size_t k = out.sequence.size();
    if (k >= 2 && out.last_delta > 0.0) {
        double order = 1.0;
        if (k >= 3) {
            const double d_prev = (out.sequence[k - 2] - out.sequence[k - 3]).norm();
            if (d_prev > 0.0 && out.last_delta > 0.0) {
                order = std::log2(d_prev / out.last_delta);
                order = std::clamp(order, 0.25, 4.0);
            }
        }
        const double factor = 1.0 / (std::pow(2.0, order) - 1.0);
        out.extrapolated = out.value + factor * (out.value - out.sequence[k - 2]);
    }
    return out;
}

namespace {

Eigen::MatrixXd frac_plus_impl(const MatrixPath& g, double s, double a, double r,
                               const GradedNodes& nodes) {
    if (!(r > s)) throw std::domain_error("fractional derivative: requires r > s");
    const Eigen::MatrixXd g_r = eval_integrand(g, r);

    // alpha * int_s^r (g(r)-g(q)) / (r-q)^{1+alpha} dq, graded toward q = r.
    const double span = r - s;
    Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(g_r.rows(), g_r.cols());
    for (std::size_t j = 0; j < nodes.w.size(); ++j) {
        const double q = r - span * nodes.w[j];
        const double dist = span * nodes.w[j];
        inner += (g_r - eval_integrand(g, q)) * (span * nodes.weight[j] / std::pow(dist, 1.0 + a));
    }
    return (g_r / std::pow(r - s, a) + a * inner) / std::tgamma(1.0 - a);
}

Eigen::VectorXd frac_minus_impl(const SampledPath& omega, double t, double a, double r,
                                const GradedNodes& nodes) {
    if (!(r < t)) throw std::domain_error("fractional derivative: requires r < t");
    const Eigen::VectorXd w_r = eval_path(omega, r);
    const Eigen::VectorXd w_t = eval_path(omega, t);

    // (1-alpha) * int_r^t (w(r)-w(q)) / (q-r)^{2-alpha} dq, graded toward q = r.
    const double span = t - r;
    Eigen::VectorXd inner = Eigen::VectorXd::Zero(omega.dim());
    for (std::size_t j = 0; j < nodes.w.size(); ++j) {
        const double q = r + span * nodes.w[j];
        const double dist = span * nodes.w[j];
        inner += (w_r - eval_path(omega, q)) * (span * nodes.weight[j] / std::pow(dist, 2.0 - a));
    }
    return ((w_r - w_t) / std::pow(t - r, 1.0 - a) + (1.0 - a) * inner) / std::tgamma(a);
}

GradedNodes plus_nodes(const MatrixPath& g, double a) {
    return graded_nodes(kInnerNodes, g.beta - a > 0 ? g.beta - a : 0.05);
}

GradedNodes minus_nodes(const SampledPath& omega, double a) {
    const double c = omega.beta_prime + a - 1.0;
    return graded_nodes(kInnerNodes, c > 0 ? c : 0.05);
}

}  // namespace

Eigen::MatrixXd frac_derivative_plus(const MatrixPath& g, double s, FracOrder alpha, double r) {
    return frac_plus_impl(g, s, alpha.alpha, r, plus_nodes(g, alpha.alpha));
}

Eigen::VectorXd frac_derivative_minus(const SampledPath& omega, double t, FracOrder alpha,
                                      double r) {
    return frac_minus_impl(omega, t, alpha.alpha, r, minus_nodes(omega, alpha.alpha));
}

Eigen::VectorXd young_integral_fracrep(const MatrixPath& g, const SampledPath& omega, double s,
                                       double t, FracOrder alpha) {
    g.validate();
    omega.validate();
    require_young_regularity(g, omega);
    if (!(s < t)) throw std::domain_error("young integral: requires s < t");
    const double a = alpha.alpha;
    if (!(a < g.beta && a + omega.beta_prime > 1.0))
        throw RegularityError("young integral: alpha outside the admissible window (1-beta', beta)");

    const Eigen::Index d = g.values.front().rows();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    const double mid = 0.5 * (s + t);
    const GradedNodes inner_plus = plus_nodes(g, a);
    const GradedNodes inner_minus = minus_nodes(omega, a);

    // D^alpha_{s+} g blows up like (r-s)^{-alpha} at the left endpoint and
    // D^{1-alpha}_{t-} w like (t-r)^{beta'+alpha-1} at the right; grade each
    // half toward its endpoint.
    const GradedNodes left = graded_nodes(kOuterNodes / 2, 1.0 - a);
    for (std::size_t j = 0; j < left.w.size(); ++j) {
        const double r = s + (mid - s) * left.w[j];
        const double dr = (mid - s) * left.weight[j];
        acc += frac_plus_impl(g, s, a, r, inner_plus) * frac_minus_impl(omega, t, a, r, inner_minus) *
               dr;
    }
    const GradedNodes right = graded_nodes(kOuterNodes / 2, omega.beta_prime + a);
    for (std::size_t j = 0; j < right.w.size(); ++j) {
        const double r = t - (t - mid) * right.w[j];
        const double dr = (t - mid) * right.weight[j];
        acc += frac_plus_impl(g, s, a, r, inner_plus) * frac_minus_impl(omega, t, a, r, inner_minus) *
               dr;
    }

    // Sign pinned by the constant-integrand case: both one-sided derivatives
    // are computed without the formal complex prefactors, whose product
    // contributes a factor of -1.
    return -acc;
}

double young_bound_constant(double alpha, double beta, double beta_prime) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("bound constant: alpha outside (0,1)");
    if (!(alpha < beta && alpha + beta_prime > 1.0))
        throw RegularityError("bound constant: alpha outside the admissible window");
    return (1.0 / (std::tgamma(alpha) * std::tgamma(1.0 - alpha))) *
           (1.0 + alpha / (beta - alpha)) * (1.0 / (beta_prime + alpha - 1.0) + 1.0);
}

double young_bound(const MatrixPath& g, const SampledPath& omega, double s, double t,
                   FracOrder alpha) {
    require_young_regularity(g, omega);
    if (!(s < t)) throw std::domain_error("young bound: requires s < t");
    const double c = young_bound_constant(alpha.alpha, g.beta, omega.beta_prime);
    const HoelderStats w_stats = holder_stats(omega, omega.beta_prime, s, t);
    const HoelderStats g_stats = holder_stats(g, g.beta, s, t);
    return c * w_stats.seminorm *
           (g_stats.sup + std::pow(t - s, g.beta) * g_stats.seminorm) *
           std::pow(t - s, omega.beta_prime);
}

ShiftResidual verify_shift_property(const MatrixPath& g, const SampledPath& omega, double s,
                                    double t, double tau, FracOrder alpha, bool with_fracrep) {
    const MatrixPath g_shifted = shift_integrand(g, tau);
    const SampledPath w_shifted = wiener_shift(omega, tau);

    ShiftResidual out;
    const Eigen::VectorXd lhs = young_integral_rs(g, omega, s + tau, t + tau).value;
    const Eigen::VectorXd rhs = young_integral_rs(g_shifted, w_shifted, s, t).value;
    out.rs = (lhs - rhs).norm();

    if (with_fracrep) {
        const Eigen::VectorXd lhs_f = young_integral_fracrep(g, omega, s + tau, t + tau, alpha);
        const Eigen::VectorXd rhs_f = young_integral_fracrep(g_shifted, w_shifted, s, t, alpha);
        out.fracrep = (lhs_f - rhs_f).norm();
    }
    return out;
}

}  // namespace hoelderflow
