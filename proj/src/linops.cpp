#include "hoelderflow/linops.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace hoelderflow {

namespace {

void require_square(const Eigen::MatrixXd& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw std::domain_error(std::string(what) + ": matrix must be square and non-empty");
    if (!a.allFinite()) throw std::domain_error(std::string(what) + ": non-finite entries");
}

}  // namespace

double spectral_abscissa(const Eigen::MatrixXd& a) {
    require_square(a, "spectral abscissa");
    if (a.rows() > kMaxEigenDim)
        throw std::domain_error("spectral abscissa: dimension capped at 50");
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) throw std::domain_error("spectral norm: empty matrix");
    if (!a.allFinite()) throw std::domain_error("spectral norm: non-finite entries");
    const Eigen::MatrixXd ata = a.transpose() * a;
    const Eigen::Index n = ata.rows();
    if (ata.cwiseAbs().maxCoeff() == 0.0) return 0.0;

    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    // Mildly uneven start so a symmetric top eigenspace cannot hide from it.
    for (Eigen::Index i = 0; i < n; ++i) v(i) += 1e-3 * static_cast<double>(i + 1);
    v.normalize();

    double value = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = ata * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        w /= norm;
        if (std::abs(norm - value) <= 1e-10 * std::max(norm, 1.0) && it > 2) {
            value = norm;
            break;
        }
        value = norm;
        v = w;
    }
    return std::sqrt(value);
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a, double t) {
    require_square(a, "matrix exp");
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd at = a * t;

    const double norm = at.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        at /= std::pow(2.0, squarings);
    }

    // Taylor core; |at| <= 1/2 so ~20 terms reach machine precision.
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 30; ++k) {
        term = term * at / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * result.cwiseAbs().maxCoeff()) break;
    }
    for (int k = 0; k < squarings; ++k) result = result * result;
    return result;
}

void matrix_exp_with_integral(const Eigen::MatrixXd& a, double t, Eigen::MatrixXd& exp_at,
                              Eigen::MatrixXd& int_exp) {
    require_square(a, "matrix exp");
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = a;
    aug.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd e = matrix_exp(aug, t);
    exp_at = e.topLeftCorner(n, n);
    int_exp = e.topRightCorner(n, n);
}

StableMatrix::StableMatrix(Eigen::MatrixXd matrix, double lambda)
    : a(std::move(matrix)), lambda_margin(lambda) {
    require_square(a, "stable matrix");
    if (lambda <= 0.0) throw StabilityError("stable matrix: lambda must be positive");
    const double abscissa = spectral_abscissa(a);
    // Strictness cannot be decided at float precision; equality within
    // 1e-12 is accepted so margins like (-I, 1) pass.
    if (abscissa > -lambda + 1e-12)
        throw StabilityError("stable matrix: spectral abscissa " + std::to_string(abscissa) +
                             " does not clear -lambda = " + std::to_string(-lambda));
}

SemigroupBound estimate_M(const StableMatrix& stable, int grid_points) {
    if (grid_points < 1) throw std::domain_error("estimate_M: grid_points must be positive");
    const double lambda = stable.lambda_margin;
    const double t_star = 10.0 / lambda;
    const int n_samples = 10 * grid_points;

    SemigroupBound bound;
    bound.lambda = lambda;
    bound.grid.reserve(static_cast<std::size_t>(n_samples) + 1);
    bound.grid.push_back(0.0);

    // Log-spaced samples of (0, t_star]; t = 0 contributes exactly 1.
    const double lo = std::log(t_star) - 12.0;
    const double hi = std::log(t_star);
    auto excess = [&](double t) { return spectral_norm(matrix_exp(stable.a, t)) * std::exp(lambda * t); };

    double best = 1.0, best_t = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t =
            std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1));
        bound.grid.push_back(t);
        const double value = excess(t);
        if (value > best) {
            best = value;
            best_t = t;
        }
    }

    // Polish the sampled argmax by golden-section so the estimate is not
    // limited by grid spacing.
    if (best_t > 0.0) {
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = best_t * std::exp(-(hi - lo) / n_samples);
        double b = std::min(best_t * std::exp((hi - lo) / n_samples), t_star);
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = excess(x1), f2 = excess(x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = excess(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = excess(x1);
            }
        }
        best = std::max(best, std::max(f1, f2));
    }
    bound.m_const = std::max(1.0, best);
    return bound;
}

double SemigroupCheckReport::min_slack() const {
    return std::min(slack_difference, std::min(slack_seminorm, slack_increment));
}

SemigroupCheckReport semigroup_increment_check(const StableMatrix& stable,
                                               const SemigroupBound& bound, double beta,
                                               int grid_size) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("semigroup check: beta outside (0,1)");
    if (grid_size < 2) throw std::domain_error("semigroup check: grid too small");

    const double m_const = bound.m_const;
    const double lambda = bound.lambda;
    const double a_norm = spectral_norm(stable.a);
    const auto n = static_cast<std::size_t>(grid_size);
    const double h = 1.0 / static_cast<double>(n);

    // e^{A t} at grid times t_i = i h, i = 0..n.
    std::vector<Eigen::MatrixXd> exps;
    exps.reserve(n + 1);
    const Eigen::MatrixXd step = matrix_exp(stable.a, h);
    exps.push_back(Eigen::MatrixXd::Identity(stable.a.rows(), stable.a.cols()));
    for (std::size_t i = 1; i <= n; ++i) exps.push_back(matrix_exp(stable.a, h * static_cast<double>(i)));

    std::vector<std::vector<double>> diff(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) diff[i][j] = spectral_norm(exps[j] - exps[i]);

    SemigroupCheckReport report;
    report.grid_size = grid_size;
    double s_diff = std::numeric_limits<double>::infinity();
    double s_semi = std::numeric_limits<double>::infinity();
    double s_incr = std::numeric_limits<double>::infinity();

    // The inequalities are stated for s < t; s = t is the trivial 0 <= 0.
    for (std::size_t is = 0; is <= n; ++is) {
        const double s = h * static_cast<double>(is);
        for (std::size_t it = is + 1; it <= n; ++it) {
            const double t = h * static_cast<double>(it);
            // (semi): |e^{At} - e^{As}| <= M |A| (t-s) e^{-lambda s}
            const double rhs = m_const * a_norm * (t - s) * std::exp(-lambda * s);
            s_diff = std::min(s_diff, rhs - diff[is][it]);
        }
    }

    // (sem): |||e^{A(t-.)}|||_{beta,0,t} <= M |A| t^{1-beta}
    for (std::size_t it = 1; it <= n; ++it) {
        const double t = h * static_cast<double>(it);
        double semi = 0.0;
        for (std::size_t j1 = 0; j1 < it; ++j1)
            for (std::size_t j2 = j1 + 1; j2 <= it; ++j2) {
                const double num = diff[it - j2][it - j1];
                const double den = std::pow(h * static_cast<double>(j2 - j1), beta);
                semi = std::max(semi, num / den);
            }
        s_semi = std::min(s_semi, m_const * a_norm * std::pow(t, 1.0 - beta) - semi);
    }

    // (sem1): |||e^{A(t-.)} - e^{A(s-.)}|||_{beta,0,s} <= M^2 |A|^2 (t-s) s^{1-beta},
    // using e^{A(t-r)} - e^{A(s-r)} = (e^{A(t-s)} - id) e^{A(s-r)}.
    for (std::size_t is = 1; is <= n; ++is) {
        const double s = h * static_cast<double>(is);
        for (std::size_t it = is + 1; it <= n; ++it) {
            const double t = h * static_cast<double>(it);
            const Eigen::MatrixXd prefix = exps[it - is] - exps[0];
            double semi = 0.0;
            for (std::size_t j1 = 0; j1 < is; ++j1)
                for (std::size_t j2 = j1 + 1; j2 <= is; ++j2) {
                    const double num = spectral_norm(prefix * (exps[is - j1] - exps[is - j2]));
                    const double den = std::pow(h * static_cast<double>(j2 - j1), beta);
                    semi = std::max(semi, num / den);
                }
            s_incr = std::min(s_incr,
                              m_const * m_const * a_norm * a_norm * (t - s) * std::pow(s, 1.0 - beta) - semi);
        }
    }

    report.slack_difference = s_diff;
    report.slack_seminorm = s_semi;
    report.slack_increment = s_incr;
    return report;
}

}  // namespace hoelderflow
