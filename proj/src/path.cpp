#include "hoelderflow/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace hoelderflow {

namespace {

std::size_t grid_index(double t, double t0, double dt, std::size_t n, const char* what) {
    const double raw = (t - t0) / dt;
    const auto i = static_cast<long long>(std::llround(raw));
    if (i < 0 || static_cast<std::size_t>(i) > n || std::abs(raw - static_cast<double>(i)) > 1e-9) {
        throw std::domain_error(std::string(what) + ": time " + std::to_string(t) +
                                " is off the grid");
    }
    return static_cast<std::size_t>(i);
}

// Powers (k*dt)^beta for k = 1..max_lag, shared by every pair with that lag.
std::vector<double> lag_powers(double dt, double beta, std::size_t max_lag) {
    std::vector<double> pw(max_lag + 1, 0.0);
    for (std::size_t k = 1; k <= max_lag; ++k)
        pw[k] = std::pow(static_cast<double>(k) * dt, beta);
    return pw;
}

}  // namespace

std::size_t SampledPath::index_of(double t) const { return grid_index(t, t0, dt, steps(), "path"); }
std::size_t MatrixPath::index_of(double t) const { return grid_index(t, t0, dt, steps(), "integrand"); }

void SampledPath::validate() const {
    if (dt <= 0.0) throw std::domain_error("path: dt must be positive");
    if (values.rows() < 1 || values.cols() < 1) throw std::domain_error("path: empty values");
    if (!values.allFinite()) throw std::domain_error("path: non-finite coordinates");
}

void MatrixPath::validate() const {
    if (dt <= 0.0) throw std::domain_error("integrand: dt must be positive");
    if (values.empty()) throw std::domain_error("integrand: empty values");
    for (const auto& v : values)
        if (!v.allFinite()) throw std::domain_error("integrand: non-finite entries");
}

template <class Diff>
static HoelderStats stats_over_window(std::size_t ia, std::size_t ib, double dt, double beta,
                                      Diff&& diff_norm, const std::function<double(std::size_t)>& point_norm) {
    if (ib <= ia) throw std::domain_error("holder norm: empty window");
    const std::size_t n = ib - ia;

    HoelderStats out;
    for (std::size_t i = ia; i <= ib; ++i) out.sup = std::max(out.sup, point_norm(i));

    const bool capped = n > kSeminormLagCap;
    const std::size_t short_cap = capped ? kSeminormLagCap : n;
    auto pw = lag_powers(dt, beta, n);

    for (std::size_t lag = 1; lag <= short_cap; ++lag) {
        const double denom = pw[lag];
        for (std::size_t i = ia; i + lag <= ib; ++i) {
            const double d = diff_norm(i, i + lag);
            if (d > out.seminorm * denom) out.seminorm = d / denom;
            ++out.pairs_evaluated;
        }
    }
    if (capped) {
        // Long-range pairs at dyadic lags; short lags dominate for rough paths.
        for (std::size_t lag = short_cap * 2; lag <= n; lag *= 2) {
            const double denom = pw[lag];
            for (std::size_t i = ia; i + lag <= ib; ++i) {
                const double d = diff_norm(i, i + lag);
                if (d > out.seminorm * denom) out.seminorm = d / denom;
                ++out.pairs_evaluated;
            }
        }
        out.lag_capped = true;
    }
    return out;
}

HoelderStats holder_stats(const SampledPath& path, double beta, double a, double b) {
    if (beta <= 0.0 || beta >= 1.0) throw std::domain_error("holder norm: beta outside (0,1)");
    const std::size_t ia = path.index_of(a), ib = path.index_of(b);
    const auto& v = path.values;
    return stats_over_window(
        ia, ib, path.dt, beta,
        [&](std::size_t i, std::size_t j) {
            return (v.row(static_cast<Eigen::Index>(j)) - v.row(static_cast<Eigen::Index>(i))).norm();
        },
        [&](std::size_t i) { return v.row(static_cast<Eigen::Index>(i)).norm(); });
}

HoelderStats holder_stats(const MatrixPath& path, double beta, double a, double b) {
    if (beta <= 0.0 || beta >= 1.0) throw std::domain_error("holder norm: beta outside (0,1)");
    const std::size_t ia = path.index_of(a), ib = path.index_of(b);
    const auto& v = path.values;
    return stats_over_window(
        ia, ib, path.dt, beta,
        [&](std::size_t i, std::size_t j) { return (v[j] - v[i]).norm(); },
        [&](std::size_t i) { return v[i].norm(); });
}

double holder_seminorm(const SampledPath& path, double beta, double a, double b) {
    return holder_stats(path, beta, a, b).seminorm;
}

double sup_norm(const SampledPath& path, double a, double b) {
    const std::size_t ia = path.index_of(a), ib = path.index_of(b);
    if (ib < ia) throw std::domain_error("sup norm: empty window");
    double s = 0.0;
    for (std::size_t i = ia; i <= ib; ++i)
        s = std::max(s, path.values.row(static_cast<Eigen::Index>(i)).norm());
    return s;
}

double holder_norm(const SampledPath& path, double beta, double a, double b) {
    return holder_stats(path, beta, a, b).norm();
}

SampledPath wiener_shift(const SampledPath& path, double tau) {
    const double raw = tau / path.dt;
    const auto k = static_cast<long long>(std::llround(raw));
    if (k < 0 || std::abs(raw - static_cast<double>(k)) > 1e-9)
        throw std::domain_error("wiener shift: tau is not a nonnegative grid multiple");
    const auto offset = static_cast<std::size_t>(k);
    if (offset > path.steps()) throw std::domain_error("wiener shift: tau beyond the horizon");

    SampledPath out;
    out.t0 = path.t0;
    out.dt = path.dt;
    out.beta_prime = path.beta_prime;
    const auto rows = static_cast<Eigen::Index>(path.steps() - offset + 1);
    out.values = path.values.bottomRows(rows);
    out.values.rowwise() -= path.values.row(static_cast<Eigen::Index>(offset));
    return out;
}

double grr_bound(const SampledPath& path, double gamma, double p) {
    if (gamma <= 0.0 || gamma >= 1.0) throw std::domain_error("grr: gamma outside (0,1)");
    if (p < 1.0) throw std::domain_error("grr: p < 1");
    path.validate();
    const std::size_t n = path.steps();
    if (n == 0) return 0.0;
    const double expo = 2.0 * gamma * p + 2.0;
    const auto& v = path.values;
    const bool p_integral = std::abs(p - std::round(p)) < 1e-12;
    const auto p_int = static_cast<int>(std::lround(p));

    // sum over i < j doubled; the diagonal carries no mass.
    double acc = 0.0;
    for (std::size_t lag = 1; lag <= n; ++lag) {
        const double dist = static_cast<double>(lag) * path.dt;
        const double denom = std::pow(dist, expo);
        double slice = 0.0;
        for (std::size_t i = 0; i + lag <= n; ++i) {
            const double sq =
                (v.row(static_cast<Eigen::Index>(i + lag)) - v.row(static_cast<Eigen::Index>(i)))
                    .squaredNorm();
            if (p_integral) {
                double term = sq;
                for (int k = 1; k < p_int; ++k) term *= sq;
                slice += term;
            } else {
                slice += std::pow(sq, p);
            }
        }
        acc += 2.0 * slice / denom;
    }
    acc *= path.dt * path.dt;
    return std::pow(acc, 1.0 / (2.0 * p));
}

GrrRefinement grr_refinement(const SampledPath& path, double gamma, double p, int levels) {
    GrrRefinement out;
    const std::size_t n = path.steps();
    std::vector<std::size_t> strides;
    for (std::size_t s = 1; s <= n && static_cast<int>(strides.size()) < levels; s *= 2)
        if (n % s == 0) strides.push_back(s);
    std::reverse(strides.begin(), strides.end());  // coarse first

    for (std::size_t s : strides) {
        SampledPath coarse;
        coarse.t0 = path.t0;
        coarse.dt = path.dt * static_cast<double>(s);
        coarse.beta_prime = path.beta_prime;
        const std::size_t m = n / s;
        coarse.values.resize(static_cast<Eigen::Index>(m + 1), path.values.cols());
        for (std::size_t i = 0; i <= m; ++i)
            coarse.values.row(static_cast<Eigen::Index>(i)) =
                path.values.row(static_cast<Eigen::Index>(i * s));
        out.strides.push_back(s);
        out.values.push_back(grr_bound(coarse, gamma, p));
    }

    if (out.values.size() >= 3) {
        bool monotone = true;
        for (std::size_t i = 1; i < out.values.size(); ++i)
            monotone = monotone && out.values[i] >= out.values[i - 1];
        const double growth = out.values.back() / std::max(out.values.front(), 1e-300);
        out.diverging = monotone && growth > 1.3;
    }
    return out;
}

std::vector<double> growth_ratio(const SampledPath& path) {
    if (std::abs(path.t0) > 1e-12) throw std::domain_error("growth ratio: requires t0 = 0");
    if (path.horizon() <= 1.0) throw std::domain_error("growth ratio: horizon must exceed 1");
    std::vector<double> out;
    for (std::size_t i = 0; i <= path.steps(); ++i) {
        const double t = path.time(i);
        if (t >= 1.0) out.push_back(path.values.row(static_cast<Eigen::Index>(i)).norm() / t);
    }
    return out;
}

SampledPath sample_scalar_path(const std::function<double(double)>& f, double t0, double horizon,
                               std::size_t steps, double beta_prime) {
    SampledPath p;
    p.t0 = t0;
    p.dt = horizon / static_cast<double>(steps);
    p.beta_prime = beta_prime;
    p.values.resize(static_cast<Eigen::Index>(steps + 1), 1);
    for (std::size_t i = 0; i <= steps; ++i) p.values(static_cast<Eigen::Index>(i), 0) = f(p.time(i));
    return p;
}

SampledPath sample_vector_path(const std::function<Eigen::VectorXd(double)>& f, Eigen::Index m,
                               double t0, double horizon, std::size_t steps, double beta_prime) {
    SampledPath p;
    p.t0 = t0;
    p.dt = horizon / static_cast<double>(steps);
    p.beta_prime = beta_prime;
    p.values.resize(static_cast<Eigen::Index>(steps + 1), m);
    for (std::size_t i = 0; i <= steps; ++i)
        p.values.row(static_cast<Eigen::Index>(i)) = f(p.time(i)).transpose();
    return p;
}

MatrixPath sample_matrix_path(const std::function<Eigen::MatrixXd(double)>& f, double t0,
                              double horizon, std::size_t steps, double beta) {
    MatrixPath g;
    g.t0 = t0;
    g.dt = horizon / static_cast<double>(steps);
    g.beta = beta;
    g.values.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) g.values.push_back(f(g.time(i)));
    return g;
}

MatrixPath as_integrand(const SampledPath& path, double beta) {
    MatrixPath g;
    g.t0 = path.t0;
    g.dt = path.dt;
    g.beta = beta;
    g.values.reserve(path.steps() + 1);
    for (std::size_t i = 0; i <= path.steps(); ++i)
        g.values.push_back(path.values.row(static_cast<Eigen::Index>(i)));
    return g;
}

SampledPath piecewise_linear_coarsening(const SampledPath& path, std::size_t stride) {
    if (stride == 0 || path.steps() % stride != 0)
        throw std::domain_error("coarsening: stride must divide the step count");
    SampledPath out = path;
    const std::size_t n = path.steps();
    for (std::size_t block = 0; block < n; block += stride) {
        const auto lo = static_cast<Eigen::Index>(block);
        const auto hi = static_cast<Eigen::Index>(block + stride);
        for (std::size_t j = 1; j < stride; ++j) {
            const double w = static_cast<double>(j) / static_cast<double>(stride);
            out.values.row(lo + static_cast<Eigen::Index>(j)) =
                (1.0 - w) * path.values.row(lo) + w * path.values.row(hi);
        }
    }
    return out;
}

}  // namespace hoelderflow
