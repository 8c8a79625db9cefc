#include "hoelderflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hoelderflow/linops.hpp"

namespace hoelderflow {

namespace {

double halton(std::size_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    std::size_t i = index;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

std::vector<unsigned> first_primes(std::size_t count) {
    std::vector<unsigned> primes;
    unsigned candidate = 2;
    while (primes.size() < count) {
        bool is_prime = true;
        for (unsigned p : primes) {
            if (p * p > candidate) break;
            if (candidate % p == 0) {
                is_prime = false;
                break;
            }
        }
        if (is_prime) primes.push_back(candidate);
        ++candidate;
    }
    return primes;
}

// Deterministic low-discrepancy points in the closed ball of radius `radius`:
// Halton cube point -> direction, an extra Halton dimension -> radius.
class BallSampler {
public:
    explicit BallSampler(Eigen::Index dim)
        : dim_(dim), primes_(first_primes(static_cast<std::size_t>(dim) + 1)) {}

    Eigen::VectorXd point(std::size_t index, double radius) const {
        Eigen::VectorXd dir(dim_);
        for (Eigen::Index k = 0; k < dim_; ++k)
            dir(k) = 2.0 * halton(index + 1, primes_[static_cast<std::size_t>(k)]) - 1.0;
        double norm = dir.norm();
        if (norm < 1e-12) {
            dir.setZero();
            dir(0) = 1.0;
            norm = 1.0;
        }
        const double u = halton(index + 1, primes_.back());
        const double r = radius * std::pow(u, 1.0 / static_cast<double>(dim_));
        return (r / norm) * dir;
    }

    Eigen::VectorXd direction(std::size_t index) const {
        Eigen::VectorXd dir(dim_);
        for (Eigen::Index k = 0; k < dim_; ++k)
            dir(k) = 2.0 * halton(index + 1, primes_[static_cast<std::size_t>(k)]) - 1.0;
        const double norm = dir.norm();
        if (norm < 1e-12) return Eigen::VectorXd::Unit(dim_, 0);
        return dir / norm;
    }

private:
    Eigen::Index dim_;
    std::vector<unsigned> primes_;
};

Eigen::MatrixXd fd_jacobian(const VectorField& f, const Eigen::VectorXd& x, double step) {
    const Eigen::Index d = x.size();
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd jac(f0.size(), d);
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += step;
        xm(k) -= step;
        jac.col(k) = (f(xp) - f(xm)) / (2.0 * step);
    }
    return jac;
}

}  // namespace

FieldPair FieldPair::make(Eigen::Index d, Eigen::Index m, VectorField f, JacobianField df,
                          MatrixField g, MatrixDerivativeField dg, double rho,
                          MatrixDerivativeField d2g_diag) {
    if (d < 1 || m < 1) throw std::domain_error("field pair: dimensions must be positive");
    if (rho <= 0.0) throw std::domain_error("field pair: rho must be positive");
    FieldPair pair;
    pair.dim_d = d;
    pair.dim_m = m;
    pair.f = std::move(f);
    pair.df = std::move(df);
    pair.g = std::move(g);
    pair.dg = std::move(dg);
    pair.d2g_diag = std::move(d2g_diag);
    pair.rho = rho;

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
    const Eigen::VectorXd f0 = pair.f(zero);
    const Eigen::MatrixXd g0 = pair.g(zero);
    if (f0.size() != d) throw ValidationError("field pair: F has wrong dimension");
    if (g0.rows() != d || g0.cols() != m) throw ValidationError("field pair: G has wrong shape");
    pair.zero_at_origin = f0.norm() <= 1e-12 && g0.norm() <= 1e-12;
    pair.flat_diffusion_at_origin = pair.dg_norm(zero) <= 1e-12;

    // Derivative oracles against central differences at low-discrepancy
    // points of the domain ball.
    BallSampler sampler(d);
    for (std::size_t i = 0; i < 100; ++i) {
        const Eigen::VectorXd x = sampler.point(i, rho);
        const double step = 1e-5 * std::max(1.0, x.norm());
        const Eigen::MatrixXd jac_fd = fd_jacobian(pair.f, x, step);
        const Eigen::MatrixXd jac = pair.df(x);
        if ((jac - jac_fd).norm() > 1e-5 * std::max(1.0, jac.norm()))
            throw ValidationError("field pair: DF oracle disagrees with finite differences");

        const auto parts = pair.dg(x);
        if (parts.size() != static_cast<std::size_t>(d))
            throw ValidationError("field pair: DG oracle has wrong arity");
        for (Eigen::Index k = 0; k < d; ++k) {
            Eigen::VectorXd xp = x, xm = x;
            xp(k) += step;
            xm(k) -= step;
            const Eigen::MatrixXd fd = (pair.g(xp) - pair.g(xm)) / (2.0 * step);
            if ((parts[static_cast<std::size_t>(k)] - fd).norm() > 1e-5 * std::max(1.0, fd.norm()))
                throw ValidationError("field pair: DG oracle disagrees with finite differences");
        }
        if (pair.d2g_diag) {
            const auto second = pair.d2g_diag(x);
            for (Eigen::Index k = 0; k < d; ++k) {
                Eigen::VectorXd xp = x, xm = x;
                xp(k) += step;
                xm(k) -= step;
                const Eigen::MatrixXd fd =
                    (pair.dg(xp)[static_cast<std::size_t>(k)] - pair.dg(xm)[static_cast<std::size_t>(k)]) /
                    (2.0 * step);
                if ((second[static_cast<std::size_t>(k)] - fd).norm() > 1e-4 * std::max(1.0, fd.norm()))
                    throw ValidationError("field pair: D2G oracle disagrees with finite differences");
            }
        }
    }
    return pair;
}

void FieldPair::require_localizable() const {
    if (!zero_at_origin)
        throw ValidationError("field pair: localization requires F(0) = 0 and G(0) = 0");
    if (!flat_diffusion_at_origin)
        throw ValidationError("field pair: localization requires DG(0) = 0");
}

double FieldPair::dg_norm(const Eigen::VectorXd& x) const {
    const auto parts = dg(x);
    Eigen::MatrixXd flat(dim_d * dim_m, dim_d);
    for (Eigen::Index k = 0; k < dim_d; ++k) {
        const Eigen::MatrixXd& p = parts[static_cast<std::size_t>(k)];
        flat.col(k) = Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
    }
    return spectral_norm(flat);
}

double Linearization::df_hat_norm(const Eigen::VectorXd& x) const {
    return spectral_norm(df_hat(x));
}

Linearization split_linearization(const FieldPair& pair) {
    Linearization lin;
    lin.a = pair.df(Eigen::VectorXd::Zero(pair.dim_d));
    const Eigen::MatrixXd a = lin.a;
    const VectorField f = pair.f;
    const JacobianField df = pair.df;
    lin.f_hat = [f, a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return f(x) - a * x; };
    lin.df_hat = [df, a](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return df(x) - a; };
    return lin;
}

// ---- cut-off ----------------------------------------------------------------

namespace {

double smoothstep(double x) { return ((6.0 * x - 15.0) * x + 10.0) * x * x * x; }
double smoothstep_d1(double x) { return ((30.0 * x - 60.0) * x + 30.0) * x * x; }
double smoothstep_d2(double x) { return ((120.0 * x - 180.0) * x + 60.0) * x; }

}  // namespace

double CutoffKit::profile(double r) const {
    if (r <= 0.5) return 1.0;
    if (r >= 1.0) return 0.0;
    return 1.0 - smoothstep(2.0 * r - 1.0);
}

double CutoffKit::profile_deriv(double r) const {
    if (r <= 0.5 || r >= 1.0) return 0.0;
    return -2.0 * smoothstep_d1(2.0 * r - 1.0);
}

double CutoffKit::profile_deriv2(double r) const {
    if (r <= 0.5 || r >= 1.0) return 0.0;
    return -4.0 * smoothstep_d2(2.0 * r - 1.0);
}

CutoffKit::CutoffKit() {
    // Dense 1-D scan of the radial profile. Dchi(u) has eigenvalues
    // phi(r) + r phi'(r) (radial) and phi(r) (tangential); the second
    // derivative is bounded by r |phi''| + 3 |phi'|.
    const int n = 200000;
    double d1 = 0.0, d2 = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double r = 1.05 * static_cast<double>(i) / static_cast<double>(n);
        const double p = profile(r), dp = profile_deriv(r), ddp = profile_deriv2(r);
        d1 = std::max(d1, std::max(std::abs(p + r * dp), std::abs(p)));
        d2 = std::max(d2, r * std::abs(ddp) + 3.0 * std::abs(dp));
    }
    l_dchi_ = 1.01 * d1;
    l_d2chi_ = 1.01 * d2;
}

const CutoffKit& shared_cutoff_kit() {
    static const CutoffKit kit;
    return kit;
}

Eigen::VectorXd CutoffKit::apply(const Eigen::VectorXd& u, double r_hat) const {
    if (r_hat <= 0.0) throw std::domain_error("cutoff: radius must be positive");
    const double norm = u.norm();
    if (norm <= 0.5 * r_hat) return u;                       // identity, exactly
    if (norm >= r_hat) return Eigen::VectorXd::Zero(u.size());  // zero, exactly
    return profile(norm / r_hat) * u;
}

LocalizedPair localized_fields(const Linearization& lin, const FieldPair& pair,
                               const CutoffKit& kit, double r_hat) {
    if (r_hat <= 0.0) throw std::domain_error("localized fields: radius must be positive");
    if (r_hat > pair.rho)
        throw std::domain_error("localized fields: radius exceeds the field domain");
    LocalizedPair out;
    out.r_hat = r_hat;
    const VectorField f_hat = lin.f_hat;
    const MatrixField g = pair.g;
    const CutoffKit* kitp = &kit;
    out.f_hat = [f_hat, kitp, r_hat](const Eigen::VectorXd& u) {
        return f_hat(kitp->apply(u, r_hat));
    };
    out.g = [g, kitp, r_hat](const Eigen::VectorXd& u) { return g(kitp->apply(u, r_hat)); };
    return out;
}

Lemma6Report lemma6_check(const LocalizedPair& localized, double r_target, const CutoffKit& kit,
                          const FieldPair& pair, std::size_t samples, std::uint64_t seed) {
    Lemma6Report report;
    report.samples = samples;
    const double bound_coef = r_target * kit.l_dchi();
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> radius(0.0, 3.0 * localized.r_hat);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto draw = [&]() {
        Eigen::VectorXd v(pair.dim_d);
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gauss(engine);
        const double n = v.norm();
        return n > 0 ? Eigen::VectorXd(radius(engine) / n * v) : Eigen::VectorXd::Zero(pair.dim_d);
    };

    for (std::size_t i = 0; i < samples; ++i) {
        const Eigen::VectorXd u = draw();
        const Eigen::VectorXd z = draw();
        const double f_lhs = localized.f_hat(u).norm();
        report.max_violation = std::max(report.max_violation, f_lhs - bound_coef * u.norm());
        const double g_lhs = spectral_norm(localized.g(u));
        report.max_violation = std::max(report.max_violation, g_lhs - bound_coef * u.norm());
        const double lip_lhs = spectral_norm(localized.g(u) - localized.g(z));
        report.max_violation = std::max(report.max_violation, lip_lhs - bound_coef * (u - z).norm());
    }
    return report;
}

// ---- bound map and radii -----------------------------------------------------

HoelderBoundMap::HoelderBoundMap(const Linearization& lin, const FieldPair& pair,
                                 std::size_t ball_points, std::size_t shell_directions,
                                 std::size_t radius_cells)
    : rho_(pair.rho) {
    auto h = [&](const Eigen::VectorXd& x) { return pair.dg_norm(x) + lin.df_hat_norm(x); };

    table_.assign(radius_cells + 1, 0.0);
    table_[0] = h(Eigen::VectorXd::Zero(pair.dim_d));

    BallSampler sampler(pair.dim_d);
    const double cell = rho_ / static_cast<double>(radius_cells);

    // Bucket the ball cloud by radius so the envelope stays monotone.
    std::vector<double> bucket_max(radius_cells + 1, 0.0);
    for (std::size_t i = 0; i < ball_points; ++i) {
        const Eigen::VectorXd x = sampler.point(i, rho_);
        const auto idx = std::min(radius_cells,
                                  static_cast<std::size_t>(std::ceil(x.norm() / cell - 1e-12)));
        bucket_max[idx] = std::max(bucket_max[idx], h(x));
    }
    // Shell samples at every cell radius.
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(shell_directions);
    for (std::size_t k = 0; k < shell_directions; ++k) dirs.push_back(sampler.direction(k));
    if (pair.dim_d == 1) {
        dirs.clear();
        dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
        dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
    }

    for (std::size_t i = 1; i <= radius_cells; ++i) {
        const double r = cell * static_cast<double>(i);
        double value = std::max(table_[i - 1], bucket_max[i]);
        for (const auto& dir : dirs) value = std::max(value, h(r * dir));
        table_[i] = value;
    }
}

HoelderBoundMap::HoelderBoundMap(std::function<double(double)> exact, double rho)
    : rho_(rho), exact_(std::move(exact)) {
    if (rho <= 0.0) throw std::domain_error("bound map: rho must be positive");
}

double HoelderBoundMap::operator()(double r) const {
    if (r < 0.0 || r > rho_ * (1.0 + 1e-12))
        throw std::domain_error("bound map: radius outside [0, rho]");
    if (exact_) return exact_(r);
    const double cells = static_cast<double>(table_.size() - 1);
    const double raw = std::clamp(r / rho_ * cells, 0.0, cells);
    const auto lo = static_cast<std::size_t>(raw);
    const std::size_t hi = std::min(lo + 1, table_.size() - 1);
    const double w = raw - static_cast<double>(lo);
    return (1.0 - w) * table_[lo] + w * table_[hi];
}

double inverse_j(const std::function<double(double)>& h, double x, double rho) {
    if (x < 0.0) throw std::domain_error("inverse_j: requires x >= 0");
    if (rho <= 0.0) throw std::domain_error("inverse_j: rho must be positive");
    if (h(rho) <= x) return rho;
    double lo = 0.0, hi = rho;
    const double tol = 1e-10 * rho;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) <= x)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double r_of_omega(double eps_hat, double k_const, const SampledPath& omega) {
    if (!(eps_hat > 0.0 && eps_hat < 1.0))
        throw ConfigError("R(w): eps_hat must lie in (0,1)");
    if (!(k_const > 0.0)) throw ConfigError("R(w): K must be positive");
    const double semi = holder_seminorm(omega, omega.beta_prime, omega.t0, omega.t0 + 1.0);
    return eps_hat / (2.0 * k_const * (1.0 + semi));
}

double rhat_of_omega(const HoelderBoundMap& bound, double eps_hat, double k_const,
                     const SampledPath& omega) {
    const double r = r_of_omega(eps_hat, k_const, omega);
    return inverse_j([&bound](double t) { return bound(t); }, r, bound.rho());
}

double k_constant(double m_const, double a_norm, double l_dchi, double c_ybb) {
    if (m_const < 1.0) throw std::domain_error("K: requires M >= 1");
    if (l_dchi <= 0.0 || c_ybb <= 0.0 || a_norm < 0.0)
        throw std::domain_error("K: constants must be positive");
    return std::max(1.0, c_ybb) * m_const * m_const * l_dchi *
           (2.0 + 3.0 * a_norm + a_norm * a_norm);
}

KappaDiagnostic kappa_diagnostic(const HoelderBoundMap& bound, const std::vector<double>& r_sweep) {
    KappaDiagnostic out;
    double running = std::numeric_limits<double>::infinity();
    for (double r : r_sweep) {
        if (r <= 0.0) throw std::domain_error("kappa diagnostic: sweep values must be positive");
        const double rhat = inverse_j([&bound](double t) { return bound(t); }, r, bound.rho());
        const double ratio = rhat / r;
        running = std::min(running, ratio);
        out.r_values.push_back(r);
        out.ratios.push_back(ratio);
        out.running_min.push_back(running);
    }
    return out;
}

TemperednessEstimate temperedness_diagnostic(const std::vector<double>& values) {
    TemperednessEstimate out;
    if (values.size() < 2) throw std::domain_error("temperedness: need at least two values");
    for (double v : values)
        if (!(v > 0.0)) throw std::domain_error("temperedness: values must be positive");
    const std::size_t n = values.size() - 1;
    out.tail.reserve(n);
    for (std::size_t k = 1; k <= n; ++k)
        out.tail.push_back(std::max(std::log(values[k]), 0.0) / static_cast<double>(k));
    const std::size_t start = (3 * n) / 4;
    for (std::size_t k = start; k < n; ++k)
        out.last_quartile_max = std::max(out.last_quartile_max, out.tail[k]);
    return out;
}

// ---- catalog -----------------------------------------------------------------

FieldPair make_catalog_field(const CatalogSpec& spec) {
    if (spec.name == "linear") {
        const Eigen::MatrixXd a = spec.a;
        const Eigen::MatrixXd gamma = spec.gamma;
        const Eigen::Index d = a.rows();
        if (gamma.rows() != d) throw ConfigError("linear field: Gamma rows must match A");
        return FieldPair::make(
            d, 1, [a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; },
            [a](const Eigen::VectorXd&) -> Eigen::MatrixXd { return a; },
            [gamma](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return gamma * x; },
            [gamma, d](const Eigen::VectorXd&) {
                std::vector<Eigen::MatrixXd> parts;
                parts.reserve(static_cast<std::size_t>(d));
                for (Eigen::Index k = 0; k < d; ++k) parts.push_back(gamma.col(k));
                return parts;
            },
            spec.rho);
    }
    if (spec.name == "quadratic") {
        const Eigen::MatrixXd a = spec.a;
        const Eigen::Index d = a.rows();
        const Eigen::Index m = spec.dim_m;
        const double cf = spec.cf, cg = spec.cg;
        auto col_pair = [d](Eigen::Index j) { return j % d; };
        return FieldPair::make(
            d, m,
            [a, cf](const Eigen::VectorXd& x) -> Eigen::VectorXd {
                return a * x + cf * x.array().square().matrix();
            },
            [a, cf](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
                return a + 2.0 * cf * Eigen::MatrixXd(x.asDiagonal());
            },
            [d, m, cg, col_pair](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
                Eigen::MatrixXd g(d, m);
                for (Eigen::Index j = 0; j < m; ++j) g.col(j) = cg * x(col_pair(j)) * x;
                return g;
            },
            [d, m, cg, col_pair](const Eigen::VectorXd& x) {
                std::vector<Eigen::MatrixXd> parts(static_cast<std::size_t>(d),
                                                   Eigen::MatrixXd::Zero(d, m));
                for (Eigen::Index k = 0; k < d; ++k)
                    for (Eigen::Index j = 0; j < m; ++j) {
                        const Eigen::Index jp = col_pair(j);
                        parts[static_cast<std::size_t>(k)].col(j) += cg * x(jp) * Eigen::VectorXd::Unit(d, k);
                        if (jp == k) parts[static_cast<std::size_t>(k)].col(j) += cg * x;
                    }
                return parts;
            },
            spec.rho);
    }
    if (spec.name == "sine") {
        const double lambda = spec.lambda, mu = spec.mu, noise = spec.noise;
        return FieldPair::make(
            1, 1,
            [lambda, mu](const Eigen::VectorXd& x) -> Eigen::VectorXd {
                return Eigen::VectorXd::Constant(1, -lambda * x(0) + mu * std::sin(x(0)));
            },
            [lambda, mu](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
                return Eigen::MatrixXd::Constant(1, 1, -lambda + mu * std::cos(x(0)));
            },
            [noise](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
                return Eigen::MatrixXd::Constant(1, 1, noise * x(0));
            },
            [noise](const Eigen::VectorXd&) {
                return std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Constant(1, 1, noise)};
            },
            spec.rho);
    }
    throw ConfigError("unknown field catalog name: " + spec.name);
}

}  // namespace hoelderflow
