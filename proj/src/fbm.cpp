#include "hoelderflow/fbm.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <mutex>
#include <random>

#include "hoelderflow/errors.hpp"

namespace hoelderflow {

namespace {

// FFTW plan creation/destruction is not thread safe.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Deterministic standard normals: mt19937_64 + Box-Muller with the uniform
// draw spelled out, so the sequence is pinned by the seed alone.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = kTwoPi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Autocovariance of fractional Gaussian noise at step dt.
double fgn_autocov(std::size_t k, double hurst, double dt) {
    const double h2 = 2.0 * hurst;
    const double kk = static_cast<double>(k);
    return 0.5 * std::pow(dt, h2) *
           (std::pow(kk + 1.0, h2) + (k == 0 ? 1.0 : std::pow(kk - 1.0, h2)) - 2.0 * std::pow(kk, h2));
}

// Davies-Harte circulant embedding. Returns false when the embedding has a
// meaningfully negative eigenvalue.
bool sample_fgn_circulant(std::size_t n, double hurst, double dt, GaussianSource& gauss,
                          std::vector<double>& fgn) {
    const std::size_t m = 2 * n;
    std::vector<double> row(m);
    for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocov(k, hurst, dt);
    for (std::size_t k = 1; k < n; ++k) row[m - k] = row[k];

    std::vector<std::complex<double>> buf(m), freq(m);
    for (std::size_t k = 0; k < m; ++k) buf[k] = row[k];

    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(buf.data()),
                                reinterpret_cast<fftw_complex*>(freq.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);

    double max_eig = 0.0, min_eig = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        max_eig = std::max(max_eig, freq[k].real());
        min_eig = std::min(min_eig, freq[k].real());
    }
    if (min_eig < -1e-10 * std::max(max_eig, 1.0)) {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
        return false;
    }

    const double dm = static_cast<double>(m);
    std::vector<std::complex<double>> coef(m);
    coef[0] = std::sqrt(std::max(freq[0].real(), 0.0) / dm) * gauss();
    coef[n] = std::sqrt(std::max(freq[n].real(), 0.0) / dm) * gauss();
    for (std::size_t k = 1; k < n; ++k) {
        const double scale = std::sqrt(std::max(freq[k].real(), 0.0) / (2.0 * dm));
        const double zr = gauss();
        const double zi = gauss();
        coef[k] = std::complex<double>(scale * zr, scale * zi);
        coef[m - k] = std::conj(coef[k]);
    }

    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(coef.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }

    fgn.resize(n);
    for (std::size_t k = 0; k < n; ++k) fgn[k] = buf[k].real();
    return true;
}

// Cholesky of the n x n Toeplitz increment covariance; O(n^3), capped.
constexpr std::size_t kCholeskyCap = 4096;

void sample_fgn_cholesky(std::size_t n, double hurst, double dt, GaussianSource& gauss,
                         std::vector<double>& fgn) {
    if (n > kCholeskyCap)
        throw ConfigError("fbm: cholesky sampling capped at " + std::to_string(kCholeskyCap) +
                          " steps");
    Eigen::MatrixXd cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                fgn_autocov(i > j ? i - j : j - i, hurst, dt);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw ConfigError("fbm: increment covariance is not positive definite");
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i)) = gauss();
    Eigen::VectorXd x = llt.matrixL() * z;
    fgn.assign(x.data(), x.data() + n);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    Eigen::VectorXd ev = es.eigenvalues();
    const double floor = -1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < floor) throw ConfigError("fbm: Q is not positive semidefinite");
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void FbmConfig::validate() const {
    if (!(hurst > 0.5 && hurst < 1.0)) throw ConfigError("fbm: H must lie strictly in (1/2, 1)");
    if (horizon <= 0.0) throw ConfigError("fbm: horizon must be positive");
    if (steps < 1) throw ConfigError("fbm: at least one step required");
    if (q_matrix.rows() != q_matrix.cols() || q_matrix.rows() < 1)
        throw ConfigError("fbm: Q must be a square matrix");
    if ((q_matrix - q_matrix.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, q_matrix.cwiseAbs().maxCoeff()))
        throw ConfigError("fbm: Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw ConfigError("fbm: Q must be positive semidefinite");
}

Eigen::MatrixXd fbm_covariance(double s, double t, double hurst, const Eigen::MatrixXd& q) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("fbm covariance: H outside (0,1)");
    if (q.rows() != q.cols()) throw ConfigError("fbm covariance: Q must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw ConfigError("fbm covariance: Q must be positive semidefinite");
    const double h2 = 2.0 * hurst;
    const double scale =
        0.5 * (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) - std::pow(std::abs(t - s), h2));
    return scale * q;
}

FbmSample fbm_sample(const FbmConfig& config) {
    config.validate();
    const std::size_t n = config.steps;
    const auto m = config.q_matrix.rows();
    const double dt = config.horizon / static_cast<double>(n);

    GaussianSource gauss(config.seed);
    FbmSample out;
    out.method_used = config.method;

    // Independent unit-Q components; Q^{1/2} mixes them afterwards.
    Eigen::MatrixXd increments(static_cast<Eigen::Index>(n), m);
    std::vector<double> fgn;
    for (Eigen::Index c = 0; c < m; ++c) {
        if (config.method == FbmMethod::circulant) {
            if (sample_fgn_circulant(n, config.hurst, dt, gauss, fgn)) {
                out.method_used = FbmMethod::circulant;
            } else {
                out.fallback = true;
                out.method_used = FbmMethod::cholesky;
                sample_fgn_cholesky(n, config.hurst, dt, gauss, fgn);
            }
        } else {
            sample_fgn_cholesky(n, config.hurst, dt, gauss, fgn);
        }
        for (std::size_t i = 0; i < n; ++i)
            increments(static_cast<Eigen::Index>(i), c) = fgn[i];
    }
    if (m > 1 || std::abs(config.q_matrix(0, 0) - 1.0) > 1e-15) {
        const Eigen::MatrixXd root = psd_sqrt(config.q_matrix);
        increments = increments * root.transpose();
    }

    SampledPath& path = out.path;
    path.t0 = 0.0;
    path.dt = dt;
    path.beta_prime = config.beta_prime > 0.0 ? config.beta_prime : config.hurst - 0.02;
    path.values.setZero(static_cast<Eigen::Index>(n + 1), m);
    for (std::size_t i = 0; i < n; ++i)
        path.values.row(static_cast<Eigen::Index>(i + 1)) =
            path.values.row(static_cast<Eigen::Index>(i)) + increments.row(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace hoelderflow
