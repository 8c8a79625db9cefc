#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "hoelderflow/path.hpp"

namespace hoelderflow {

enum class FbmMethod { cholesky, circulant };

/// Configuration for an exact fractional Brownian motion sample with
/// covariance (1/2) Q (|t|^{2H} + |s|^{2H} - |t-s|^{2H}).
struct FbmConfig {
    double hurst = 0.75;          // H in (1/2, 1)
    Eigen::MatrixXd q_matrix;     // symmetric PSD, m x m
    double horizon = 1.0;         // T > 0
    std::size_t steps = 1024;     // n >= 1
    std::uint64_t seed = 0;
    FbmMethod method = FbmMethod::circulant;
    // Declared Hoelder exponent of the produced path; <= 0 means H - 0.02.
    double beta_prime = 0.0;

    void validate() const;  // throws ConfigError
};

struct FbmSample {
    SampledPath path;
    FbmMethod method_used = FbmMethod::circulant;
    bool fallback = false;  // circulant embedding was not PSD, used cholesky
};

/// Covariance R(s,t) = (1/2) Q (|t|^{2H} + |s|^{2H} - |t-s|^{2H}).
Eigen::MatrixXd fbm_covariance(double s, double t, double hurst, const Eigen::MatrixXd& q);

/// Exact-in-distribution fBm sample. Circulant (Davies-Harte) embedding of
/// the increment covariance by default, Cholesky of the Toeplitz increment
/// covariance as fallback or on request. Deterministic given the seed.
FbmSample fbm_sample(const FbmConfig& config);

}  // namespace hoelderflow
