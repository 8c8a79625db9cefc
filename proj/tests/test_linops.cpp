#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <random>

#include "hoelderflow/linops.hpp"

using namespace hoelderflow;

namespace {

// Independent oracle: truncated series in long double, no scaling tricks.
Eigen::MatrixXd series_exp_oracle(const Eigen::MatrixXd& a, double t, int terms = 60) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= terms; ++k) {
        term = term * (a * t) / static_cast<double>(k);
        result += term;
    }
    return result;
}

Eigen::MatrixXd random_stable(std::mt19937_64& rng, int d, double shift) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = gauss(rng);
    a -= (spectral_norm(a) + shift) * Eigen::MatrixXd::Identity(d, d);
    return a;
}

}  // namespace

TEST_CASE("spectral abscissa") {
    CHECK(spectral_abscissa(-Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(-1.0));
    Eigen::MatrixXd rot(2, 2);
    rot << 0, 1, -1, 0;  // eigenvalues +-i
    CHECK(spectral_abscissa(rot) == doctest::Approx(0.0).epsilon(1e-12));
    Eigen::MatrixXd tri(2, 2);
    tri << -2, 1, 0, -3;  // characteristic polynomial (x+2)(x+3)
    CHECK(spectral_abscissa(tri) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK_THROWS_AS(spectral_abscissa(Eigen::MatrixXd::Zero(2, 3)), std::domain_error);
}

TEST_CASE("spectral norm matches svd on random matrices") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int it = 0; it < 50; ++it) {
        const int r = 1 + static_cast<int>(rng() % 5);
        const int c = 1 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd a(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) a(i, j) = gauss(rng);
        const double svd = a.jacobiSvd().singularValues()(0);
        CHECK(spectral_norm(a) == doctest::Approx(svd).epsilon(1e-8));
    }
    CHECK(spectral_norm(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
}

TEST_CASE("matrix exponential basics") {
    Eigen::MatrixXd a(2, 2);
    a << -1.0, 0.3, 0.0, -2.0;
    SUBCASE("t = 0 is the identity") {
        CHECK((matrix_exp(a, 0.0) - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    }
    SUBCASE("diagonal case") {
        Eigen::MatrixXd d = Eigen::Vector2d(-1.0, -2.0).asDiagonal();
        const Eigen::MatrixXd e = matrix_exp(d, 1.0);
        CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
        CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
        CHECK(std::abs(e(0, 1)) + std::abs(e(1, 0)) < 1e-15);
    }
    SUBCASE("jordan block closed form") {
        Eigen::MatrixXd j(2, 2);
        j << -2.0, 1.0, 0.0, -2.0;
        const Eigen::MatrixXd e = matrix_exp(j, 1.0);
        Eigen::MatrixXd expected(2, 2);
        expected << 1.0, 1.0, 0.0, 1.0;
        expected *= std::exp(-2.0);
        CHECK((e - expected).norm() < 1e-12);
        CHECK((e - series_exp_oracle(j, 1.0)).norm() < 1e-12);
    }
}

TEST_CASE("matrix exponential against the series oracle") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int it = 0; it < 30; ++it) {
        const int d = 2 + static_cast<int>(rng() % 4);
        Eigen::MatrixXd a(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) a(i, j) = gauss(rng);
        const double t = 0.1 + 2.0 * std::abs(gauss(rng));
        const Eigen::MatrixXd mine = matrix_exp(a, t);
        const Eigen::MatrixXd oracle = series_exp_oracle(a, t, 120);
        CHECK((mine - oracle).norm() <= 1e-10 * std::max(1.0, oracle.norm()));
    }
}

TEST_CASE("semigroup law") {
    std::mt19937_64 rng(13);
    const Eigen::MatrixXd a = random_stable(rng, 4, 0.5);
    const Eigen::MatrixXd lhs = matrix_exp(a, 0.4) * matrix_exp(a, 0.9);
    const Eigen::MatrixXd rhs = matrix_exp(a, 1.3);
    CHECK((lhs - rhs).norm() < 1e-9 * std::max(1.0, rhs.norm()));
}

TEST_CASE("augmented integral block") {
    Eigen::MatrixXd a(2, 2);
    a << -1.0, 0.2, 0.1, -3.0;
    Eigen::MatrixXd e, integral;
    matrix_exp_with_integral(a, 0.7, e, integral);
    CHECK((e - matrix_exp(a, 0.7)).norm() < 1e-12);
    // int_0^t e^{As} ds = A^{-1}(e^{At} - I) for invertible A
    const Eigen::MatrixXd closed = a.inverse() * (matrix_exp(a, 0.7) - Eigen::MatrixXd::Identity(2, 2));
    CHECK((integral - closed).norm() < 1e-11);
}

TEST_CASE("stable matrix construction enforces the margin") {
    CHECK_THROWS_AS(StableMatrix(Eigen::MatrixXd::Identity(2, 2), 1.0), StabilityError);
    Eigen::MatrixXd a = -2.0 * Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(StableMatrix(a, 2.5), StabilityError);  // abscissa -2 not < -2.5
    CHECK_NOTHROW(StableMatrix(a, 1.0));
}

TEST_CASE("estimate_M on closed-form cases") {
    SUBCASE("A = -I, lambda = 1 gives exactly the floor") {
        const StableMatrix s(-Eigen::MatrixXd::Identity(3, 3), 1.0);
        CHECK(estimate_M(s, 50).m_const == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("diagonal with slack margin still gives 1") {
        const StableMatrix s(Eigen::Vector2d(-1.0, -2.0).asDiagonal().toDenseMatrix(), 0.5);
        CHECK(estimate_M(s, 50).m_const == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("jordan block against a dense t-grid oracle") {
        Eigen::MatrixXd j(2, 2);
        j << -2.0, 1.0, 0.0, -2.0;
        // with lambda = 1 the excess e^{-t} |e^{Jt}| e^{2t}... stays below 1;
        // a margin close to the abscissa forces M > 1.
        for (double lambda : {1.0, 1.75}) {
            const StableMatrix s(j, lambda);
            const SemigroupBound bound = estimate_M(s, 100);
            CHECK(std::isfinite(bound.m_const));
            double brute = 1.0;
            for (int i = 0; i <= 20000; ++i) {
                const double t = (10.0 / lambda) * i / 20000.0;
                brute = std::max(brute, spectral_norm(matrix_exp(j, t)) * std::exp(lambda * t));
            }
            CHECK(bound.m_const >= brute - 1e-6);
            CHECK(bound.m_const <= brute * (1.0 + 1e-4));
        }
        CHECK(estimate_M(StableMatrix(j, 1.75), 100).m_const > 1.0);
    }
}

TEST_CASE("decay bound holds on a disjoint random grid") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(0.0, 12.0);
    for (int it = 0; it < 10; ++it) {
        const Eigen::MatrixXd a = random_stable(rng, 3, 0.8);
        const StableMatrix s(a, 0.5);
        const SemigroupBound bound = estimate_M(s, 100);
        for (int k = 0; k < 40; ++k) {
            const double t = uni(rng);
            const double excess = spectral_norm(matrix_exp(a, t)) * std::exp(bound.lambda * t);
            CHECK(excess <= bound.m_const + 1e-9);
        }
    }
}

TEST_CASE("semigroup increment inequalities") {
    SUBCASE("scalar contraction has positive slack") {
        const StableMatrix s(-Eigen::MatrixXd::Identity(1, 1), 0.5);
        const SemigroupBound bound = estimate_M(s, 50);
        const SemigroupCheckReport report = semigroup_increment_check(s, bound, 0.6, 16);
        CHECK(report.min_slack() > 0.0);
    }
    SUBCASE("identity difference bound, second half of the difference estimate") {
        Eigen::MatrixXd a(2, 2);
        a << -1.5, 0.7, -0.2, -2.5;
        const StableMatrix s(a, 1.0);
        const SemigroupBound bound = estimate_M(s, 100);
        const double a_norm = spectral_norm(a);
        for (double dt : {0.05, 0.3, 0.9}) {
            const double lhs =
                spectral_norm(matrix_exp(a, dt) - Eigen::MatrixXd::Identity(2, 2));
            CHECK(lhs <= bound.m_const * a_norm * dt + 1e-9);
        }
    }
    SUBCASE("random stable matrices keep nonnegative slack") {
        std::mt19937_64 rng(23);
        for (int it = 0; it < 12; ++it) {
            const int d = 2 + static_cast<int>(rng() % 4);
            const Eigen::MatrixXd a = random_stable(rng, d, 0.6);
            const StableMatrix s(a, 0.4);
            const SemigroupBound bound = estimate_M(s, 100);
            const SemigroupCheckReport report = semigroup_increment_check(s, bound, 0.7, 12);
            CHECK(report.min_slack() >= -1e-9);
        }
    }
}
