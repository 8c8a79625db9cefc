#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hoelderflow/errors.hpp"
#include "hoelderflow/fbm.hpp"
#include "hoelderflow/fraccalc.hpp"

using namespace hoelderflow;

namespace {

MatrixPath constant_integrand(double c, double t0, double horizon, std::size_t steps, double beta) {
    return sample_matrix_path([c](double) { return Eigen::MatrixXd::Constant(1, 1, c); }, t0,
                              horizon, steps, beta);
}

MatrixPath scalar_integrand(const std::function<double(double)>& f, double t0, double horizon,
                            std::size_t steps, double beta) {
    return sample_matrix_path(
        [f](double t) { return Eigen::MatrixXd::Constant(1, 1, f(t)); }, t0, horizon, steps, beta);
}

SampledPath fbm_path(double hurst, std::size_t steps, double horizon, std::uint64_t seed) {
    FbmConfig cfg;
    cfg.hurst = hurst;
    cfg.q_matrix = Eigen::MatrixXd::Identity(1, 1);
    cfg.horizon = horizon;
    cfg.steps = steps;
    cfg.seed = seed;
    return fbm_sample(cfg).path;
}

}  // namespace

TEST_CASE("riemann-stieltjes young integral") {
    SUBCASE("constant integrand telescopes") {
        const SampledPath w = fbm_path(0.75, 1 << 10, 1.0, 5);
        const MatrixPath g = constant_integrand(2.5, 0, 1.0, 1 << 10, 0.9);
        const YoungResult r = young_integral_rs(g, w, 0.0, 1.0);
        const double expected = 2.5 * (w.values(1 << 10, 0) - w.values(0, 0));
        CHECK(r.value(0) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(r.converged);  // every dyadic level produces the same sum
    }
    SUBCASE("smooth self integral approaches w(1)^2/2") {
        auto f = [](double t) { return std::sin(2.0 * t) + t; };
        const std::size_t n = 1 << 12;
        const SampledPath w = sample_scalar_path(f, 0, 1.0, n, 0.9);
        const MatrixPath g = scalar_integrand(f, 0, 1.0, n, 0.9);
        const YoungResult r = young_integral_rs(g, w, 0.0, 1.0);
        const double target = 0.5 * f(1.0) * f(1.0);
        CHECK(r.value(0) == doctest::Approx(target).epsilon(2e-3));
        CHECK(std::abs(r.extrapolated(0) - target) < 1e-6 * std::abs(target));
    }
    SUBCASE("closed-form calculus oracle: int_0^1 r d(q^2) = 2/3") {
        const std::size_t n = 1 << 12;
        const SampledPath w = sample_scalar_path([](double t) { return t * t; }, 0, 1.0, n, 0.9);
        const MatrixPath g = scalar_integrand([](double t) { return t; }, 0, 1.0, n, 0.9);
        const YoungResult r = young_integral_rs(g, w, 0.0, 1.0);
        CHECK(r.value(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
        CHECK(r.extrapolated(0) == doctest::Approx(2.0 / 3.0).epsilon(2e-7));
    }
    SUBCASE("additivity over a split point") {
        const SampledPath w = fbm_path(0.8, 1 << 10, 1.0, 9);
        const MatrixPath g = scalar_integrand([](double t) { return std::cos(3.0 * t); }, 0, 1.0,
                                              1 << 10, 0.9);
        const double whole = young_integral_rs(g, w, 0.0, 1.0).value(0);
        const double left = young_integral_rs(g, w, 0.0, 0.375).value(0);
        const double right = young_integral_rs(g, w, 0.375, 1.0).value(0);
        CHECK(whole == doctest::Approx(left + right).epsilon(1e-12));
    }
    SUBCASE("left linearity under a matrix") {
        FbmConfig cfg;
        cfg.hurst = 0.75;
        cfg.q_matrix = Eigen::MatrixXd::Identity(2, 2);
        cfg.horizon = 1.0;
        cfg.steps = 512;
        cfg.seed = 31;
        const SampledPath w = fbm_sample(cfg).path;
        const MatrixPath g = sample_matrix_path(
            [](double t) {
                Eigen::MatrixXd m(2, 2);
                m << t, std::sin(t), 0.5 * t * t, 1.0;
                return m;
            },
            0, 1.0, 512, 0.9);
        Eigen::MatrixXd l(3, 2);
        l << 1, 2, -1, 0.5, 0, 1;
        MatrixPath lg = g;
        for (auto& v : lg.values) v = l * v;
        const Eigen::VectorXd direct = l * young_integral_rs(g, w, 0.0, 1.0).value;
        const Eigen::VectorXd mapped = young_integral_rs(lg, w, 0.0, 1.0).value;
        CHECK((direct - mapped).norm() < 1e-12 * std::max(1.0, mapped.norm()));
    }
    SUBCASE("regularity and grid errors") {
        const SampledPath w = fbm_path(0.75, 64, 1.0, 2);
        MatrixPath g = constant_integrand(1.0, 0, 1.0, 64, 0.2);
        g.beta = 0.2;  // 0.2 + 0.73 < 1
        CHECK_THROWS_AS(young_integral_rs(g, w, 0.0, 1.0), RegularityError);
        MatrixPath g2 = constant_integrand(1.0, 0, 1.0, 32, 0.9);
        CHECK_THROWS_AS(young_integral_rs(g2, w, 0.0, 1.0), std::domain_error);
    }
}

TEST_CASE("fractional derivative, left-sided") {
    SUBCASE("constant integrand has no difference term") {
        const MatrixPath g = constant_integrand(3.0, 0, 1.0, 256, 0.9);
        const FracOrder alpha(0.35);
        const double r = 0.8;
        const double expected = 3.0 / (std::tgamma(0.65) * std::pow(r, 0.35));
        CHECK(frac_derivative_plus(g, 0.0, alpha, r)(0, 0) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("identity integrand: symbolic beta-integral oracle") {
        // D^alpha_{0+} q [1] = 1/Gamma(2-alpha) via int_0^1 (1-q)^{-alpha} dq = 1/(1-alpha)
        const MatrixPath g = scalar_integrand([](double t) { return t; }, 0, 1.0, 1 << 12, 0.95);
        const FracOrder alpha(0.4);
        const double expected = 1.0 / std::tgamma(1.6);
        CHECK(frac_derivative_plus(g, 0.0, alpha, 1.0)(0, 0) ==
              doctest::Approx(expected).epsilon(2e-4));
    }
    SUBCASE("linearity") {
        const MatrixPath g1 = scalar_integrand([](double t) { return std::sin(3 * t); }, 0, 1.0,
                                               1 << 10, 0.9);
        const MatrixPath g2 = scalar_integrand([](double t) { return t * t; }, 0, 1.0, 1 << 10, 0.9);
        MatrixPath sum = g1;
        for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += g2.values[i];
        const FracOrder alpha(0.3);
        const double split = frac_derivative_plus(g1, 0.0, alpha, 0.7)(0, 0) +
                             frac_derivative_plus(g2, 0.0, alpha, 0.7)(0, 0);
        CHECK(frac_derivative_plus(sum, 0.0, alpha, 0.7)(0, 0) ==
              doctest::Approx(split).epsilon(1e-10));
    }
    SUBCASE("r <= s rejected") {
        const MatrixPath g = constant_integrand(1.0, 0, 1.0, 64, 0.9);
        CHECK_THROWS_AS(frac_derivative_plus(g, 0.5, FracOrder(0.3), 0.5), std::domain_error);
    }
}

TEST_CASE("fractional derivative, right-sided") {
    SUBCASE("constant path vanishes") {
        const SampledPath w = sample_scalar_path([](double) { return 2.0; }, 0, 1.0, 128, 0.8);
        CHECK(frac_derivative_minus(w, 1.0, FracOrder(0.4), 0.3).norm() == 0.0);
    }
    SUBCASE("identity path magnitude (1-r)^alpha / Gamma(1+alpha)") {
        const SampledPath w = sample_scalar_path([](double t) { return t; }, 0, 1.0, 1 << 12, 0.95);
        const FracOrder alpha(0.45);
        for (double r : {0.2, 0.5, 0.8}) {
            const double expected = std::pow(1.0 - r, 0.45) / std::tgamma(1.45);
            CHECK(std::abs(frac_derivative_minus(w, 1.0, alpha, r)(0)) ==
                  doctest::Approx(expected).epsilon(2e-4));
        }
    }
    SUBCASE("homogeneous of degree one") {
        const SampledPath w = fbm_path(0.75, 512, 1.0, 77);
        SampledPath w2 = w;
        w2.values *= 2.0;
        const FracOrder alpha(0.4);
        const double single = frac_derivative_minus(w, 1.0, alpha, 0.4)(0);
        const double doubled = frac_derivative_minus(w2, 1.0, alpha, 0.4)(0);
        CHECK(doubled == doctest::Approx(2.0 * single).epsilon(1e-12));
    }
    SUBCASE("r >= t rejected") {
        const SampledPath w = sample_scalar_path([](double t) { return t; }, 0, 1.0, 64, 0.8);
        CHECK_THROWS_AS(frac_derivative_minus(w, 0.5, FracOrder(0.4), 0.5), std::domain_error);
    }
}

TEST_CASE("fractional representation of the young integral") {
    SUBCASE("beta identity: unit integrand against the identity path") {
        // int_0^1 r^{-a}(1-r)^a dr = Gamma(1-a)Gamma(1+a) cancels both prefactors.
        const std::size_t n = 1 << 12;
        const SampledPath w = sample_scalar_path([](double t) { return t; }, 0, 1.0, n, 0.75);
        const MatrixPath g = constant_integrand(1.0, 0, 1.0, n, 0.75);
        for (double a : {0.3, 0.45, 0.6}) {
            const Eigen::VectorXd v = young_integral_fracrep(g, w, 0.0, 1.0, FracOrder(a));
            CHECK(v(0) == doctest::Approx(1.0).epsilon(1e-4));
        }
    }
    SUBCASE("constant integrand against a rough path matches the RS value") {
        const SampledPath w = fbm_path(0.75, 1 << 11, 1.0, 3);
        const MatrixPath g = constant_integrand(1.7, 0, 1.0, 1 << 11, 0.74);
        const double rs = young_integral_rs(g, w, 0.0, 1.0).value(0);
        const double fr = young_integral_fracrep(g, w, 0.0, 1.0, FracOrder(0.45))(0);
        CHECK(fr == doctest::Approx(rs).epsilon(0.05));
    }
    SUBCASE("smooth pair matches RS within 1e-4") {
        const std::size_t n = 1 << 12;
        const SampledPath w = sample_scalar_path([](double t) { return t * t; }, 0, 1.0, n, 0.95);
        const MatrixPath g = scalar_integrand([](double t) { return t; }, 0, 1.0, n, 0.95);
        const double rs = young_integral_rs(g, w, 0.0, 1.0).extrapolated(0);
        const double fr = young_integral_fracrep(g, w, 0.0, 1.0, FracOrder(0.45))(0);
        CHECK(fr == doctest::Approx(rs).epsilon(1e-4));
    }
    SUBCASE("alpha independence") {
        const std::size_t n = 1 << 11;
        const SampledPath w =
            sample_scalar_path([](double t) { return std::sin(3 * t) + t; }, 0, 1.0, n, 0.9);
        const MatrixPath g =
            scalar_integrand([](double t) { return std::cos(2 * t); }, 0, 1.0, n, 0.9);
        const double v1 = young_integral_fracrep(g, w, 0.0, 1.0, FracOrder(0.35))(0);
        const double v2 = young_integral_fracrep(g, w, 0.0, 1.0, FracOrder(0.55))(0);
        CHECK(std::abs(v1 - v2) <= 2.0 * kQuadratureTol);
    }
    SUBCASE("inadmissible alpha rejected") {
        const SampledPath w = sample_scalar_path([](double t) { return t; }, 0, 1.0, 64, 0.75);
        const MatrixPath g = constant_integrand(1.0, 0, 1.0, 64, 0.75);
        CHECK_THROWS_AS(young_integral_fracrep(g, w, 0.0, 1.0, FracOrder(0.2)), RegularityError);
        CHECK_THROWS_AS(young_integral_fracrep(g, w, 0.0, 1.0, FracOrder(0.8)), RegularityError);
    }
    SUBCASE("default alpha sits inside the window") {
        const FracOrder a = default_alpha(0.7, 0.75);
        CHECK(a.alpha > 1.0 - 0.75);
        CHECK(a.alpha < 0.7);
    }
}

TEST_CASE("a-priori bound") {
    SUBCASE("zero integrand gives zero") {
        const SampledPath w = fbm_path(0.75, 256, 1.0, 4);
        const MatrixPath g = constant_integrand(0.0, 0, 1.0, 256, 0.74);
        CHECK(young_bound(g, w, 0.0, 1.0, FracOrder(0.45)) == 0.0);
    }
    SUBCASE("dominates the beta-identity value") {
        const std::size_t n = 1 << 10;
        const SampledPath w = sample_scalar_path([](double t) { return t; }, 0, 1.0, n, 0.75);
        const MatrixPath g = constant_integrand(1.0, 0, 1.0, n, 0.75);
        CHECK(young_bound(g, w, 0.0, 1.0, FracOrder(0.45)) >= 1.0);
    }
    SUBCASE("dominates the integral on random smooth pairs") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        const std::size_t n = 1 << 10;
        for (int it = 0; it < 25; ++it) {
            const double a1 = uni(rng), a2 = uni(rng), b1 = uni(rng), b2 = uni(rng);
            const SampledPath w = sample_scalar_path(
                [&](double t) { return a1 * std::sin(3 * t) + a2 * t; }, 0, 1.0, n, 0.9);
            const MatrixPath g = scalar_integrand(
                [&](double t) { return b1 * std::cos(2 * t) + b2 * t * t; }, 0, 1.0, n, 0.8);
            const FracOrder alpha = default_alpha(0.8, 0.9);
            const double bound = young_bound(g, w, 0.0, 1.0, alpha);
            const double value = std::abs(young_integral_fracrep(g, w, 0.0, 1.0, alpha)(0));
            CHECK(bound >= value);
        }
    }
}

TEST_CASE("shift property of the integral") {
    const std::size_t n = 1 << 11;
    SUBCASE("tau = 0 has zero RS residual") {
        const SampledPath w = fbm_path(0.75, n, 2.0, 13);
        const MatrixPath g =
            scalar_integrand([](double t) { return std::sin(2 * t); }, 0, 2.0, n, 0.9);
        const ShiftResidual res =
            verify_shift_property(g, w, 0.25, 0.75, 0.0, FracOrder(0.45), false);
        CHECK(res.rs == 0.0);
    }
    SUBCASE("grid-aligned shifts are float rearrangements") {
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<int> pick(1, 15);
        for (int it = 0; it < 20; ++it) {
            const SampledPath w = fbm_path(0.75, n, 2.0, 1000 + it);
            const MatrixPath g = scalar_integrand(
                [&](double t) { return std::cos(3 * t) + 0.5 * t; }, 0, 2.0, n, 0.9);
            const double tau = static_cast<double>(pick(rng)) / 16.0;
            const ShiftResidual res =
                verify_shift_property(g, w, 0.25, 0.75, tau, FracOrder(0.45), false);
            CHECK(res.rs <= 1e-12);
        }
    }
    SUBCASE("fractional representation residual within quadrature tolerance") {
        const SampledPath w =
            sample_scalar_path([](double t) { return std::sin(2 * t) + t; }, 0, 2.0, n, 0.9);
        const MatrixPath g =
            scalar_integrand([](double t) { return std::cos(t); }, 0, 2.0, n, 0.85);
        const ShiftResidual res = verify_shift_property(g, w, 0.25, 0.75, 0.5, FracOrder(0.4), true);
        CHECK(res.rs <= 1e-12);
        CHECK(res.fracrep <= 1e-4);
    }
    SUBCASE("off-grid tau rejected") {
        const SampledPath w = fbm_path(0.75, 64, 1.0, 2);
        const MatrixPath g = constant_integrand(1.0, 0, 1.0, 64, 0.9);
        CHECK_THROWS_AS(verify_shift_property(g, w, 0.0, 0.25, 0.013, FracOrder(0.45), false),
                        std::domain_error);
    }
}
