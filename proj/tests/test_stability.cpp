#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hoelderflow/errors.hpp"
#include "hoelderflow/fbm.hpp"
#include "hoelderflow/stability.hpp"

using namespace hoelderflow;

namespace {

FieldPair quadratic_scalar_pair(double rho = 1.0) {  // F = -x + x^2, G = x^2
    return FieldPair::make(
        1, 1,
        [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, -x(0) + x(0) * x(0)); },
        [](const Eigen::VectorXd& x) { return Eigen::MatrixXd::Constant(1, 1, -1.0 + 2.0 * x(0)); },
        [](const Eigen::VectorXd& x) { return Eigen::MatrixXd::Constant(1, 1, x(0) * x(0)); },
        [](const Eigen::VectorXd& x) {
            return std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Constant(1, 1, 2.0 * x(0))};
        },
        rho);
}

SampledPath fbm_driver(std::size_t units, std::size_t steps_per_unit, std::uint64_t seed) {
    FbmConfig cfg;
    cfg.hurst = 0.75;
    cfg.q_matrix = Eigen::MatrixXd::Identity(1, 1);
    cfg.horizon = static_cast<double>(units);
    cfg.steps = units * steps_per_unit;
    cfg.seed = seed;
    cfg.beta_prime = 0.73;
    return fbm_sample(cfg).path;
}

StabilityParams default_params(int n_intervals, const Eigen::VectorXd& u0) {
    const double lambda = 1.0, eps = 0.5;
    return StabilityParams(lambda, eps, eps_hat_max(lambda, eps), 0.7, 0.73, 0.485, n_intervals, u0);
}

}  // namespace

TEST_CASE("largest admissible eps_hat") {
    SUBCASE("algebraic closed form at lambda=1, eps=1/2") {
        // numerator e^{-1/2}(1-e^{-1/2}) cancels the denominator
        CHECK(eps_hat_max(1.0, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    }
    SUBCASE("vanishes as eps -> 0") {
        CHECK(eps_hat_max(1.0, 1e-6) < 1e-5);
        CHECK(eps_hat_max(1.0, 1e-9) < 1e-8);
    }
    SUBCASE("sits exactly on the boundary") {
        for (double lambda : {0.7, 1.0, 2.0}) {
            for (double eps : {0.1, 0.45 * lambda}) {
                const double eh = eps_hat_max(lambda, eps);
                const double lhs = std::exp(-lambda) + eh;
                const double rhs = (1.0 + eh) * std::exp(-(lambda - eps));
                CHECK(lhs <= rhs + 1e-12);
                const double bumped = eh + 1e-6;
                CHECK(std::exp(-lambda) + bumped > (1.0 + bumped) * std::exp(-(lambda - eps)));
            }
        }
    }
    SUBCASE("requires 0 < eps < lambda") {
        CHECK_THROWS_AS(eps_hat_max(1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(eps_hat_max(1.0, -0.1), std::domain_error);
    }
}

TEST_CASE("stability params validation") {
    const Eigen::VectorXd u0 = Eigen::VectorXd::Constant(1, 1e-4);
    CHECK_NOTHROW(default_params(10, u0));
    // eq15 violated: eps_hat above the closed-form maximum
    CHECK_THROWS_AS(StabilityParams(1.0, 0.5, eps_hat_max(1.0, 0.5) + 1e-3, 0.7, 0.73, 0.485, 10, u0),
                    ConfigError);
    // cond violated: log(1+eps_hat) > lambda - eps (large lambda admits eps_hat ~ 1)
    CHECK(std::log1p(0.9) > 0.6);
    CHECK_THROWS_AS(StabilityParams(1.0, 0.4, 0.9, 0.7, 0.73, 0.485, 10, u0), ConfigError);
    // exponents out of order
    CHECK_THROWS_AS(StabilityParams(1.0, 0.5, 0.3, 0.75, 0.73, 0.485, 10, u0), ConfigError);
    // alpha outside the admissible window
    CHECK_THROWS_AS(StabilityParams(1.0, 0.5, 0.3, 0.7, 0.73, 0.25, 10, u0), ConfigError);
    // the theorem rate is (lambda - eps) - log(1 + eps_hat)
    const StabilityParams p = default_params(10, u0);
    CHECK(p.theorem_rate() == doctest::Approx(0.5 - std::log1p(p.eps_hat)).epsilon(1e-12));
}

TEST_CASE("gronwall recursion") {
    const double lambda = 1.0, eps = 0.5, k = 2.0, zeta0 = 0.3;
    const double eps_hat = eps_hat_max(lambda, eps);

    SUBCASE("pure decay satisfies hypothesis and conclusion") {
        std::vector<double> v;
        for (int n = 0; n < 40; ++n) v.push_back(k * zeta0 * std::exp(-lambda * n));
        const GronwallVerdict verdict = gronwall_check(v, zeta0, k, lambda, eps, eps_hat);
        CHECK(verdict.hypothesis_ok);
        CHECK(verdict.conclusion_ok);
    }
    SUBCASE("saturated recursion: v equals the right-hand side") {
        std::vector<double> v;
        double tail = 0.0;
        for (int n = 0; n < 60; ++n) {
            const double z = k * zeta0 * std::exp(-lambda * n) + eps_hat * tail;
            v.push_back(z);
            tail = std::exp(-lambda) * tail + z;
        }
        const GronwallVerdict verdict = gronwall_check(v, zeta0, k, lambda, eps, eps_hat);
        CHECK(verdict.hypothesis_ok);
        CHECK(verdict.conclusion_ok);
        CHECK(verdict.conclusion_min_slack >= -1e-12);
    }
    SUBCASE("random sequences below the recursion satisfy the conclusion") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> uni(0.05, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> v;
            double tail = 0.0;
            for (int n = 0; n < 50; ++n) {
                const double z = k * zeta0 * std::exp(-lambda * n) + eps_hat * tail;
                const double value = uni(rng) * z;
                v.push_back(value);
                tail = std::exp(-lambda) * tail + value;
            }
            const GronwallVerdict verdict = gronwall_check(v, zeta0, k, lambda, eps, eps_hat);
            CHECK(verdict.hypothesis_ok);
            CHECK(verdict.conclusion_ok);
            CHECK(verdict.conclusion_min_slack >= -1e-12);
        }
    }
    SUBCASE("violations are located") {
        std::vector<double> v = {k * zeta0, 10.0 * k * zeta0};
        const GronwallVerdict verdict = gronwall_check(v, zeta0, k, lambda, eps, eps_hat);
        CHECK_FALSE(verdict.hypothesis_ok);
        CHECK(verdict.hypothesis_violations == std::vector<int>{1});
    }
}

TEST_CASE("comparison of decaying sequences") {
    const double c_eps = 0.4, eps = 0.2, mu = 0.7;
    auto r_seq = [&](int n) {
        std::vector<double> r;
        for (int i = 0; i < n; ++i) r.push_back(c_eps * std::exp(-eps * i));
        return r;
    };
    auto v_seq = [&](double v0, int n) {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(v0 * std::exp(-mu * i));
        return v;
    };

    SUBCASE("v0 at the threshold holds with equality at i = 0") {
        const ComparisonVerdict verdict = comparison_check(r_seq(30), v_seq(c_eps, 30), c_eps, eps, mu);
        CHECK(verdict.inputs_ok);
        CHECK(verdict.holds);
        CHECK(verdict.threshold == doctest::Approx(c_eps));
    }
    SUBCASE("v0 below the threshold holds strictly") {
        const ComparisonVerdict verdict =
            comparison_check(r_seq(30), v_seq(0.5 * c_eps, 30), c_eps, eps, mu);
        CHECK(verdict.holds);
    }
    SUBCASE("v0 above the threshold fails at i = 0") {
        const ComparisonVerdict verdict =
            comparison_check(r_seq(30), v_seq(1.01 * c_eps, 30), c_eps, eps, mu);
        CHECK_FALSE(verdict.holds);
        REQUIRE_FALSE(verdict.violations.empty());
        CHECK(verdict.violations.front() == 0);
    }
    SUBCASE("eps >= mu rejected") {
        CHECK_THROWS_AS(comparison_check(r_seq(5), v_seq(0.1, 5), c_eps, 0.8, 0.7),
                        std::domain_error);
    }
}

TEST_CASE("unit-interval iteration") {
    const FieldPair pair = quadratic_scalar_pair();
    const Linearization lin = split_linearization(pair);
    const CutoffKit& kit = shared_cutoff_kit();
    const HoelderBoundMap bound(lin, pair);
    const int n_intervals = 8;
    const SampledPath omega = fbm_driver(n_intervals + 1, 256, 42);

    SUBCASE("zero start stays zero with infinite fitted decay") {
        const StabilityParams params = default_params(n_intervals, Eigen::VectorXd::Zero(1));
        const StabilityReport report =
            iterate_unit_intervals(lin, pair, kit, params, omega, bound);
        CHECK(report.intervals_run == n_intervals);
        for (double n : report.norms) CHECK(n == 0.0);
        for (bool f : report.cutoff_active) CHECK_FALSE(f);
        CHECK(std::isinf(report.fitted_rate));
        CHECK_FALSE(report.escaped);
    }
    SUBCASE("small start decays without cutoff activity") {
        const StabilityParams params =
            default_params(n_intervals, Eigen::VectorXd::Constant(1, 1e-6));
        const StabilityReport report =
            iterate_unit_intervals(lin, pair, kit, params, omega, bound);
        CHECK(report.intervals_run == n_intervals);
        CHECK_FALSE(report.escaped);
        for (bool f : report.cutoff_active) CHECK_FALSE(f);
        CHECK(report.fitted_rate > params.theorem_rate() - 0.1);
        CHECK(report.m_used >= 1.0);
        CHECK(report.big_k >= 1.0);
        // norms decay across the run
        CHECK(report.norms.back() < report.norms.front());
    }
    SUBCASE("large start trips the cutoff immediately") {
        const StabilityParams params = default_params(n_intervals, Eigen::VectorXd::Constant(1, 10.0));
        const StabilityReport report =
            iterate_unit_intervals(lin, pair, kit, params, omega, bound);
        CHECK(report.escaped);
        CHECK(report.escape_index == 0);
        CHECK(report.cutoff_active.front());
    }
    SUBCASE("driver too short is rejected") {
        const StabilityParams params = default_params(n_intervals, Eigen::VectorXd::Zero(1));
        const SampledPath short_omega = fbm_driver(n_intervals, 256, 42);
        CHECK_THROWS_AS(iterate_unit_intervals(lin, pair, kit, params, short_omega, bound),
                        std::domain_error);
    }
}

TEST_CASE("admissible neighborhood search") {
    const CutoffKit& kit = shared_cutoff_kit();
    const int n_intervals = 6;
    const SampledPath omega = fbm_driver(n_intervals + 1, 128, 7);

    SUBCASE("stable linear dynamics never escape: caps at rho") {
        CatalogSpec spec;
        spec.name = "linear";
        spec.a = -1.5 * Eigen::MatrixXd::Identity(1, 1);
        spec.gamma = Eigen::MatrixXd::Zero(1, 1);
        spec.rho = 1.0;
        const FieldPair pair = make_catalog_field(spec);
        const Linearization lin = split_linearization(pair);
        const HoelderBoundMap bound(lin, pair);
        const StabilityParams params = default_params(n_intervals, Eigen::VectorXd::Constant(1, 1.0));
        const double radius =
            admissible_neighborhood(lin, pair, kit, params, omega, bound);
        CHECK(radius == doctest::Approx(pair.rho));
    }
    SUBCASE("quadratic fields give a positive finite radius with a sharp edge") {
        const FieldPair pair = quadratic_scalar_pair();
        const Linearization lin = split_linearization(pair);
        const HoelderBoundMap bound(lin, pair);
        const StabilityParams params = default_params(n_intervals, Eigen::VectorXd::Constant(1, 1.0));
        const double radius = admissible_neighborhood(lin, pair, kit, params, omega, bound);
        CHECK(radius > 0.0);
        CHECK(radius < pair.rho);

        StabilityOptions stop;
        stop.stop_on_escape = true;
        const StabilityParams below =
            default_params(n_intervals, Eigen::VectorXd::Constant(1, 0.9 * radius));
        CHECK_FALSE(iterate_unit_intervals(lin, pair, kit, below, omega, bound, stop).escaped);
        const StabilityParams above =
            default_params(n_intervals, Eigen::VectorXd::Constant(1, 1.5 * radius));
        CHECK(iterate_unit_intervals(lin, pair, kit, above, omega, bound, stop).escaped);
    }
}

TEST_CASE("uncut runs solve the unlocalized equation") {
    const FieldPair pair = quadratic_scalar_pair();
    const Linearization lin = split_linearization(pair);
    const CutoffKit& kit = shared_cutoff_kit();
    const HoelderBoundMap bound(lin, pair);
    const int n_intervals = 6;
    const SampledPath omega = fbm_driver(n_intervals + 1, 128, 3);

    SUBCASE("consistent when no flag is active, with a tiny crosscheck distance") {
        const StabilityParams params =
            default_params(n_intervals, Eigen::VectorXd::Constant(1, 1e-6));
        const StabilityReport report =
            iterate_unit_intervals(lin, pair, kit, params, omega, bound);
        const UncutCheck check = uncut_consistency(lin, pair, params, omega, report);
        CHECK(check.consistent);
        CHECK(check.crosscheck_sup_distance <= 1e-6);
    }
    SUBCASE("inconsistent when a flag is active") {
        const StabilityParams params = default_params(n_intervals, Eigen::VectorXd::Constant(1, 10.0));
        const StabilityReport report =
            iterate_unit_intervals(lin, pair, kit, params, omega, bound);
        const UncutCheck check = uncut_consistency(lin, pair, params, omega, report);
        CHECK_FALSE(check.consistent);
    }
    SUBCASE("zero start is trivially consistent") {
        const StabilityParams params = default_params(n_intervals, Eigen::VectorXd::Zero(1));
        const StabilityReport report =
            iterate_unit_intervals(lin, pair, kit, params, omega, bound);
        const UncutCheck check = uncut_consistency(lin, pair, params, omega, report);
        CHECK(check.consistent);
        CHECK(check.crosscheck_sup_distance == 0.0);
    }
}
