#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hoelderflow/fbm.hpp"
#include "hoelderflow/fraccalc.hpp"
#include "hoelderflow/linops.hpp"
#include "hoelderflow/solver.hpp"
#include "hoelderflow/stability.hpp"
#include "hoelderflow/version.hpp"

namespace py = pybind11;
using namespace hoelderflow;

namespace {

FbmMethod method_from_string(const std::string& name) {
    if (name == "circulant") return FbmMethod::circulant;
    if (name == "cholesky") return FbmMethod::cholesky;
    throw ConfigError("unknown fbm method '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Young differential equations driven by Hoelder paths: fBm sampling, "
              "fractional calculus, solvers and the unit-interval stability iteration.";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<RegularityError>(m, "RegularityError", PyExc_ValueError);
    py::register_exception<StabilityError>(m, "StabilityError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<SampledPath>(m, "SampledPath")
        .def(py::init([](double t0, double dt, const Eigen::MatrixXd& values, double beta_prime) {
                 SampledPath p{t0, dt, values, beta_prime};
                 p.validate();
                 return p;
             }),
             py::arg("t0"), py::arg("dt"), py::arg("values"), py::arg("beta_prime"))
        .def_readonly("t0", &SampledPath::t0)
        .def_readonly("dt", &SampledPath::dt)
        .def_readonly("values", &SampledPath::values)
        .def_readwrite("beta_prime", &SampledPath::beta_prime)
        .def_property_readonly("steps", &SampledPath::steps)
        .def_property_readonly("horizon", &SampledPath::horizon);

    py::class_<HoelderStats>(m, "HoelderStats")
        .def_readonly("seminorm", &HoelderStats::seminorm)
        .def_readonly("sup", &HoelderStats::sup)
        .def_readonly("lag_capped", &HoelderStats::lag_capped)
        .def("norm", &HoelderStats::norm);

    py::class_<FbmSample>(m, "FbmSample")
        .def_readonly("path", &FbmSample::path)
        .def_readonly("fallback", &FbmSample::fallback)
        .def_property_readonly("method_used", [](const FbmSample& s) {
            return s.method_used == FbmMethod::circulant ? "circulant" : "cholesky";
        });

    m.def("fbm_covariance", &fbm_covariance, py::arg("s"), py::arg("t"), py::arg("hurst"),
          py::arg("q"));
    m.def(
        "fbm_sample",
        [](double hurst, const Eigen::MatrixXd& q, double horizon, std::size_t steps,
           std::uint64_t seed, const std::string& method, double beta_prime) {
            FbmConfig cfg{hurst, q, horizon, steps, seed, method_from_string(method), beta_prime};
            return fbm_sample(cfg);
        },
        py::arg("hurst"), py::arg("q") = Eigen::MatrixXd::Identity(1, 1), py::arg("horizon") = 1.0,
        py::arg("steps") = 1024, py::arg("seed") = 0, py::arg("method") = "circulant",
        py::arg("beta_prime") = 0.0);

    m.def("wiener_shift", &wiener_shift, py::arg("path"), py::arg("tau"));
    m.def("holder_stats",
          py::overload_cast<const SampledPath&, double, double, double>(&holder_stats),
          py::arg("path"), py::arg("beta"), py::arg("a"), py::arg("b"));
    m.def("holder_seminorm", &holder_seminorm, py::arg("path"), py::arg("beta"), py::arg("a"),
          py::arg("b"));
    m.def("holder_norm", &holder_norm, py::arg("path"), py::arg("beta"), py::arg("a"), py::arg("b"));
    m.def("grr_bound", &grr_bound, py::arg("path"), py::arg("gamma"), py::arg("p"));
    m.def("growth_ratio", &growth_ratio, py::arg("path"));

    py::class_<MatrixPath>(m, "MatrixPath")
        .def_readonly("t0", &MatrixPath::t0)
        .def_readonly("dt", &MatrixPath::dt)
        .def_readwrite("beta", &MatrixPath::beta)
        .def_readonly("values", &MatrixPath::values);
    m.def("as_integrand", &as_integrand, py::arg("path"), py::arg("beta"));

    py::class_<FracOrder>(m, "FracOrder")
        .def(py::init<double>(), py::arg("alpha"))
        .def_readonly("alpha", &FracOrder::alpha);
    m.def("default_alpha", &default_alpha, py::arg("beta"), py::arg("beta_prime"));

    py::class_<YoungResult>(m, "YoungResult")
        .def_readonly("value", &YoungResult::value)
        .def_readonly("extrapolated", &YoungResult::extrapolated)
        .def_readonly("sequence", &YoungResult::sequence)
        .def_readonly("last_delta", &YoungResult::last_delta)
        .def_readonly("converged", &YoungResult::converged);

    m.def("young_integral_rs", &young_integral_rs, py::arg("g"), py::arg("omega"), py::arg("s"),
          py::arg("t"));
    m.def("young_integral_fracrep", &young_integral_fracrep, py::arg("g"), py::arg("omega"),
          py::arg("s"), py::arg("t"), py::arg("alpha"));
    m.def("frac_derivative_plus", &frac_derivative_plus, py::arg("g"), py::arg("s"),
          py::arg("alpha"), py::arg("r"));
    m.def("frac_derivative_minus", &frac_derivative_minus, py::arg("omega"), py::arg("t"),
          py::arg("alpha"), py::arg("r"));
    m.def("young_bound", &young_bound, py::arg("g"), py::arg("omega"), py::arg("s"), py::arg("t"),
          py::arg("alpha"));
    m.def("young_bound_constant", &young_bound_constant, py::arg("alpha"), py::arg("beta"),
          py::arg("beta_prime"));

    m.def("spectral_abscissa", &spectral_abscissa, py::arg("a"));
    m.def("spectral_norm", &spectral_norm, py::arg("a"));
    m.def("matrix_exp", &matrix_exp, py::arg("a"), py::arg("t"));

    py::class_<SemigroupBound>(m, "SemigroupBound")
        .def_readonly("m_const", &SemigroupBound::m_const)
        .def_readonly("lambda_", &SemigroupBound::lambda);
    m.def(
        "estimate_M",
        [](const Eigen::MatrixXd& a, double lambda, int grid_points) {
            return estimate_M(StableMatrix(a, lambda), grid_points);
        },
        py::arg("a"), py::arg("lambda_"), py::arg("grid_points") = 100);
    py::class_<SemigroupCheckReport>(m, "SemigroupCheckReport")
        .def_readonly("slack_difference", &SemigroupCheckReport::slack_difference)
        .def_readonly("slack_seminorm", &SemigroupCheckReport::slack_seminorm)
        .def_readonly("slack_increment", &SemigroupCheckReport::slack_increment)
        .def("min_slack", &SemigroupCheckReport::min_slack);
    m.def(
        "semigroup_increment_check",
        [](const Eigen::MatrixXd& a, double lambda, double beta, int grid) {
            const StableMatrix stable(a, lambda);
            return semigroup_increment_check(stable, estimate_M(stable), beta, grid);
        },
        py::arg("a"), py::arg("lambda_"), py::arg("beta"), py::arg("grid_size") = 16);

    // fields and localization
    py::class_<CatalogSpec>(m, "CatalogSpec")
        .def(py::init<>())
        .def_readwrite("name", &CatalogSpec::name)
        .def_readwrite("a", &CatalogSpec::a)
        .def_readwrite("gamma", &CatalogSpec::gamma)
        .def_readwrite("cf", &CatalogSpec::cf)
        .def_readwrite("cg", &CatalogSpec::cg)
        .def_readwrite("dim_m", &CatalogSpec::dim_m)
        .def_readwrite("lambda_", &CatalogSpec::lambda)
        .def_readwrite("mu", &CatalogSpec::mu)
        .def_readwrite("noise", &CatalogSpec::noise)
        .def_readwrite("rho", &CatalogSpec::rho);

    py::class_<FieldPair>(m, "FieldPair")
        .def_readonly("dim_d", &FieldPair::dim_d)
        .def_readonly("dim_m", &FieldPair::dim_m)
        .def_readonly("rho", &FieldPair::rho)
        .def_readonly("zero_at_origin", &FieldPair::zero_at_origin)
        .def_readonly("flat_diffusion_at_origin", &FieldPair::flat_diffusion_at_origin)
        .def("f", [](const FieldPair& p, const Eigen::VectorXd& x) { return p.f(x); })
        .def("g", [](const FieldPair& p, const Eigen::VectorXd& x) { return p.g(x); })
        .def("dg_norm", &FieldPair::dg_norm);
    m.def("make_catalog_field", &make_catalog_field, py::arg("spec"));

    py::class_<Linearization>(m, "Linearization")
        .def_readonly("a", &Linearization::a)
        .def("f_hat", [](const Linearization& l, const Eigen::VectorXd& x) { return l.f_hat(x); });
    m.def("split_linearization", &split_linearization, py::arg("pair"));

    py::class_<CutoffKit>(m, "CutoffKit")
        .def(py::init<>())
        .def_property_readonly("l_dchi", &CutoffKit::l_dchi)
        .def_property_readonly("l_d2chi", &CutoffKit::l_d2chi)
        .def("apply", &CutoffKit::apply, py::arg("u"), py::arg("r_hat"));

    py::class_<HoelderBoundMap>(m, "HoelderBoundMap")
        .def(py::init<const Linearization&, const FieldPair&, std::size_t, std::size_t,
                      std::size_t>(),
             py::arg("lin"), py::arg("pair"), py::arg("ball_points") = 4096,
             py::arg("shell_directions") = 32, py::arg("radius_cells") = 1024)
        .def("__call__", &HoelderBoundMap::operator())
        .def_property_readonly("rho", &HoelderBoundMap::rho);
    m.def("inverse_j", &inverse_j, py::arg("h"), py::arg("x"), py::arg("rho"));
    m.def("r_of_omega", &r_of_omega, py::arg("eps_hat"), py::arg("k_const"), py::arg("omega"));
    m.def("rhat_of_omega", &rhat_of_omega, py::arg("bound"), py::arg("eps_hat"),
          py::arg("k_const"), py::arg("omega"));
    m.def("k_constant", &k_constant, py::arg("m_const"), py::arg("a_norm"), py::arg("l_dchi"),
          py::arg("c_ybb"));
    m.def(
        "temperedness_diagnostic",
        [](const std::vector<double>& values) {
            const TemperednessEstimate est = temperedness_diagnostic(values);
            return py::make_tuple(est.tail, est.last_quartile_max);
        },
        py::arg("values"));

    // solvers
    py::enum_<Scheme>(m, "Scheme").value("euler", Scheme::euler).value("mild", Scheme::mild);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("t0", &Trajectory::t0)
        .def_readonly("dt", &Trajectory::dt)
        .def_readonly("values", &Trajectory::values)
        .def_readonly("blew_up", &Trajectory::blew_up)
        .def_readonly("per_unit_norms", &Trajectory::per_unit_norms)
        .def_readonly("per_unit_sup", &Trajectory::per_unit_sup);

    m.def(
        "solve_euler",
        [](const FieldPair& pair, const SampledPath& omega, const Eigen::VectorXd& u0,
           double horizon, double beta) {
            YoungProblem p{pair, omega, u0, horizon, beta};
            return solve_euler(p);
        },
        py::arg("pair"), py::arg("omega"), py::arg("u0"), py::arg("horizon"), py::arg("beta"));
    m.def(
        "solve_mild",
        [](const Linearization& lin, const FieldPair& pair, const SampledPath& omega,
           const Eigen::VectorXd& u0, double horizon, double beta) {
            YoungProblem p{pair, omega, u0, horizon, beta};
            return solve_mild(lin, p);
        },
        py::arg("lin"), py::arg("pair"), py::arg("omega"), py::arg("u0"), py::arg("horizon"),
        py::arg("beta"));
    m.def(
        "wong_zakai_check",
        [](const FieldPair& pair, const SampledPath& omega, const Eigen::VectorXd& u0,
           double horizon, double beta, int levels) {
            YoungProblem p{pair, omega, u0, horizon, beta};
            const WongZakaiReport rep = wong_zakai_check(p, levels);
            return py::make_tuple(rep.strides, rep.sup_distance, rep.tail_nonincreasing);
        },
        py::arg("pair"), py::arg("omega"), py::arg("u0"), py::arg("horizon"), py::arg("beta"),
        py::arg("levels"));

    m.def(
        "doss_solve",
        [](double lambda, double gamma, double mu, const std::function<double(double)>& f_hat,
           const SampledPath& omega, double u0) {
            DossProblem p{lambda, gamma, mu, f_hat, omega, u0};
            return doss_solve(p);
        },
        py::arg("lambda_"), py::arg("gamma"), py::arg("mu") = 0.0,
        py::arg("f_hat") = nullptr, py::arg("omega"), py::arg("u0") = 1.0);
    m.def(
        "doss_bound_check",
        [](const Trajectory& traj, double lambda, double gamma, double mu,
           const std::function<double(double)>& f_hat, const SampledPath& omega, double u0) {
            DossProblem p{lambda, gamma, mu, f_hat, omega, u0};
            const DossSlackReport rep = doss_bound_check(traj, p);
            return py::make_tuple(rep.min_slack, rep.ok);
        },
        py::arg("traj"), py::arg("lambda_"), py::arg("gamma"), py::arg("mu") = 0.0,
        py::arg("f_hat") = nullptr, py::arg("omega"), py::arg("u0") = 1.0);

    // stability iteration
    m.def("eps_hat_max", &eps_hat_max, py::arg("lambda_"), py::arg("eps"));
    py::class_<StabilityParams>(m, "StabilityParams")
        .def(py::init<double, double, double, double, double, double, int, Eigen::VectorXd>(),
             py::arg("lambda_"), py::arg("eps"), py::arg("eps_hat"), py::arg("beta"),
             py::arg("beta_prime"), py::arg("alpha"), py::arg("n_intervals"), py::arg("u0"))
        .def_readonly("lambda_", &StabilityParams::lambda)
        .def_readonly("eps", &StabilityParams::eps)
        .def_readonly("eps_hat", &StabilityParams::eps_hat)
        .def("theorem_rate", &StabilityParams::theorem_rate);

    m.def(
        "gronwall_check",
        [](const std::vector<double>& v, double zeta0, double k, double lambda, double eps,
           double eps_hat) {
            const GronwallVerdict verdict = gronwall_check(v, zeta0, k, lambda, eps, eps_hat);
            return py::make_tuple(verdict.hypothesis_ok, verdict.conclusion_ok,
                                  verdict.conclusion_min_slack);
        },
        py::arg("v"), py::arg("zeta0"), py::arg("k"), py::arg("lambda_"), py::arg("eps"),
        py::arg("eps_hat"));
    m.def(
        "comparison_check",
        [](const std::vector<double>& r, const std::vector<double>& v, double c_eps, double eps,
           double mu) {
            const ComparisonVerdict verdict = comparison_check(r, v, c_eps, eps, mu);
            return py::make_tuple(verdict.holds, verdict.threshold);
        },
        py::arg("r"), py::arg("v"), py::arg("c_eps"), py::arg("eps"), py::arg("mu"));

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("norms", &StabilityReport::norms)
        .def_readonly("rhat_seq", &StabilityReport::rhat_seq)
        .def_readonly("r_seq", &StabilityReport::r_seq)
        .def_readonly("cutoff_active", &StabilityReport::cutoff_active)
        .def_readonly("fitted_rate", &StabilityReport::fitted_rate)
        .def_readonly("theorem_rate", &StabilityReport::theorem_rate)
        .def_readonly("m_used", &StabilityReport::m_used)
        .def_readonly("k_used", &StabilityReport::k_used)
        .def_readonly("big_k", &StabilityReport::big_k)
        .def_readonly("escaped", &StabilityReport::escaped)
        .def_readonly("chained", &StabilityReport::chained);

    m.def(
        "iterate_unit_intervals",
        [](const Linearization& lin, const FieldPair& pair, const CutoffKit& kit,
           const StabilityParams& params, const SampledPath& omega, const HoelderBoundMap& bound) {
            return iterate_unit_intervals(lin, pair, kit, params, omega, bound);
        },
        py::arg("lin"), py::arg("pair"), py::arg("kit"), py::arg("params"), py::arg("omega"),
        py::arg("bound"));
    m.def("admissible_neighborhood", &admissible_neighborhood, py::arg("lin"), py::arg("pair"),
          py::arg("kit"), py::arg("params"), py::arg("omega"), py::arg("bound"));
    m.def(
        "uncut_consistency",
        [](const Linearization& lin, const FieldPair& pair, const StabilityParams& params,
           const SampledPath& omega, const StabilityReport& report) {
            const UncutCheck check = uncut_consistency(lin, pair, params, omega, report);
            return py::make_tuple(check.consistent, check.crosscheck_sup_distance);
        },
        py::arg("lin"), py::arg("pair"), py::arg("params"), py::arg("omega"), py::arg("report"));
}
