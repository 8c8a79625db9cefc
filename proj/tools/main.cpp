#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "hoelderflow/errors.hpp"
#include "hoelderflow/fbm.hpp"
#include "hoelderflow/fraccalc.hpp"
#include "hoelderflow/io.hpp"
#include "hoelderflow/solver.hpp"
#include "hoelderflow/stability.hpp"
#include "hoelderflow/version.hpp"
#include "../src/vendor_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hoelderflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct RunContext {
    json config;
    fs::path output_dir;
    std::vector<std::uint64_t> seeds;
    int replicas = 1;
    int jobs = 1;
    std::vector<std::pair<std::string, std::uint64_t>> artifacts;  // file, checksum
    std::mutex artifacts_mutex;

    void record(const fs::path& file) {
        const std::uint64_t sum = file_checksum(file.string());
        std::lock_guard<std::mutex> lock(artifacts_mutex);
        artifacts.emplace_back(fs::relative(file, output_dir).string(), sum);
    }
};

[[noreturn]] void config_fail(const std::string& message) {
    std::cerr << "config error: " << message << "\n";
    std::exit(kExitConfig);
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_fail("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        config_fail(std::string("config parse failure: ") + e.what());
    }
}

const json& payload(const json& config, const std::string& subcommand) {
    if (!config.contains(subcommand))
        config_fail("config is missing the '" + subcommand + "' payload");
    return config.at(subcommand);
}

double need_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        config_fail("missing or non-numeric key '" + key + "'");
    return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::string string_or(const json& j, const std::string& key, const std::string& fallback) {
    return j.contains(key) ? j.at(key).get<std::string>() : fallback;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& key) {
    if (!j.contains(key)) config_fail("missing matrix key '" + key + "'");
    const json& m = j.at(key);
    if (m.is_number()) return Eigen::MatrixXd::Constant(1, 1, m.get<double>());
    if (!m.is_array() || m.empty()) config_fail("matrix key '" + key + "' must be an array");
    const auto rows = static_cast<Eigen::Index>(m.size());
    const auto cols = static_cast<Eigen::Index>(m.at(0).size());
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(m.at(i).size()) != cols)
            config_fail("matrix key '" + key + "' is ragged");
        for (Eigen::Index c = 0; c < cols; ++c) out(i, c) = m.at(i).at(c).get<double>();
    }
    return out;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& key) {
    if (!j.contains(key)) config_fail("missing vector key '" + key + "'");
    const json& v = j.at(key);
    if (v.is_number()) return Eigen::VectorXd::Constant(1, v.get<double>());
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = v.at(i).get<double>();
    return out;
}

FbmConfig parse_fbm(const json& j, std::uint64_t seed) {
    FbmConfig cfg;
    cfg.hurst = need_number(j, "hurst");
    cfg.q_matrix = j.contains("q_matrix") ? parse_matrix(j, "q_matrix")
                                          : Eigen::MatrixXd::Identity(1, 1);
    cfg.horizon = need_number(j, "horizon");
    cfg.steps = static_cast<std::size_t>(need_number(j, "steps"));
    cfg.seed = seed;
    cfg.beta_prime = number_or(j, "beta_prime", 0.0);
    const std::string method = string_or(j, "method", "circulant");
    if (method == "circulant")
        cfg.method = FbmMethod::circulant;
    else if (method == "cholesky")
        cfg.method = FbmMethod::cholesky;
    else
        config_fail("unknown fbm method '" + method + "'");
    return cfg;
}

// Scalar driver catalog for the integrate subcommand.
SampledPath parse_driver(const json& j, std::uint64_t seed) {
    const std::string kind = string_or(j, "kind", "fbm");
    if (kind == "fbm") return fbm_sample(parse_fbm(j, seed)).path;
    if (kind == "csv")
        return read_path_csv(j.at("file").get<std::string>(), number_or(j, "beta_prime", 0.73));

    const double horizon = need_number(j, "horizon");
    const auto steps = static_cast<std::size_t>(need_number(j, "steps"));
    const double beta_prime = number_or(j, "beta_prime", 0.9);
    const double scale = number_or(j, "scale", 1.0);
    const double freq = number_or(j, "freq", 1.0);
    std::function<double(double)> f;
    if (kind == "identity")
        f = [scale](double t) { return scale * t; };
    else if (kind == "square")
        f = [scale](double t) { return scale * t * t; };
    else if (kind == "sqrt")
        f = [scale](double t) { return scale * std::sqrt(t); };
    else if (kind == "sine")
        f = [scale, freq](double t) { return scale * std::sin(freq * t); };
    else
        config_fail("unknown driver kind '" + kind + "'");
    return sample_scalar_path(f, 0.0, horizon, steps, beta_prime);
}

MatrixPath parse_integrand(const json& j, double horizon, std::size_t steps) {
    const std::string kind = string_or(j, "kind", "constant");
    const double beta = number_or(j, "beta", 0.9);
    const double scale = number_or(j, "scale", 1.0);
    const double freq = number_or(j, "freq", 1.0);
    std::function<double(double)> f;
    if (kind == "constant")
        f = [scale](double) { return scale; };
    else if (kind == "identity")
        f = [scale](double t) { return scale * t; };
    else if (kind == "square")
        f = [scale](double t) { return scale * t * t; };
    else if (kind == "cosine")
        f = [scale, freq](double t) { return scale * std::cos(freq * t); };
    else
        config_fail("unknown integrand kind '" + kind + "'");
    return sample_matrix_path(
        [f](double t) { return Eigen::MatrixXd::Constant(1, 1, f(t)); }, 0.0, horizon, steps, beta);
}

CatalogSpec parse_field(const json& j) {
    CatalogSpec spec;
    spec.name = string_or(j, "name", "");
    if (spec.name.empty()) config_fail("field payload needs a 'name'");
    if (spec.name == "linear") {
        spec.a = parse_matrix(j, "a");
        spec.gamma = j.contains("gamma_matrix") ? parse_matrix(j, "gamma_matrix")
                                                : Eigen::MatrixXd::Zero(spec.a.rows(), spec.a.cols());
    } else if (spec.name == "quadratic") {
        spec.a = parse_matrix(j, "a");
        spec.cf = number_or(j, "cf", 1.0);
        spec.cg = number_or(j, "cg", 1.0);
        spec.dim_m = static_cast<Eigen::Index>(number_or(j, "m", 1));
    } else if (spec.name == "sine") {
        spec.lambda = number_or(j, "lambda", 1.0);
        spec.mu = number_or(j, "mu", 0.5);
        spec.noise = number_or(j, "gamma", 0.5);
    } else {
        config_fail("unknown field-catalog name '" + spec.name + "'");
    }
    spec.rho = number_or(j, "rho", 1.0);
    return spec;
}

// Instances run in seed-major order; outputs are per-instance files, so any
// job count yields identical bytes.
void for_each_instance(RunContext& ctx, const std::function<void(std::uint64_t, int)>& body) {
    std::vector<std::pair<std::uint64_t, int>> instances;
    for (std::uint64_t seed : ctx.seeds)
        for (int r = 0; r < ctx.replicas; ++r) instances.emplace_back(seed, r);

    if (ctx.jobs <= 1 || instances.size() <= 1) {
        for (const auto& [seed, replica] : instances) body(seed, replica);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(ctx.jobs, static_cast<int>(instances.size()));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= instances.size()) return;
                try {
                    body(instances[i].first, instances[i].second);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::string instance_tag(std::uint64_t seed, int replica, int replicas) {
    std::string tag = "seed" + std::to_string(seed);
    if (replicas > 1) tag += "_rep" + std::to_string(replica);
    return tag;
}

std::uint64_t instance_seed(std::uint64_t seed, int replica) {
    return seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(replica);
}

// ---- subcommands ------------------------------------------------------------

int run_sample_fbm(RunContext& ctx) {
    const json& p = payload(ctx.config, "sample-fbm");
    for_each_instance(ctx, [&](std::uint64_t seed, int replica) {
        const FbmConfig cfg = parse_fbm(p, instance_seed(seed, replica));
        const FbmSample sample = fbm_sample(cfg);
        const std::string tag = instance_tag(seed, replica, ctx.replicas);
        const fs::path csv = ctx.output_dir / ("fbm_" + tag + ".csv");
        const fs::path meta = ctx.output_dir / ("fbm_" + tag + ".json");
        write_path_csv(sample.path, csv.string());
        write_fbm_metadata(cfg, sample, meta.string());
        ctx.record(csv);
        ctx.record(meta);
    });
    return kExitOk;
}

int run_integrate(RunContext& ctx) {
    const json& p = payload(ctx.config, "integrate");
    for_each_instance(ctx, [&](std::uint64_t seed, int replica) {
        const SampledPath omega = parse_driver(p.at("omega"), instance_seed(seed, replica));
        const MatrixPath g = parse_integrand(p.at("g"), omega.horizon(), omega.steps());
        const double s = number_or(p, "s", 0.0);
        const double t = number_or(p, "t", omega.horizon());
        const FracOrder alpha = p.contains("alpha")
                                    ? FracOrder(p.at("alpha").get<double>())
                                    : default_alpha(g.beta, omega.beta_prime);

        const YoungResult rs = young_integral_rs(g, omega, s, t);
        const Eigen::VectorXd fr = young_integral_fracrep(g, omega, s, t, alpha);
        const double bound = young_bound(g, omega, s, t, alpha);

        json out;
        out["s"] = s;
        out["t"] = t;
        out["alpha"] = alpha.alpha;
        out["rs_value"] = rs.value(0);
        out["rs_extrapolated"] = rs.extrapolated(0);
        out["rs_last_delta"] = rs.last_delta;
        out["rs_converged"] = rs.converged;
        std::vector<double> seq;
        for (const auto& v : rs.sequence) seq.push_back(v(0));
        out["rs_refinement"] = seq;
        std::vector<std::size_t> strides(rs.strides.begin(), rs.strides.end());
        out["rs_strides"] = strides;
        out["fracrep_value"] = fr(0);
        out["bound"] = bound;
        out["bound_dominates"] = bound >= std::abs(fr(0));

        const fs::path file =
            ctx.output_dir / ("integrate_" + instance_tag(seed, replica, ctx.replicas) + ".json");
        std::ostringstream ss;
        ss << out.dump(2) << "\n";
        std::ofstream(file.string() + ".tmp", std::ios::binary) << ss.str();
        fs::rename(file.string() + ".tmp", file);
        ctx.record(file);
    });
    return kExitOk;
}

int run_solve(RunContext& ctx) {
    const json& p = payload(ctx.config, "solve");
    const CatalogSpec spec = parse_field(p.at("field"));
    const FieldPair pair = make_catalog_field(spec);
    std::atomic<bool> blew_up{false};
    for_each_instance(ctx, [&](std::uint64_t seed, int replica) {
        const SampledPath omega = parse_driver(p.at("omega"), instance_seed(seed, replica));
        YoungProblem problem;
        problem.pair = pair;
        problem.omega = omega;
        problem.u0 = parse_vector(p, "u0");
        problem.horizon = number_or(p, "horizon", omega.horizon());
        problem.beta = number_or(p, "beta", omega.beta_prime - 0.03);

        const std::string scheme = string_or(p, "scheme", "euler");
        Trajectory traj;
        if (scheme == "euler") {
            traj = solve_euler(problem);
        } else if (scheme == "mild") {
            traj = solve_mild(split_linearization(pair), problem);
        } else {
            config_fail("unknown scheme '" + scheme + "'");
        }
        if (traj.blew_up) blew_up = true;

        const std::string tag = instance_tag(seed, replica, ctx.replicas);
        const fs::path csv = ctx.output_dir / ("trajectory_" + tag + ".csv");
        const fs::path norms = ctx.output_dir / ("unit_norms_" + tag + ".csv");
        write_trajectory_csv(traj, csv.string());
        write_unit_norms_csv(traj, norms.string());
        ctx.record(csv);
        ctx.record(norms);
    });
    if (blew_up && !p.value("allow_blowup", false)) {
        std::cerr << "numeric failure: a trajectory blew up\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int run_doss(RunContext& ctx) {
    const json& p = payload(ctx.config, "doss");
    std::atomic<bool> blew_up{false};
    for_each_instance(ctx, [&](std::uint64_t seed, int replica) {
        DossProblem problem;
        problem.lambda = need_number(p, "lambda");
        problem.gamma = need_number(p, "gamma");
        problem.mu = number_or(p, "mu", 0.0);
        problem.u0 = number_or(p, "u0", 1.0);
        const std::string remainder = string_or(p, "f_hat", "none");
        if (remainder == "sine") {
            const double mu = problem.mu;
            problem.f_hat = [mu](double x) { return mu * std::sin(x); };
        } else if (remainder != "none") {
            config_fail("unknown doss remainder '" + remainder + "'");
        }
        problem.omega = parse_driver(p.at("omega"), instance_seed(seed, replica));

        const Trajectory traj = doss_solve(problem);
        if (traj.blew_up) blew_up = true;
        const DossSlackReport slack = doss_bound_check(traj, problem);

        const std::string tag = instance_tag(seed, replica, ctx.replicas);
        const fs::path csv = ctx.output_dir / ("doss_" + tag + ".csv");
        write_trajectory_csv(traj, csv.string());
        ctx.record(csv);

        std::ostringstream bound_csv;
        bound_csv << "t,abs_u,bound\n";
        for (std::size_t i = 0; i <= traj.steps(); ++i) {
            const double w_abs = std::abs(problem.omega.values(static_cast<Eigen::Index>(i), 0));
            const double bound = std::exp(problem.gamma * w_abs +
                                          (problem.mu - problem.lambda) * traj.time(i)) *
                                 std::abs(problem.u0);
            bound_csv << format_double(traj.time(i)) << ","
                      << format_double(std::abs(traj.values(static_cast<Eigen::Index>(i), 0))) << ","
                      << format_double(bound) << "\n";
        }
        const fs::path bound_file = ctx.output_dir / ("doss_" + tag + "_bound.csv");
        std::ofstream(bound_file.string() + ".tmp", std::ios::binary) << bound_csv.str();
        fs::rename(bound_file.string() + ".tmp", bound_file);
        ctx.record(bound_file);

        json summary;
        summary["min_slack"] = slack.min_slack;
        summary["tol"] = slack.tol;
        summary["bound_holds"] = slack.ok;
        summary["terminal_log_rate"] =
            std::log(std::abs(traj.values(traj.values.rows() - 1, 0))) / traj.time(traj.steps());
        const fs::path summary_file = ctx.output_dir / ("doss_" + tag + ".json");
        std::ofstream(summary_file.string() + ".tmp", std::ios::binary) << summary.dump(2) << "\n";
        fs::rename(summary_file.string() + ".tmp", summary_file);
        ctx.record(summary_file);
    });
    if (blew_up && !p.value("allow_blowup", false)) {
        std::cerr << "numeric failure: a trajectory blew up\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int run_stability(RunContext& ctx) {
    const json& p = payload(ctx.config, "stability");
    const CatalogSpec spec = parse_field(p.at("field"));
    const FieldPair pair = make_catalog_field(spec);
    const Linearization lin = split_linearization(pair);
    const CutoffKit& kit = shared_cutoff_kit();
    const HoelderBoundMap bound(lin, pair);

    const double lambda = need_number(p, "lambda");
    const double eps = number_or(p, "eps", 0.5 * lambda);
    const double eps_hat = p.contains("eps_hat") && p.at("eps_hat").is_number()
                               ? p.at("eps_hat").get<double>()
                               : eps_hat_max(lambda, eps);
    const double beta = number_or(p, "beta", 0.70);
    const double beta_prime = number_or(p, "beta_prime", 0.73);
    const double alpha = p.contains("alpha") && p.at("alpha").is_number()
                             ? p.at("alpha").get<double>()
                             : default_alpha(beta, beta_prime).alpha;
    const int n_intervals = static_cast<int>(number_or(p, "n_intervals", 30));
    const auto steps_per_unit = static_cast<std::size_t>(number_or(p, "steps_per_unit", 1024));
    const double hurst = number_or(p, "hurst", 0.75);
    const Eigen::VectorXd u0 = parse_vector(p, "u0");
    const bool auto_u0 = string_or(p, "u0_mode", "fixed") == "auto";

    struct Row {
        std::uint64_t seed;
        int replica;
        double fitted, theorem, radius;
        bool escaped;
    };
    std::vector<Row> rows;
    std::mutex rows_mutex;

    for_each_instance(ctx, [&](std::uint64_t seed, int replica) {
        FbmConfig cfg;
        cfg.hurst = hurst;
        cfg.q_matrix = Eigen::MatrixXd::Identity(pair.dim_m, pair.dim_m);
        cfg.horizon = static_cast<double>(n_intervals + 1);
        cfg.steps = static_cast<std::size_t>(n_intervals + 1) * steps_per_unit;
        cfg.seed = instance_seed(seed, replica);
        cfg.beta_prime = beta_prime;
        const SampledPath omega = fbm_sample(cfg).path;

        StabilityParams params(lambda, eps, eps_hat, beta, beta_prime, alpha, n_intervals, u0);
        double radius = u0.norm();
        if (auto_u0) {
            radius = admissible_neighborhood(lin, pair, kit, params, omega, bound);
            Eigen::VectorXd dir = u0.norm() > 0 ? u0.normalized()
                                                : Eigen::VectorXd::Unit(pair.dim_d, 0);
            params = StabilityParams(lambda, eps, eps_hat, beta, beta_prime, alpha, n_intervals,
                                     radius * dir);
        }
        const StabilityReport report =
            iterate_unit_intervals(lin, pair, kit, params, omega, bound);

        const std::string tag = instance_tag(seed, replica, ctx.replicas);
        const fs::path jfile = ctx.output_dir / ("stability_" + tag + ".json");
        const fs::path cfile = ctx.output_dir / ("stability_" + tag + ".csv");
        write_stability_json(report, jfile.string());
        write_stability_csv(report, cfile.string());
        ctx.record(jfile);
        ctx.record(cfile);

        std::lock_guard<std::mutex> lock(rows_mutex);
        rows.push_back({seed, replica, report.fitted_rate, report.theorem_rate, radius,
                        report.escaped});
    });

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.seed != b.seed ? a.seed < b.seed : a.replica < b.replica;
    });
    std::ostringstream agg;
    agg << "seed,replica,fitted_rate,theorem_rate,u0_norm,escaped\n";
    for (const Row& r : rows)
        agg << r.seed << "," << r.replica << "," << format_double(r.fitted) << ","
            << format_double(r.theorem) << "," << format_double(r.radius) << ","
            << (r.escaped ? 1 : 0) << "\n";
    const fs::path agg_file = ctx.output_dir / "stability_aggregate.csv";
    std::ofstream(agg_file.string() + ".tmp", std::ios::binary) << agg.str();
    fs::rename(agg_file.string() + ".tmp", agg_file);
    ctx.record(agg_file);
    return kExitOk;
}

int run_gronwall(RunContext& ctx) {
    const json& p = payload(ctx.config, "gronwall");
    std::vector<double> v;
    if (p.contains("sequence")) {
        for (const auto& x : p.at("sequence")) v.push_back(x.get<double>());
    } else if (p.contains("sequence_file")) {
        std::ifstream in(p.at("sequence_file").get<std::string>());
        if (!in) config_fail("cannot open sequence file");
        double x;
        while (in >> x) v.push_back(x);
    } else {
        config_fail("gronwall payload needs 'sequence' or 'sequence_file'");
    }
    const GronwallVerdict verdict =
        gronwall_check(v, need_number(p, "zeta0"), need_number(p, "k"), need_number(p, "lambda"),
                       need_number(p, "eps"), need_number(p, "eps_hat"));
    json out;
    out["hypothesis_ok"] = verdict.hypothesis_ok;
    out["conclusion_ok"] = verdict.conclusion_ok;
    out["hypothesis_violations"] = verdict.hypothesis_violations;
    out["conclusion_violations"] = verdict.conclusion_violations;
    out["conclusion_min_slack"] = verdict.conclusion_min_slack;
    const fs::path file = ctx.output_dir / "gronwall_verdict.json";
    std::ofstream(file.string() + ".tmp", std::ios::binary) << out.dump(2) << "\n";
    fs::rename(file.string() + ".tmp", file);
    ctx.record(file);
    return kExitOk;
}

int run_report(RunContext& ctx) {
    const json& p = payload(ctx.config, "report");
    if (!p.contains("inputs") || p.at("inputs").empty()) {
        std::cerr << "warning: no report inputs given\n";
        return kExitOk;
    }
    bool wrote_any = false;
    for (const auto& entry : p.at("inputs")) {
        const std::string input = entry.get<std::string>();
        if (!fs::exists(input)) {
            std::cerr << "warning: missing input " << input << ", skipped\n";
            continue;
        }
        const fs::path stem = fs::path(input).stem();
        if (input.size() >= 5 && input.substr(input.size() - 5) == ".json" &&
            stem.string().rfind("stability_", 0) == 0) {
            std::ifstream in(input);
            json rep = json::parse(in);
            const std::vector<double> norms = rep.at("norms").get<std::vector<double>>();
            const double rate = rep.at("theorem_rate").get<double>();
            std::ostringstream dat;
            dat << "# n  log_norm  theorem_reference\n";
            double anchor = 0.0;
            for (double n : norms)
                if (n > 0) {
                    anchor = std::log(n);
                    break;
                }
            for (std::size_t n = 0; n < norms.size(); ++n) {
                const double log_norm = norms[n] > 0 ? std::log(norms[n]) : -745.0;
                dat << n << "  " << format_double(log_norm) << "  "
                    << format_double(anchor - rate * static_cast<double>(n)) << "\n";
            }
            const fs::path out = ctx.output_dir / (stem.string() + "_plot.dat");
            std::ofstream(out.string() + ".tmp", std::ios::binary) << dat.str();
            fs::rename(out.string() + ".tmp", out);
            ctx.record(out);
            wrote_any = true;
        } else if (stem.string().rfind("doss_", 0) == 0) {
            // doss bound CSV -> whitespace columns t |u| bound
            std::ifstream in(input);
            std::string line;
            std::getline(in, line);
            std::ostringstream dat;
            dat << "# t  abs_u  bound\n";
            while (std::getline(in, line)) {
                for (char& c : line)
                    if (c == ',') c = ' ';
                dat << line << "\n";
            }
            const fs::path out = ctx.output_dir / (stem.string() + "_plot.dat");
            std::ofstream(out.string() + ".tmp", std::ios::binary) << dat.str();
            fs::rename(out.string() + ".tmp", out);
            ctx.record(out);
            wrote_any = true;
        } else {
            std::cerr << "warning: unrecognized report input " << input << ", skipped\n";
        }
    }
    if (wrote_any) {
        const fs::path gp = ctx.output_dir / "plot.gp";
        std::ostringstream stub;
        stub << "# gnuplot stub; point it at one of the *_plot.dat files\n"
             << "# stability: plot 'stability_seed1_plot.dat' u 1:2 w lp t 'log norm', \\\n"
             << "#            ''                             u 1:3 w l t 'theorem rate'\n"
             << "# doss:      set logscale y; plot 'doss_seed1_bound_plot.dat' u 1:2 w l t '|u|', \\\n"
             << "#            ''                                              u 1:3 w l t 'bound'\n";
        std::ofstream(gp.string() + ".tmp", std::ios::binary) << stub.str();
        fs::rename(gp.string() + ".tmp", gp);
        ctx.record(gp);
    }
    return kExitOk;
}

void write_manifest(RunContext& ctx, const std::string& subcommand) {
    json manifest;
    manifest["version"] = kVersion;
    manifest["subcommand"] = subcommand;
    manifest["config_checksum"] = bytes_checksum(ctx.config.dump());
    manifest["generated_unix_time"] = static_cast<long long>(std::time(nullptr));
    std::sort(ctx.artifacts.begin(), ctx.artifacts.end());
    json files = json::object();
    for (const auto& [file, sum] : ctx.artifacts) files[file] = sum;
    manifest["files"] = files;
    std::ofstream out(ctx.output_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hoelderflow: pathwise stability experiments for Young differential equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir_flag;
    std::string seeds_flag;
    int jobs_flag = 0;

    const std::vector<std::string> names = {"sample-fbm", "integrate", "solve", "doss",
                                            "stability",  "gronwall",  "report"};
    for (const std::string& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment configuration")->required();
        sub->add_option("--output-dir", output_dir_flag, "override the config output_dir");
        sub->add_option("--seeds", seeds_flag, "comma-separated seed override");
        sub->add_option("--jobs", jobs_flag, "parallel instances (HOELDERFLOW_JOBS overrides)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string subcommand = app.get_subcommands().front()->get_name();

    try {
        RunContext ctx;
        ctx.config = load_config(config_path);

        std::string out_dir = output_dir_flag;
        if (out_dir.empty()) out_dir = ctx.config.value("output_dir", "out");
        ctx.output_dir = out_dir;
        fs::create_directories(ctx.output_dir);

        if (!seeds_flag.empty()) {
            std::stringstream ss(seeds_flag);
            std::string item;
            while (std::getline(ss, item, ',')) ctx.seeds.push_back(std::stoull(item));
        } else if (ctx.config.contains("seeds")) {
            for (const auto& s : ctx.config.at("seeds"))
                ctx.seeds.push_back(s.get<std::uint64_t>());
        }
        const bool stochastic = subcommand == "sample-fbm" || subcommand == "stability" ||
                                subcommand == "solve" || subcommand == "doss" ||
                                subcommand == "integrate";
        if (ctx.seeds.empty()) {
            if (stochastic) config_fail("stochastic subcommands need a non-empty 'seeds' list");
            ctx.seeds.push_back(0);
        }
        ctx.replicas = static_cast<int>(ctx.config.value("replicas", 1));
        if (ctx.replicas < 1) config_fail("replicas must be at least 1");

        ctx.jobs = jobs_flag > 0 ? jobs_flag : 1;
        if (const char* env = std::getenv("HOELDERFLOW_JOBS")) ctx.jobs = std::atoi(env);
        if (ctx.jobs < 1) ctx.jobs = 1;

        int status = kExitOk;
        if (subcommand == "sample-fbm")
            status = run_sample_fbm(ctx);
        else if (subcommand == "integrate")
            status = run_integrate(ctx);
        else if (subcommand == "solve")
            status = run_solve(ctx);
        else if (subcommand == "doss")
            status = run_doss(ctx);
        else if (subcommand == "stability")
            status = run_stability(ctx);
        else if (subcommand == "gronwall")
            status = run_gronwall(ctx);
        else if (subcommand == "report")
            status = run_report(ctx);

        write_manifest(ctx, subcommand);
        return status;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RegularityError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}
