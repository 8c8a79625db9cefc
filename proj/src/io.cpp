#include "hoelderflow/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vendor_json.hpp"

namespace hoelderflow {

namespace {

void write_atomic(const std::string& file, const std::string& contents) {
    const std::string tmp = file + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << contents;
    }
    if (std::rename(tmp.c_str(), file.c_str()) != 0)
        throw std::runtime_error("cannot move " + tmp + " into place");
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_path_csv(const SampledPath& path, const std::string& file) {
    std::ostringstream out;
    out << "t";
    for (Eigen::Index c = 0; c < path.dim(); ++c) out << ",x" << (c + 1);
    out << "\n";
    for (std::size_t i = 0; i <= path.steps(); ++i) {
        out << format_double(path.time(i));
        for (Eigen::Index c = 0; c < path.dim(); ++c)
            out << "," << format_double(path.values(static_cast<Eigen::Index>(i), c));
        out << "\n";
    }
    write_atomic(file, out.str());
}

SampledPath read_path_csv(const std::string& file, double beta_prime) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(file + ": empty file");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw std::runtime_error(file + ": need at least two samples");

    SampledPath path;
    path.t0 = rows.front().front();
    path.dt = rows[1][0] - rows[0][0];
    path.beta_prime = beta_prime;
    const auto m = static_cast<Eigen::Index>(rows.front().size() - 1);
    path.values.resize(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (Eigen::Index c = 0; c < m; ++c)
            path.values(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c) + 1];
    path.validate();
    return path;
}

void write_fbm_metadata(const FbmConfig& config, const FbmSample& sample, const std::string& file) {
    nlohmann::json meta;
    meta["hurst"] = config.hurst;
    meta["horizon"] = config.horizon;
    meta["steps"] = config.steps;
    meta["seed"] = config.seed;
    meta["dt"] = sample.path.dt;
    meta["beta_prime"] = sample.path.beta_prime;
    meta["method_requested"] = config.method == FbmMethod::circulant ? "circulant" : "cholesky";
    meta["method_used"] = sample.method_used == FbmMethod::circulant ? "circulant" : "cholesky";
    meta["fallback"] = sample.fallback;
    std::vector<std::vector<double>> q;
    for (Eigen::Index i = 0; i < config.q_matrix.rows(); ++i) {
        std::vector<double> row;
        for (Eigen::Index j = 0; j < config.q_matrix.cols(); ++j) row.push_back(config.q_matrix(i, j));
        q.push_back(std::move(row));
    }
    meta["q_matrix"] = q;
    write_atomic(file, meta.dump(2) + "\n");
}

void write_trajectory_csv(const Trajectory& traj, const std::string& file) {
    std::ostringstream out;
    out << "t";
    for (Eigen::Index c = 0; c < traj.values.cols(); ++c) out << ",u" << (c + 1);
    out << "\n";
    for (std::size_t i = 0; i <= traj.steps(); ++i) {
        out << format_double(traj.time(i));
        for (Eigen::Index c = 0; c < traj.values.cols(); ++c)
            out << "," << format_double(traj.values(static_cast<Eigen::Index>(i), c));
        out << "\n";
    }
    write_atomic(file, out.str());
}

void write_unit_norms_csv(const Trajectory& traj, const std::string& file) {
    std::ostringstream out;
    out << "n,holder_norm,sup_norm\n";
    for (std::size_t n = 0; n < traj.per_unit_norms.size(); ++n)
        out << n << "," << format_double(traj.per_unit_norms[n]) << ","
            << format_double(traj.per_unit_sup[n]) << "\n";
    write_atomic(file, out.str());
}

void write_stability_json(const StabilityReport& report, const std::string& file) {
    nlohmann::json j;
    j["norms"] = report.norms;
    j["rhat_seq"] = report.rhat_seq;
    j["r_seq"] = report.r_seq;
    std::vector<bool> flags(report.cutoff_active.begin(), report.cutoff_active.end());
    j["cutoff_active"] = flags;
    j["fitted_rate"] = report.fitted_rate;
    j["fitted_residual"] = report.fitted_residual;
    j["theorem_rate"] = report.theorem_rate;
    j["m_used"] = report.m_used;
    j["k_used"] = report.k_used;
    j["big_k"] = report.big_k;
    j["escaped"] = report.escaped;
    j["escape_index"] = report.escape_index;
    j["blew_up"] = report.blew_up;
    j["intervals_run"] = report.intervals_run;
    write_atomic(file, j.dump(2) + "\n");
}

void write_stability_csv(const StabilityReport& report, const std::string& file) {
    std::ostringstream out;
    out << "n,norm,rhat,cutoff_active\n";
    for (std::size_t n = 0; n < report.norms.size(); ++n)
        out << n << "," << format_double(report.norms[n]) << "," << format_double(report.rhat_seq[n])
            << "," << (report.cutoff_active[n] ? 1 : 0) << "\n";
    write_atomic(file, out.str());
}

std::uint64_t bytes_checksum(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::uint64_t file_checksum(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return bytes_checksum(ss.str());
}

}  // namespace hoelderflow
