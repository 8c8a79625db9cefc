#pragma once

#include <cstdint>
#include <string>

#include "hoelderflow/fbm.hpp"
#include "hoelderflow/path.hpp"
#include "hoelderflow/solver.hpp"
#include "hoelderflow/stability.hpp"

namespace hoelderflow {

// Doubles are rendered with %.17g so that re-reading is exact and repeated
// runs are byte-identical.
std::string format_double(double x);

/// CSV with header `t,x1,...,xm`.
void write_path_csv(const SampledPath& path, const std::string& file);
SampledPath read_path_csv(const std::string& file, double beta_prime);

/// JSON sidecar with H, Q, seed, method, dt and the fallback flag.
void write_fbm_metadata(const FbmConfig& config, const FbmSample& sample, const std::string& file);

/// CSV with header `t,u1,...,ud`.
void write_trajectory_csv(const Trajectory& traj, const std::string& file);

/// CSV with header `n,holder_norm,sup_norm`.
void write_unit_norms_csv(const Trajectory& traj, const std::string& file);

/// StabilityReport as JSON with all sequences.
void write_stability_json(const StabilityReport& report, const std::string& file);

/// CSV with header `n,norm,rhat,cutoff_active`.
void write_stability_csv(const StabilityReport& report, const std::string& file);

/// FNV-1a 64-bit checksum of a file's bytes.
std::uint64_t file_checksum(const std::string& file);
std::uint64_t bytes_checksum(const std::string& bytes);

}  // namespace hoelderflow
