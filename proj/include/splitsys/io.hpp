#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "splitsys/harness.hpp"
#include "splitsys/instance.hpp"
#include "splitsys/solver.hpp"

namespace splitsys {

std::string instance_to_json(const ProblemInstance& instance);

/// allow_unchecked skips the monotonicity check on affine maps and the
/// instance validation pass, so deliberately broken operators can be loaded
/// for the verification tooling to expose.
ProblemInstance instance_from_json(const std::string& text, bool allow_unchecked = false);

void save_instance(const ProblemInstance& instance, const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path, bool allow_unchecked = false);

/// Header: k,residual,dist_to_star,beta,linesearch_total,time_ms. The
/// time_ms column is volatile; everything else is reproducible bit for bit.
void write_trace_csv(const SolveTrace& trace, std::ostream& out);
void save_trace_csv(const SolveTrace& trace, const std::filesystem::path& path);

/// Volatile values (wall time) live under the "volatile" key only.
std::string metrics_to_json(const Metrics& metrics, const std::string& instance_name,
                            const AlgoParams& params);
void save_metrics(const Metrics& metrics, const std::string& instance_name,
                  const AlgoParams& params, const std::filesystem::path& path);

/// Short stable digest of the parameter set, used to key benchmark rows.
std::string params_fingerprint(const AlgoParams& params);

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string format_double(double value);

}  // namespace splitsys
