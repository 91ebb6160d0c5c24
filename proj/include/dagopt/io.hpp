#pragma once

#include <filesystem>
#include <string>

#include "dagopt/objective.hpp"
#include "dagopt/solvers.hpp"
#include "dagopt/types.hpp"

namespace dagopt {

// All writers go through an atomic temp-file-then-rename, and all floating
// point is printed with %.17g so values round-trip exactly.

std::string format_double(double value);

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

// Matrix files: plain CSV, no header, one row per node, row i = outgoing
// weights of node i.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Adjacency& m);
Matrix read_matrix_csv(const std::filesystem::path& path);
Adjacency read_adjacency_csv(const std::filesystem::path& path);

// Dataset files: <base>.csv with a X1..Xd header row and n data rows, plus
// <base>.meta.json holding seed, noise_std and (when known) the ground
// truth adjacency and true weights as nested arrays.
void write_dataset(const std::filesystem::path& base, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& base);

// Trace CSV, one row per outer iteration, exact header
// k,rho,alpha,h,f,l1,inner_iters,inner_status,grad_norm,cycles_005,seconds.
// Timings are serialized as 0 unless include_timings is set, so artifacts
// are reproducible byte-for-byte from the seed.
std::string trace_to_csv(const Trace& trace, bool include_timings = false);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace,
                     bool include_timings = false);
Trace read_trace_csv(const std::filesystem::path& path);

// Run summary JSON for a single fit.
void write_solve_summary(const std::filesystem::path& path,
                         const SolveResult& result, const SolverConfig& cfg,
                         bool include_timings = false);

// Solver configuration as a flat key = value text file; keys mirror the
// SolverConfig field names. Unknown keys and unparsable values raise
// ConfigError naming the field.
SolverConfig parse_solver_config_text(const std::string& text);
SolverConfig read_solver_config(const std::filesystem::path& path);
std::string solver_config_to_text(const SolverConfig& cfg);

// Name parsers shared by the config format and the CLI flags. "bin" with no
// scaling yields the c-unset placeholder resolved to 1/d at fit time.
SolverKind parse_solver_kind(const std::string& name);
OptimizerKind parse_optimizer_kind(const std::string& name);
ConstraintKind parse_constraint_name(const std::string& name);

}  // namespace dagopt
