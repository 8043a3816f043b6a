#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgs/error.hpp"

namespace qgs::cli {

enum class Command { Discriminant, Dirichlet, Bands, DiscreteSpec, Spectrum, Lattice, Validate };
enum class Format { Csv, Json };

std::string_view to_string(Command c);
std::optional<Command> command_from(std::string_view name);

struct RunConfig {
  Command command = Command::Spectrum;
  std::string input;
  double zmax = 100.0;
  std::optional<double> zmin;   // discriminant sweep start, default min(U) - 1
  int samples = 1001;           // discriminant sweep size
  std::optional<double> alpha;  // overrides the file
  std::optional<int> n;         // lattice dimension
  std::optional<int> N;         // oracle elements per edge, default 500
  double tol = 1e-2;            // validate matching tolerance (relative)
  Format format = Format::Json;
  std::string out;              // empty: stdout
};

enum ExitCode : int { Ok = 0, ValidationMismatch = 1, InputError = 2, NumericalError = 3 };

/// NumericalError for solver and resolution failures, InputError otherwise.
int exit_code_for(const Error& e);

/// Parses argv into a config. On --help, or on a usage error, prints to
/// `out`/`err` and returns the exit code instead.
struct ParsedArgs {
  std::optional<RunConfig> config;
  int exit_code = Ok;
};
ParsedArgs parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs one command. Output goes to config.out or to `out`; diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qgs::cli
