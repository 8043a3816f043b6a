#include "qgs/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qgs/error.hpp"
#include "qgs/graph.hpp"
#include "qgs/hill.hpp"
#include "qgs/oracle.hpp"
#include "qgs/report_io.hpp"
#include "qgs/spectrum.hpp"

namespace qgs::cli {

namespace {

constexpr int kDefaultElements = 500;

enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level() {
  const char* env = std::getenv("QGS_LOG");
  if (env == nullptr) return LogLevel::Info;
  const std::string_view v(env);
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err), level_(log_level()) {}

  void info(const std::string& msg) const {
    if (level_ != LogLevel::Quiet) err_ << "[info] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ == LogLevel::Debug) err_ << "[debug] " << msg << '\n';
  }
  void error(const std::string& msg) const { err_ << "error: " << msg << '\n'; }

 private:
  std::ostream& err_;
  LogLevel level_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "input: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GraphSpec load_graph(const RunConfig& c) {
  GraphSpec g = build_graph(read_file(c.input));
  return c.alpha ? g.with_alpha(*c.alpha) : g;
}

EdgeModel load_edge_model(const RunConfig& c) {
  EdgeModel m = parse_edge_model(read_file(c.input));
  if (c.alpha) m.alpha = *c.alpha;
  return m;
}

std::string discriminant_output(const RunConfig& c, const Log& log) {
  const EdgeModel m = load_edge_model(c);
  const double zmin = c.zmin.value_or(m.potential.min() - 1.0);
  if (!(c.zmax > zmin)) throw Error(ErrorCode::InvalidArgument, "--zmax must exceed --zmin");
  if (c.samples < 2) throw Error(ErrorCode::InvalidArgument, "--samples must be at least 2");
  std::vector<double> z(static_cast<std::size_t>(c.samples));
  std::vector<double> eta(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = zmin + (c.zmax - zmin) * static_cast<double>(i) / static_cast<double>(z.size() - 1);
    eta[i] = discriminant(m.potential, m.alpha, z[i]);
  }
  log.info("discriminant: " + std::to_string(z.size()) + " samples on [" + format_number(zmin) + ", " +
           format_number(c.zmax) + "]");
  return c.format == Format::Csv ? sweep_to_csv(z, eta) : sweep_to_json(z, eta);
}

std::string dirichlet_output(const RunConfig& c, const Log& log) {
  const EdgeModel m = load_edge_model(c);
  const std::vector<double> mu = dirichlet_eigenvalues(m.potential, c.zmax);
  log.info("dirichlet: " + std::to_string(mu.size()) + " eigenvalues up to " + format_number(c.zmax));
  return c.format == Format::Csv ? dirichlet_to_csv(mu) : dirichlet_to_json(mu);
}

std::string bands_output(const RunConfig& c, const Log& log) {
  const EdgeModel m = load_edge_model(c);
  const BandStructure bs = band_edges(m.potential, m.alpha, c.zmax);
  log.info("bands: " + std::to_string(bs.bands.size()) + " bands, " + std::to_string(bs.open_gaps().size()) +
           " open gaps");
  return c.format == Format::Csv ? band_structure_to_csv(bs) : band_structure_to_json(bs);
}

std::string discrete_output(const RunConfig& c, const Log& log) {
  const GraphSpec g = load_graph(c);
  const auto spec = discrete_spectrum(assemble_discrete_laplacian(g));
  log.info("discrete-spec: " + std::to_string(spec.size()) + " distinct eigenvalues");
  return c.format == Format::Csv ? discrete_spectrum_to_csv(spec) : discrete_spectrum_to_json(spec);
}

std::string spectrum_output(const RunConfig& c, const Log& log) {
  const GraphSpec g = load_graph(c);
  const SpectrumReport r = quantum_spectrum(g, c.zmax);
  log.info("spectrum: " + std::to_string(r.points.size()) + " points, " + std::to_string(r.sigma0.size()) +
           " Dirichlet eigenvalues classified");
  return c.format == Format::Csv ? spectrum_report_to_csv(r) : spectrum_report_to_json(r);
}

std::string lattice_output(const RunConfig& c, const Log& log) {
  if (!c.n) throw Error(ErrorCode::InvalidArgument, "--n: lattice dimension is required");
  const EdgeModel m = load_edge_model(c);
  const SpectrumReport r = lattice_spectrum(*c.n, m.potential, m.alpha, c.zmax);
  log.info("lattice: n = " + std::to_string(*c.n) + ", " + std::to_string(r.intervals.size()) + " bands");
  return c.format == Format::Csv ? spectrum_report_to_csv(r) : spectrum_report_to_json(r);
}

std::string validate_output(const RunConfig& c, const Log& log, bool& matched) {
  const GraphSpec g = load_graph(c);
  const int n_fine = c.N.value_or(kDefaultElements);
  const SpectrumReport r = quantum_spectrum(g, c.zmax);

  const DiscretizedOperator fine = discretize(g, n_fine);
  log.debug("oracle: dimension " + std::to_string(fine.dimension()));
  const auto all = static_cast<std::size_t>(fine.dimension());
  const std::vector<double> oracle = oracle_eigenvalues(fine, all);
  const ComparisonReport cmp = compare(r, oracle, c.tol, c.zmax);

  std::optional<ConvergenceDiagnostic> conv;
  if (n_fine / 2 >= 8) {
    const DiscretizedOperator coarse = discretize(g, n_fine / 2);
    const std::size_t count = std::min(cmp.matched.size() + cmp.unmatched_oracle.size(),
                                       static_cast<std::size_t>(coarse.dimension()));
    std::vector<double> head(oracle.begin(), oracle.begin() + static_cast<std::ptrdiff_t>(count));
    conv = convergence_diagnostic(oracle_eigenvalues(coarse, count), head, n_fine);
  }
  const SpectrumReport refined = refine_sigma0(r, cmp);
  matched = cmp.success();
  log.info("validate: " + std::to_string(cmp.matched.size()) + " matched, " +
           std::to_string(cmp.unmatched_theory.size()) + " unmatched theory, " +
           std::to_string(cmp.unmatched_oracle.size()) + " unmatched oracle");
  return c.format == Format::Csv ? comparison_to_csv(cmp) : comparison_to_json(cmp, conv, refined);
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Discriminant: return "discriminant";
    case Command::Dirichlet: return "dirichlet";
    case Command::Bands: return "bands";
    case Command::DiscreteSpec: return "discrete-spec";
    case Command::Spectrum: return "spectrum";
    case Command::Lattice: return "lattice";
    case Command::Validate: return "validate";
  }
  return "spectrum";
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ScanResolutionExceeded:
    case ErrorCode::EigensolverFailure:
    case ErrorCode::DirichletPole:
    case ErrorCode::NotAnEigenpair:
      return NumericalError;
    default:
      return InputError;
  }
}

std::optional<Command> command_from(std::string_view name) {
  for (auto c : {Command::Discriminant, Command::Dirichlet, Command::Bands, Command::DiscreteSpec,
                 Command::Spectrum, Command::Lattice, Command::Validate}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

ParsedArgs parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of magnetic Schroedinger operators on equilateral quantum graphs"};
  app.name("qgs");

  std::string command;
  RunConfig cfg;
  double zmin = 0.0, alpha = 0.0;
  int n = 0, N = 0;
  std::string format = "json";

  app.add_option("command", command,
                 "discriminant | dirichlet | bands | discrete-spec | spectrum | lattice | validate")
      ->required();
  app.add_option("input", cfg.input, "graph description file (JSON)")->required();
  app.add_option("--zmax", cfg.zmax, "upper end of the energy window")->capture_default_str();
  auto* zmin_opt = app.add_option("--zmin", zmin, "start of the discriminant sweep (default min(U) - 1)");
  app.add_option("--samples", cfg.samples, "number of discriminant samples")->capture_default_str();
  auto* alpha_opt = app.add_option("--alpha", alpha, "coupling constant, overrides the file");
  auto* n_opt = app.add_option("--n", n, "lattice dimension")->check(CLI::PositiveNumber);
  auto* big_n_opt = app.add_option("--N", N, "oracle elements per edge (default 500)");
  app.add_option("--tol", cfg.tol, "relative matching tolerance for validate")->capture_default_str();
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return {std::nullopt, app.exit(e, out, err) == 0 ? Ok : InputError};
  }

  const auto cmd = command_from(command);
  if (!cmd) {
    err << "error: unknown command '" << command << "'\n";
    return {std::nullopt, InputError};
  }
  cfg.command = *cmd;
  if (*zmin_opt) cfg.zmin = zmin;
  if (*alpha_opt) cfg.alpha = alpha;
  if (*n_opt) cfg.n = n;
  if (*big_n_opt) cfg.N = N;
  cfg.format = format == "csv" ? Format::Csv : Format::Json;
  return {cfg, Ok};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Log log(err);
  log.debug(std::string("command ") + std::string(to_string(config.command)) + " on " + config.input);
  std::string text;
  bool matched = true;
  try {
    if (!(config.zmax > 0.0)) throw Error(ErrorCode::InvalidArgument, "--zmax must be positive");
    switch (config.command) {
      case Command::Discriminant: text = discriminant_output(config, log); break;
      case Command::Dirichlet: text = dirichlet_output(config, log); break;
      case Command::Bands: text = bands_output(config, log); break;
      case Command::DiscreteSpec: text = discrete_output(config, log); break;
      case Command::Spectrum: text = spectrum_output(config, log); break;
      case Command::Lattice: text = lattice_output(config, log); break;
      case Command::Validate: text = validate_output(config, log, matched); break;
    }
  } catch (const Error& e) {
    log.error(e.what());
    return exit_code_for(e);
  }

  if (config.out.empty()) {
    out << text;
  } else {
    std::ofstream file(config.out, std::ios::binary);
    if (!file) {
      log.error("--out: cannot write '" + config.out + "'");
      return InputError;
    }
    file << text;
  }
  return matched ? Ok : ValidationMismatch;
}

}  // namespace qgs::cli
