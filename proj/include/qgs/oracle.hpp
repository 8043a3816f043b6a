#pragma once

// Independent check: conforming P1 finite elements for the metric-graph
// operator itself, with vertex values shared across edges (phases e^{i beta}
// at the terminal ends) and the coupling alpha(v) = deg v * alpha / 2 as a
// vertex term in the quadratic form. Nothing here uses the discriminant.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qgs/graph.hpp"
#include "qgs/spectrum.hpp"

namespace qgs {

/// Pencil (K, M) on the unknowns [vertex values | interior nodes of edge 0 | ...].
struct DiscretizedOperator {
  Eigen::MatrixXcd stiffness;
  Eigen::MatrixXcd mass;
  int elements_per_edge = 0;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  bool real = true;  // every flux is zero, K and M are real symmetric

  double mesh_size() const { return 1.0 / elements_per_edge; }
  Eigen::Index dimension() const { return stiffness.rows(); }
  /// Global index of interior node i (1 <= i < N) of an edge.
  Eigen::Index interior_index(std::size_t edge, int i) const;
};

/// Throws MeshTooCoarse for N < 8, EigensolverFailure if M is not positive definite.
DiscretizedOperator discretize(const GraphSpec& g, int elements_per_edge);

/// Lowest `count` eigenvalues of K x = z M x, ascending.
std::vector<double> oracle_eigenvalues(const DiscretizedOperator& op, std::size_t count);

/// Eigenvalues of a general (non-Hermitian) square matrix, sorted by real part.
Eigen::VectorXcd general_eigenvalues(const Eigen::MatrixXcd& a);

struct MatchedPair {
  double theory = 0.0;
  double oracle = 0.0;
  double relative_error = 0.0;
};

struct ComparisonReport {
  double z_cut = 0.0;
  double tol_rel = 0.0;
  std::vector<MatchedPair> matched;
  std::vector<double> unmatched_oracle;  // candidate Sigma_0 evidence
  std::vector<double> unmatched_theory;  // failures
  double max_relative_mismatch = 0.0;

  bool success() const { return unmatched_theory.empty(); }
};

/// Greedy in-order matching of theory values (points and Present Sigma_0, with
/// multiplicity, up to z_cut) against oracle values. A pair matches when
/// |z_theory - z_oracle| <= tol_rel * max(1, z_theory). Throws WindowMismatch
/// when either side does not reach z_cut.
ComparisonReport compare(const SpectrumReport& report, const std::vector<double>& oracle, double tol_rel,
                         double z_cut);

/// Marks Undetermined Sigma_0 entries below the cut as Confirmed (an unmatched
/// oracle value sits at mu within tolerance) or Refuted.
SpectrumReport refine_sigma0(SpectrumReport report, const ComparisonReport& comparison);

/// log2(coarse / fine) for errors at mesh h and h/2.
double observed_order(double coarse_error, double fine_error);

/// Shift of the lowest eigenvalues between meshes N/2 and N. With second-order
/// convergence the error at N is about a third of the shift.
struct ConvergenceDiagnostic {
  int coarse_elements = 0;
  int fine_elements = 0;
  double max_relative_shift = 0.0;
  double estimated_relative_error = 0.0;
};
ConvergenceDiagnostic convergence_diagnostic(const std::vector<double>& coarse, const std::vector<double>& fine,
                                             int fine_elements);

}  // namespace qgs
