#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qgs/potential.hpp"

namespace qgs {

/// (A): indeg v = outdeg v everywhere, any potential allowed.
/// (B): everything else; the potential must be even.
enum class GraphType { Balanced, Unbalanced };

struct Edge {
  std::string id;
  std::size_t from = 0;  // initial vertex
  std::size_t to = 0;    // terminal vertex
  double beta = 0.0;     // magnetic flux
};

/// Edge as written in input: endpoints by vertex id.
struct EdgeInput {
  std::string id;
  std::string from;
  std::string to;
  double beta = 0.0;
};

/// Finite oriented multigraph with fluxes, the global coupling alpha
/// (alpha(v) = deg v * alpha / 2) and the common edge potential.
class GraphSpec {
 public:
  friend GraphSpec make_graph(std::vector<std::string>, std::vector<EdgeInput>, double, Potential,
                              std::optional<int>);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double alpha() const { return alpha_; }
  const Potential& potential() const { return potential_; }
  std::optional<int> degree_bound() const { return degree_bound_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  int indeg(std::size_t v) const { return indeg_[v]; }
  int outdeg(std::size_t v) const { return outdeg_[v]; }
  int degree(std::size_t v) const { return indeg_[v] + outdeg_[v]; }
  GraphType type() const { return type_; }
  bool flux_free() const;
  std::optional<std::size_t> find_vertex(std::string_view id) const;

  /// Revalidated copy with a different coupling constant.
  GraphSpec with_alpha(double alpha) const;

 private:
  GraphSpec(Potential u) : potential_(std::move(u)) {}

  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  double alpha_ = 0.0;
  Potential potential_;
  std::optional<int> degree_bound_;
  std::vector<int> indeg_;
  std::vector<int> outdeg_;
  GraphType type_ = GraphType::Balanced;
};

/// Validates and classifies. Errors: DuplicateVertex, UnknownVertexReference,
/// IsolatedVertex, DegreeBoundExceeded, OddGraphWithUnevenPotential.
GraphSpec make_graph(std::vector<std::string> vertices, std::vector<EdgeInput> edges, double alpha,
                     Potential potential, std::optional<int> degree_bound = std::nullopt);

/// Parses the JSON graph description
///   {"vertices": [...], "edges": [{"id", "from", "to", "beta"}], "alpha": a,
///    "potential": {"breakpoints": [...], "values": [...]}, "max_degree": N}
/// `beta`, `alpha`, `potential` and `max_degree` are optional.
GraphSpec build_graph(std::string_view text);

/// The edge-only part of a description (for lattice and single-edge commands).
struct EdgeModel {
  Potential potential = Potential::zero();
  double alpha = 0.0;
};
EdgeModel parse_edge_model(std::string_view text);

/// Vertex function in l^2(Gamma), scalar product weighted by deg v.
class WeightedVector {
 public:
  WeightedVector(Eigen::VectorXcd values, Eigen::VectorXd weights);

  const Eigen::VectorXcd& values() const { return values_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  std::complex<double> dot(const WeightedVector& other) const;
  double norm() const;

 private:
  Eigen::VectorXcd values_;
  Eigen::VectorXd weights_;
};

/// Discrete magnetic Laplacian
///   (Delta h)(v) = (1/deg v) [ sum_{i(e)=v} e^{-i beta} h(t(e)) + sum_{t(e)=v} e^{i beta} h(i(e)) ].
/// action() = D^{-1} B acts on vertex values; hermitian() = D^{-1/2} B D^{-1/2}
/// is the same operator in the unweighted picture.
class DiscreteLaplacian {
 public:
  DiscreteLaplacian(Eigen::MatrixXcd adjacency, Eigen::VectorXd degrees);

  const Eigen::MatrixXcd& adjacency() const { return adjacency_; }
  const Eigen::MatrixXcd& action() const { return action_; }
  const Eigen::MatrixXcd& hermitian() const { return hermitian_; }
  const Eigen::VectorXd& degrees() const { return degrees_; }
  std::size_t size() const { return static_cast<std::size_t>(degrees_.size()); }

  WeightedVector apply(const WeightedVector& h) const;

 private:
  Eigen::MatrixXcd adjacency_;  // B
  Eigen::VectorXd degrees_;
  Eigen::MatrixXcd action_;
  Eigen::MatrixXcd hermitian_;
};

DiscreteLaplacian assemble_discrete_laplacian(const GraphSpec& g);

struct EigenvalueCluster {
  double value = 0.0;
  int multiplicity = 0;

  friend bool operator==(const EigenvalueCluster&, const EigenvalueCluster&) = default;
};

/// Sorted eigenvalues of Delta, clustered at 1e-9. Values within 1e-12 of
/// +-1 or 0 are snapped there. Throws EigensolverFailure.
std::vector<EigenvalueCluster> discrete_spectrum(const DiscreteLaplacian& lap);

/// Eigenpairs with eigenvectors in vertex space (columns h, Delta h = lambda h),
/// normalised to unit weighted norm.
struct DiscreteEigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};
DiscreteEigenpairs discrete_eigenpairs(const DiscreteLaplacian& lap);

/// True iff the underlying undirected multigraph has a cycle; self-loops and
/// parallel edges count.
bool has_cycle(const GraphSpec& g);

}  // namespace qgs
