#include "qgs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "qgs/error.hpp"

namespace qgs {

namespace {

using nlohmann::json;

constexpr double kClusterGap = 1e-9;
constexpr double kUnitSnap = 1e-12;

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, field + ": " + what);
}

json parse_document(std::string_view text) {
  try {
    json doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    if (!doc.is_object()) parse_fail("<root>", "expected an object");
    return doc;
  } catch (const json::parse_error& e) {
    parse_fail("<root>", e.what());
  }
}

double number_field(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) parse_fail(path + key, "expected a number");
  return v.get<double>();
}

std::string string_field(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) parse_fail(path + key, "missing");
  const json& v = obj.at(key);
  if (!v.is_string()) parse_fail(path + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const std::string& path) {
  if (!v.is_array()) parse_fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) parse_fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

Potential potential_from(const json& doc) {
  if (!doc.contains("potential")) return Potential::zero();
  const json& p = doc.at("potential");
  if (!p.is_object()) parse_fail("potential", "expected an object");
  if (!p.contains("breakpoints")) parse_fail("potential.breakpoints", "missing");
  if (!p.contains("values")) parse_fail("potential.values", "missing");
  return Potential(number_array(p.at("breakpoints"), "potential.breakpoints"),
                   number_array(p.at("values"), "potential.values"));
}

// Union-find over vertex indices.
struct Components {
  std::vector<std::size_t> parent;

  explicit Components(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

bool GraphSpec::flux_free() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.beta == 0.0; });
}

std::optional<std::size_t> GraphSpec::find_vertex(std::string_view id) const {
  auto it = std::find(vertices_.begin(), vertices_.end(), id);
  if (it == vertices_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

GraphSpec GraphSpec::with_alpha(double alpha) const {
  GraphSpec copy = *this;
  copy.alpha_ = alpha;
  return copy;
}

GraphSpec make_graph(std::vector<std::string> vertices, std::vector<EdgeInput> edges, double alpha,
                     Potential potential, std::optional<int> degree_bound) {
  GraphSpec g(std::move(potential));
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!index.emplace(vertices[i], i).second) {
      throw Error(ErrorCode::DuplicateVertex, "vertices[" + std::to_string(i) + "] '" + vertices[i] + "'");
    }
  }
  g.vertices_ = std::move(vertices);
  g.alpha_ = alpha;
  g.degree_bound_ = degree_bound;
  g.indeg_.assign(g.vertices_.size(), 0);
  g.outdeg_.assign(g.vertices_.size(), 0);

  std::unordered_set<std::string> edge_ids;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const EdgeInput& in = edges[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!edge_ids.insert(in.id).second) {
      throw Error(ErrorCode::ParseError, where + ".id: duplicate edge id '" + in.id + "'");
    }
    auto from = index.find(in.from);
    if (from == index.end()) {
      throw Error(ErrorCode::UnknownVertexReference, where + ".from: unknown vertex '" + in.from + "'");
    }
    auto to = index.find(in.to);
    if (to == index.end()) {
      throw Error(ErrorCode::UnknownVertexReference, where + ".to: unknown vertex '" + in.to + "'");
    }
    if (!std::isfinite(in.beta)) {
      throw Error(ErrorCode::ParseError, where + ".beta: not finite");
    }
    g.edges_.push_back({in.id, from->second, to->second, in.beta});
    ++g.outdeg_[from->second];
    ++g.indeg_[to->second];
  }

  bool balanced = true;
  for (std::size_t v = 0; v < g.vertices_.size(); ++v) {
    const int deg = g.degree(v);
    if (deg == 0) {
      throw Error(ErrorCode::IsolatedVertex, "vertex '" + g.vertices_[v] + "' has no edges");
    }
    if (degree_bound && deg > *degree_bound) {
      throw Error(ErrorCode::DegreeBoundExceeded, "vertex '" + g.vertices_[v] + "' has degree " +
                                                      std::to_string(deg) + " > max_degree " +
                                                      std::to_string(*degree_bound));
    }
    balanced = balanced && g.indeg_[v] == g.outdeg_[v];
  }
  g.type_ = balanced ? GraphType::Balanced : GraphType::Unbalanced;
  if (!balanced && !g.potential_.is_even()) {
    throw Error(ErrorCode::OddGraphWithUnevenPotential,
                "potential: graph has indeg != outdeg somewhere, so U(x) = U(1-x) is required");
  }
  return g;
}

GraphSpec build_graph(std::string_view text) {
  const json doc = parse_document(text);

  if (!doc.contains("vertices")) parse_fail("vertices", "missing");
  const json& jv = doc.at("vertices");
  if (!jv.is_array()) parse_fail("vertices", "expected an array of strings");
  std::vector<std::string> vertices;
  for (std::size_t i = 0; i < jv.size(); ++i) {
    if (!jv[i].is_string()) parse_fail("vertices[" + std::to_string(i) + "]", "expected a string");
    vertices.push_back(jv[i].get<std::string>());
  }

  std::vector<EdgeInput> edges;
  if (doc.contains("edges")) {
    const json& je = doc.at("edges");
    if (!je.is_array()) parse_fail("edges", "expected an array");
    for (std::size_t i = 0; i < je.size(); ++i) {
      const std::string path = "edges[" + std::to_string(i) + "].";
      if (!je[i].is_object()) parse_fail(path.substr(0, path.size() - 1), "expected an object");
      EdgeInput e;
      e.id = je[i].contains("id") ? string_field(je[i], "id", path) : "e" + std::to_string(i + 1);
      e.from = string_field(je[i], "from", path);
      e.to = string_field(je[i], "to", path);
      e.beta = number_field(je[i], "beta", path, 0.0);
      edges.push_back(std::move(e));
    }
  }

  const double alpha = number_field(doc, "alpha", "", 0.0);
  std::optional<int> bound;
  if (doc.contains("max_degree")) {
    if (!doc.at("max_degree").is_number_integer()) parse_fail("max_degree", "expected an integer");
    bound = doc.at("max_degree").get<int>();
  }
  return make_graph(std::move(vertices), std::move(edges), alpha, potential_from(doc), bound);
}

EdgeModel parse_edge_model(std::string_view text) {
  const json doc = parse_document(text);
  return {potential_from(doc), number_field(doc, "alpha", "", 0.0)};
}

WeightedVector::WeightedVector(Eigen::VectorXcd values, Eigen::VectorXd weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
  if (values_.size() != weights_.size()) {
    throw Error(ErrorCode::InvalidArgument, "weighted vector: size mismatch");
  }
}

std::complex<double> WeightedVector::dot(const WeightedVector& other) const {
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    acc += weights_[i] * std::conj(values_[i]) * other.values_[i];
  }
  return acc;
}

double WeightedVector::norm() const { return std::sqrt(std::abs(dot(*this))); }

DiscreteLaplacian::DiscreteLaplacian(Eigen::MatrixXcd adjacency, Eigen::VectorXd degrees)
    : adjacency_(std::move(adjacency)), degrees_(std::move(degrees)) {
  const Eigen::VectorXd inv = degrees_.cwiseInverse();
  const Eigen::VectorXd inv_sqrt = degrees_.cwiseSqrt().cwiseInverse();
  action_ = inv.asDiagonal() * adjacency_;
  // One product s_i * s_j per entry keeps H(j, i) = conj(H(i, j)) bit for bit.
  hermitian_ = adjacency_;
  for (Eigen::Index i = 0; i < hermitian_.rows(); ++i) {
    for (Eigen::Index j = 0; j < hermitian_.cols(); ++j) hermitian_(i, j) *= inv_sqrt[i] * inv_sqrt[j];
  }
}

WeightedVector DiscreteLaplacian::apply(const WeightedVector& h) const {
  return WeightedVector(action_ * h.values(), h.weights());
}

DiscreteLaplacian assemble_discrete_laplacian(const GraphSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXd deg(n);
  for (Eigen::Index v = 0; v < n; ++v) deg[v] = g.degree(static_cast<std::size_t>(v));
  for (const Edge& e : g.edges()) {
    const std::complex<double> phase = std::polar(1.0, e.beta);
    const auto from = static_cast<Eigen::Index>(e.from);
    const auto to = static_cast<Eigen::Index>(e.to);
    // Row i(e) picks up e^{-i beta} h(t(e)); row t(e) picks up e^{i beta} h(i(e)).
    b(from, to) += std::conj(phase);
    b(to, from) += phase;
  }
  return DiscreteLaplacian(std::move(b), std::move(deg));
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solve_hermitian(const DiscreteLaplacian& lap) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lap.hermitian());
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "discrete Laplacian eigensolve did not converge");
  }
  return es;
}

// Rounds eigensolver noise at -1, 0 and 1.
double snap_unit(double x) {
  if (std::abs(x - 1.0) <= kUnitSnap || x > 1.0) return 1.0;
  if (std::abs(x + 1.0) <= kUnitSnap || x < -1.0) return -1.0;
  if (std::abs(x) <= kUnitSnap) return 0.0;
  return x;
}

}  // namespace

std::vector<EigenvalueCluster> discrete_spectrum(const DiscreteLaplacian& lap) {
  const Eigen::VectorXd ev = solve_hermitian(lap).eigenvalues();
  std::vector<EigenvalueCluster> out;
  std::vector<double> members;
  auto flush = [&] {
    if (members.empty()) return;
    const double mean = std::accumulate(members.begin(), members.end(), 0.0) / members.size();
    out.push_back({snap_unit(mean), static_cast<int>(members.size())});
    members.clear();
  };
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!members.empty() && ev[i] - members.back() > kClusterGap) flush();
    members.push_back(ev[i]);
  }
  flush();
  return out;
}

DiscreteEigenpairs discrete_eigenpairs(const DiscreteLaplacian& lap) {
  const auto es = solve_hermitian(lap);
  DiscreteEigenpairs out;
  out.values = es.eigenvalues().unaryExpr([](double x) { return snap_unit(x); });
  const Eigen::VectorXd inv_sqrt = lap.degrees().cwiseSqrt().cwiseInverse();
  // Unit Euclidean y becomes unit weighted norm after h = D^{-1/2} y.
  out.vectors = inv_sqrt.asDiagonal() * es.eigenvectors();
  return out;
}

bool has_cycle(const GraphSpec& g) {
  Components comps(g.vertex_count());
  for (const Edge& e : g.edges()) {
    if (!comps.unite(e.from, e.to)) return true;
  }
  return false;
}

}  // namespace qgs
