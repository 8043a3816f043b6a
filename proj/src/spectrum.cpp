#include "qgs/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qgs/error.hpp"

namespace qgs {

namespace {

constexpr double kCoincidence = 1e-9;
constexpr double kEigenpairTolerance = 1e-7;
constexpr double kDirichletPole = 1e-12;
constexpr double kKernelRankTolerance = 1e-9;

bool same_energy(double a, double b) {
  return std::abs(a - b) <= kCoincidence * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Sorted values with near-duplicates removed.
std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || !same_energy(out.back(), x)) out.push_back(x);
  }
  return out;
}

int nullity(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return static_cast<int>(a.cols());
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
  const double cut = kKernelRankTolerance * std::max(1.0, sv.maxCoeff());
  return static_cast<int>(a.cols() - (sv.array() > cut).count());
}

/// Dimension of the eigenspace at a Dirichlet eigenvalue mu with nonzero
/// vertex values. With s(1; mu) = 0 every solution on e is
/// F(i(e)) c + b_e s, so continuity and the vertex conditions form a finite
/// system in (F, b); Dirichlet-supported solutions (F = 0) are subtracted.
int vertex_visible_multiplicity(const GraphSpec& g, double mu, int dirichlet_supported) {
  const EdgeSolution es = fundamental_solutions(g.potential(), mu);
  const double c1 = static_cast<double>(es.c1);
  const double cp1 = static_cast<double>(es.cp1);
  const double sp1 = static_cast<double>(es.sp1);
  const auto nv = static_cast<Eigen::Index>(g.vertex_count());
  const auto ne = static_cast<Eigen::Index>(g.edge_count());
  // Rows: continuity per edge, then flux per vertex. Columns: F, then b.
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(ne + nv, nv + ne);
  for (Eigen::Index j = 0; j < ne; ++j) {
    const Edge& e = g.edges()[static_cast<std::size_t>(j)];
    const auto from = static_cast<Eigen::Index>(e.from);
    const auto to = static_cast<Eigen::Index>(e.to);
    const std::complex<double> phase = std::polar(1.0, e.beta);
    a(j, from) += c1;
    a(j, to) -= std::conj(phase);
    a(ne + from, nv + j) += 1.0;
    a(ne + to, from) -= phase * cp1;
    a(ne + to, nv + j) -= phase * sp1;
  }
  for (Eigen::Index v = 0; v < nv; ++v) a(ne + v, v) -= 0.5 * g.degree(static_cast<std::size_t>(v)) * g.alpha();
  return nullity(a) - dirichlet_supported;
}

bool counts_as_spectrum(const Sigma0Entry& e) {
  return e.status == Sigma0Status::Present || e.status == Sigma0Status::Confirmed;
}

}  // namespace

std::string_view to_string(Sigma0Status s) {
  switch (s) {
    case Sigma0Status::Present: return "Present";
    case Sigma0Status::Absent: return "Absent";
    case Sigma0Status::Undetermined: return "Undetermined";
    case Sigma0Status::Confirmed: return "Confirmed";
    case Sigma0Status::Refuted: return "Refuted";
  }
  return "Undetermined";
}

Sigma0Status sigma0_status_from(std::string_view s) {
  for (auto st : {Sigma0Status::Present, Sigma0Status::Absent, Sigma0Status::Undetermined,
                  Sigma0Status::Confirmed, Sigma0Status::Refuted}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorCode::ParseError, "sigma0.status: unknown value '" + std::string(s) + "'");
}

std::vector<double> SpectrumReport::theory_values(double z_cut) const {
  std::vector<double> out;
  for (const SpectrumPoint& p : points) {
    if (p.z <= z_cut) out.insert(out.end(), static_cast<std::size_t>(p.multiplicity), p.z);
  }
  for (const Sigma0Entry& e : sigma0) {
    if (counts_as_spectrum(e) && e.mu <= z_cut) {
      out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.mu);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXcd weyl_matrix(const GraphSpec& g, double z) {
  const Matrix2r m = dtn_matrix(g.potential(), z);
  const double half_trace = static_cast<double>((m(0, 0) + m(1, 1)) / 2);
  const double m12 = static_cast<double>(m(0, 1));
  const DiscreteLaplacian lap = assemble_discrete_laplacian(g);
  const auto n = static_cast<Eigen::Index>(lap.size());
  return half_trace * Eigen::MatrixXcd::Identity(n, n) + m12 * lap.hermitian();
}

Eigen::VectorXd spectral_condition_values(const GraphSpec& g, double z) {
  Eigen::MatrixXcd m = weyl_matrix(g, z);
  m.diagonal().array() -= g.alpha() / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "Weyl matrix eigensolve did not converge");
  }
  return es.eigenvalues();
}

std::vector<Sigma0Entry> sigma0_classify(const GraphSpec& g, const std::vector<double>& dirichlet) {
  const bool loop_rule = g.flux_free() && g.potential().is_even() && has_cycle(g);
  const auto nv = static_cast<Eigen::Index>(g.vertex_count());
  const auto ne = static_cast<Eigen::Index>(g.edge_count());

  std::vector<Sigma0Entry> out;
  for (double mu : dirichlet) {
    // phi(0) = phi(1) = 0, phi'(0) = 1, phi'(1) = s'(1; mu).
    const double slope = static_cast<double>(fundamental_solutions(g.potential(), mu).sp1);
    Eigen::MatrixXcd flux = Eigen::MatrixXcd::Zero(nv, ne);
    for (Eigen::Index j = 0; j < ne; ++j) {
      const Edge& e = g.edges()[static_cast<std::size_t>(j)];
      flux(static_cast<Eigen::Index>(e.from), j) += 1.0;
      flux(static_cast<Eigen::Index>(e.to), j) -= slope * std::polar(1.0, e.beta);
    }
    const int kernel = nullity(flux);

    Sigma0Entry entry;
    entry.mu = mu;
    if (kernel > 0) {
      entry.status = Sigma0Status::Present;
      entry.reason = loop_rule ? "loop-eigenfunction" : "dirichlet-kernel";
      entry.multiplicity = kernel;
    } else {
      entry.status = Sigma0Status::Undetermined;
      entry.reason = "no-dirichlet-supported-eigenfunction";
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<Sigma0Entry> sigma0_classify(const GraphSpec& g, double zmax) {
  return sigma0_classify(g, dirichlet_eigenvalues(g.potential(), zmax));
}

SpectrumReport quantum_spectrum(const GraphSpec& g, double zmax) {
  const Potential& u = g.potential();
  const double alpha = g.alpha();

  SpectrumReport r;
  r.mode = SpectrumMode::Finite;
  r.zmax = zmax;
  r.bands_used = band_edges(u, alpha, zmax);
  r.discrete = discrete_spectrum(assemble_discrete_laplacian(g));

  std::vector<SpectrumPoint> raw;
  for (std::size_t k = 0; k < r.bands_used.bands.size(); ++k) {
    for (const EigenvalueCluster& c : r.discrete) {
      const double z = invert_discriminant(r.bands_used, u, alpha, k, 2.0 * c.value);
      if (z <= zmax) raw.push_back({z, c.multiplicity, c.value, k, false});
    }
  }
  std::stable_sort(raw.begin(), raw.end(), [](const SpectrumPoint& a, const SpectrumPoint& b) {
    return a.z < b.z || (a.z == b.z && a.lambda < b.lambda);
  });

  // A closed gap puts the same (z, lambda) at the end of one band and the
  // start of the next; keep the first. Distinct sources at the same z stay
  // separate and are flagged.
  for (const SpectrumPoint& p : raw) {
    bool duplicate = false;
    for (auto it = r.points.rbegin(); it != r.points.rend() && same_energy(it->z, p.z); ++it) {
      if (std::abs(it->lambda - p.lambda) <= kCoincidence) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) r.points.push_back(p);
  }

  r.sigma0 = sigma0_classify(g, r.bands_used.dirichlet);

  // At a Dirichlet eigenvalue the discriminant test says nothing; the points
  // there are replaced by the exact count of eigenfunctions seen at vertices.
  for (const Sigma0Entry& e : r.sigma0) {
    if (e.mu > zmax) continue;
    const int supported = counts_as_spectrum(e) ? e.multiplicity : 0;
    const int visible = vertex_visible_multiplicity(g, e.mu, supported);
    std::optional<SpectrumPoint> replaced;
    std::erase_if(r.points, [&](const SpectrumPoint& p) {
      if (!same_energy(p.z, e.mu)) return false;
      if (!replaced) replaced = p;
      return true;
    });
    if (visible <= 0) continue;
    SpectrumPoint p = replaced.value_or(SpectrumPoint{});
    p.z = e.mu;
    p.multiplicity = visible;
    if (!replaced) {
      const EdgeSolution es = fundamental_solutions(u, e.mu);
      p.lambda = es.c1 < 0 ? -1.0 : 1.0;
      const auto& bands = r.bands_used.bands;
      while (p.band + 1 < bands.size() && bands[p.band].upper < e.mu) ++p.band;
    }
    p.coincident = false;
    const auto at = std::lower_bound(r.points.begin(), r.points.end(), p.z,
                                     [](const SpectrumPoint& q, double z) { return q.z < z; });
    r.points.insert(at, p);
  }
  for (std::size_t i = 0; i + 1 < r.points.size(); ++i) {
    for (std::size_t j = i + 1; j < r.points.size() && same_energy(r.points[i].z, r.points[j].z); ++j) {
      r.points[i].coincident = r.points[j].coincident = true;
    }
  }

  std::vector<double> values;
  for (const SpectrumPoint& p : r.points) values.push_back(p.z);
  for (const Sigma0Entry& e : r.sigma0) {
    if (counts_as_spectrum(e)) values.push_back(e.mu);
  }
  values = unique_sorted(std::move(values));
  for (std::size_t i = 0; i + 1 < values.size(); ++i) r.gaps.push_back({values[i], values[i + 1]});
  return r;
}

SpectrumReport lattice_spectrum(int n, const Potential& u, double alpha, double zmax) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "lattice dimension must be >= 1");
  SpectrumReport r;
  r.mode = SpectrumMode::Lattice;
  r.lattice_dimension = n;
  r.zmax = zmax;
  r.bands_used = band_edges(u, alpha, zmax);

  for (std::size_t k = 0; k < r.bands_used.bands.size(); ++k) {
    const Band& b = r.bands_used.bands[k];
    r.intervals.push_back({b.lower, std::min(b.upper, zmax), k, b.partial});
  }
  // n = 1 is the Kronig-Penney operator itself (no eigenvalues); for n >= 2
  // every Dirichlet eigenvalue carries a square-supported eigenfunction.
  for (double mu : r.bands_used.dirichlet) {
    Sigma0Entry e;
    e.mu = mu;
    e.status = n >= 2 ? Sigma0Status::Present : Sigma0Status::Absent;
    e.reason = "Zn-proposition";
    r.sigma0.push_back(std::move(e));
  }
  for (const Gap& gap : r.bands_used.open_gaps()) {
    const double upper = std::min(gap.upper, zmax);
    if (n >= 2 && gap.mu > gap.lower && gap.mu < upper) {
      r.gaps.push_back({gap.lower, gap.mu});
      r.gaps.push_back({gap.mu, upper});
    } else if (upper > gap.lower) {
      r.gaps.push_back({gap.lower, upper});
    }
  }
  return r;
}

LiftedEigenfunction::LiftedEigenfunction(const GraphSpec& g, double z, Eigen::VectorXcd h,
                                         std::vector<EdgeBoundaryData> data)
    : potential_(g.potential()), z_(z), h_(std::move(h)), data_(std::move(data)) {
  compute_residuals(g);
}

EdgeValue LiftedEigenfunction::evaluate(std::size_t edge, double x) const {
  const EdgeBoundaryData& d = data_.at(edge);
  return edge_solution_at(potential_, z_, d.f0, d.f1, x);
}

void LiftedEigenfunction::compute_residuals(const GraphSpec& g) {
  const auto nv = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::VectorXcd flux = Eigen::VectorXcd::Zero(nv);
  double cont = 0.0;
  for (std::size_t j = 0; j < g.edge_count(); ++j) {
    const Edge& e = g.edges()[j];
    const auto from = static_cast<Eigen::Index>(e.from);
    const auto to = static_cast<Eigen::Index>(e.to);
    const std::complex<double> phase = std::polar(1.0, e.beta);
    const EdgeValue start = evaluate(j, 0.0);
    const EdgeValue end = evaluate(j, 1.0);
    cont = std::max({cont, std::abs(start.value - h_[from]), std::abs(phase * end.value - h_[to])});
    flux[from] += start.derivative;
    flux[to] -= phase * end.derivative;
  }
  double worst = 0.0;
  for (Eigen::Index v = 0; v < nv; ++v) {
    const double coupling = 0.5 * g.degree(static_cast<std::size_t>(v)) * g.alpha();
    worst = std::max(worst, std::abs(flux[v] - coupling * h_[v]));
  }
  const double scale = std::max(1.0, h_.cwiseAbs().maxCoeff());
  continuity_residual_ = cont / scale;
  flux_residual_ = worst / scale;
}

LiftedEigenfunction lift_eigenfunction(const GraphSpec& g, double z, const Eigen::VectorXcd& h) {
  if (static_cast<std::size_t>(h.size()) != g.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "vertex vector has wrong size");
  }
  const Potential& u = g.potential();
  const EdgeSolution es = fundamental_solutions(u, z);
  const bool at_pole = std::abs(es.s1) <= kDirichletPole;

  if (!at_pole) {
    const Matrix2r m = dtn_matrix(u, z);
    const double half_trace = static_cast<double>((m(0, 0) + m(1, 1)) / 2);
    const double m12 = static_cast<double>(m(0, 1));
    const DiscreteLaplacian lap = assemble_discrete_laplacian(g);
    const Eigen::VectorXcd residual = (half_trace - g.alpha() / 2.0) * h + m12 * (lap.action() * h);
    const Eigen::VectorXd w = lap.degrees();
    const WeightedVector res(residual, w);
    const WeightedVector hv(h, w);
    const double rel = res.norm() / (hv.norm() * std::max(1.0, std::abs(m12)));
    if (!(rel <= kEigenpairTolerance)) {
      throw Error(ErrorCode::NotAnEigenpair,
                  "(M(z) - alpha/2) h has relative residual " + std::to_string(rel));
    }
  }

  std::vector<EdgeBoundaryData> data;
  for (const Edge& e : g.edges()) {
    data.push_back({h[static_cast<Eigen::Index>(e.from)],
                    std::polar(1.0, -e.beta) * h[static_cast<Eigen::Index>(e.to)]});
  }
  try {
    LiftedEigenfunction lifted(g, z, h, std::move(data));
    if (at_pole && !(lifted.flux_residual() <= kEigenpairTolerance)) {
      throw Error(ErrorCode::NotAnEigenpair, "flux condition fails at Dirichlet eigenvalue z = " +
                                                 std::to_string(z));
    }
    return lifted;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DirichletPole) throw Error(ErrorCode::NotAnEigenpair, e.what());
    throw;
  }
}

GapReport gap_report(const SpectrumReport& report) {
  GapReport out;
  const BandStructure& bs = report.bands_used;
  const auto mu_at = [&](std::ptrdiff_t k) {
    if (k < 0) return -std::numeric_limits<double>::infinity();
    if (static_cast<std::size_t>(k) < bs.dirichlet.size()) return bs.dirichlet[static_cast<std::size_t>(k)];
    return std::numeric_limits<double>::infinity();
  };

  if (report.mode == SpectrumMode::Lattice) {
    out.laplacian_full_interval = true;
    out.laplacian_gap_count = 0;
  } else {
    std::vector<double> lam{-1.0, 1.0};
    for (const EigenvalueCluster& c : report.discrete) lam.push_back(c.value);
    lam = unique_sorted(std::move(lam));
    out.laplacian_gap_count = static_cast<int>(lam.size()) - 1;
  }

  std::vector<double> spectrum;
  for (const SpectrumPoint& p : report.points) spectrum.push_back(p.z);
  for (const Sigma0Entry& e : report.sigma0) {
    if (counts_as_spectrum(e)) spectrum.push_back(e.mu);
  }

  for (std::size_t k = 0; k < bs.bands.size(); ++k) {
    const Band& b = bs.bands[k];
    if (b.partial) continue;
    BandGapCount c;
    c.band = k;
    c.mu_lower = mu_at(static_cast<std::ptrdiff_t>(k) - 1);
    c.mu_upper = mu_at(static_cast<std::ptrdiff_t>(k));
    c.laplacian_gaps = out.laplacian_gap_count;
    if (report.mode == SpectrumMode::Lattice) {
      c.operator_gaps = 0;
    } else {
      std::vector<double> cuts{b.lower, b.upper};
      for (double z : spectrum) {
        if (z >= b.lower && z <= b.upper) cuts.push_back(z);
      }
      c.operator_gaps = static_cast<int>(unique_sorted(std::move(cuts)).size()) - 1;
    }
    out.counts_agree = out.counts_agree && c.operator_gaps == c.laplacian_gaps;
    out.per_band.push_back(c);
  }

  for (const Gap& gap : bs.open_gaps()) {
    for (const SpectrumPoint& p : report.points) {
      const double tol = kCoincidence * std::max(1.0, std::abs(p.z));
      if (p.z > gap.lower + tol && p.z < gap.upper - tol) {
        out.kp_gaps_free = false;
        out.kp_gap_violations.push_back(p.z);
      }
    }
  }
  return out;
}

GapReport gap_report(const GraphSpec& g, double zmax) { return gap_report(quantum_spectrum(g, zmax)); }

}  // namespace qgs
