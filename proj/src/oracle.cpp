#include "qgs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "qgs/error.hpp"

namespace qgs {

namespace {

constexpr int kMinElements = 8;

struct LocalMatrices {
  Eigen::Matrix2d stiffness;
  Eigen::Matrix2d mass;
};

/// P1 element on [x0, x0 + h] with the potential integrated exactly.
LocalMatrices element_matrices(const Potential& u, double x0, double h) {
  LocalMatrices m;
  m.stiffness << 1.0, -1.0, -1.0, 1.0;
  m.stiffness /= h;
  m.mass << 2.0, 1.0, 1.0, 2.0;
  m.mass *= h / 6.0;

  // int U phi_i phi_j over the element, phi_0 = 1 - t, phi_1 = t.
  const auto& bp = u.breakpoints();
  const double x1 = x0 + h;
  for (std::size_t j = 0; j < u.segment_count(); ++j) {
    const double lo = std::max(x0, bp[j]);
    const double hi = std::min(x1, bp[j + 1]);
    if (hi <= lo) continue;
    const double value = u.values()[j];
    if (value == 0.0) continue;
    const double t0 = (lo - x0) / h;
    const double t1 = (hi - x0) / h;
    const double i00 = (std::pow(1.0 - t0, 3) - std::pow(1.0 - t1, 3)) / 3.0;
    const double i01 = (t1 * t1 - t0 * t0) / 2.0 - (t1 * t1 * t1 - t0 * t0 * t0) / 3.0;
    const double i11 = (t1 * t1 * t1 - t0 * t0 * t0) / 3.0;
    Eigen::Matrix2d w;
    w << i00, i01, i01, i11;
    m.stiffness += value * h * w;
  }
  return m;
}

template <class Matrix>
std::vector<double> pencil_eigenvalues(const Matrix& k, const Matrix& m) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(k, m, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "generalized eigensolve did not converge");
  }
  const Eigen::VectorXd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

Eigen::Index DiscretizedOperator::interior_index(std::size_t edge, int i) const {
  return static_cast<Eigen::Index>(vertex_count + edge * static_cast<std::size_t>(elements_per_edge - 1) +
                                   static_cast<std::size_t>(i - 1));
}

DiscretizedOperator discretize(const GraphSpec& g, int elements_per_edge) {
  if (elements_per_edge < kMinElements) {
    throw Error(ErrorCode::MeshTooCoarse,
                "N = " + std::to_string(elements_per_edge) + " < " + std::to_string(kMinElements));
  }
  DiscretizedOperator op;
  op.elements_per_edge = elements_per_edge;
  op.vertex_count = g.vertex_count();
  op.edge_count = g.edge_count();
  op.real = g.flux_free();

  const Eigen::Index dim =
      static_cast<Eigen::Index>(op.vertex_count + op.edge_count * static_cast<std::size_t>(elements_per_edge - 1));
  op.stiffness = Eigen::MatrixXcd::Zero(dim, dim);
  op.mass = Eigen::MatrixXcd::Zero(dim, dim);

  const double h = op.mesh_size();
  for (std::size_t j = 0; j < g.edge_count(); ++j) {
    const Edge& e = g.edges()[j];
    // f_e(0) = f(i(e)), f_e(1) = e^{-i beta} f(t(e)).
    const std::complex<double> end_phase = std::polar(1.0, -e.beta);
    for (int el = 0; el < elements_per_edge; ++el) {
      Eigen::Index idx[2];
      std::complex<double> coef[2] = {1.0, 1.0};
      idx[0] = el == 0 ? static_cast<Eigen::Index>(e.from) : op.interior_index(j, el);
      if (el + 1 == elements_per_edge) {
        idx[1] = static_cast<Eigen::Index>(e.to);
        coef[1] = end_phase;
      } else {
        idx[1] = op.interior_index(j, el + 1);
      }
      const LocalMatrices loc = element_matrices(g.potential(), el * h, h);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const std::complex<double> w = std::conj(coef[a]) * coef[b];
          op.stiffness(idx[a], idx[b]) += w * loc.stiffness(a, b);
          op.mass(idx[a], idx[b]) += w * loc.mass(a, b);
        }
      }
    }
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto i = static_cast<Eigen::Index>(v);
    op.stiffness(i, i) += 0.5 * g.degree(v) * g.alpha();
  }

  const double asym = (op.stiffness - op.stiffness.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, op.stiffness.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::EigensolverFailure, "stiffness matrix is not Hermitian");
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(op.mass);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "mass matrix is not positive definite");
  }
  return op;
}

std::vector<double> oracle_eigenvalues(const DiscretizedOperator& op, std::size_t count) {
  if (count > static_cast<std::size_t>(op.dimension())) {
    throw Error(ErrorCode::InvalidArgument, "requested more eigenvalues than unknowns");
  }
  std::vector<double> ev = op.real
                               ? pencil_eigenvalues<Eigen::MatrixXd>(op.stiffness.real(), op.mass.real())
                               : pencil_eigenvalues<Eigen::MatrixXcd>(op.stiffness, op.mass);
  std::sort(ev.begin(), ev.end());
  ev.resize(count);
  return ev;
}

Eigen::VectorXcd general_eigenvalues(const Eigen::MatrixXcd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "general eigensolve did not converge");
  }
  Eigen::VectorXcd ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), [](const std::complex<double>& x, const std::complex<double>& y) {
    return x.real() < y.real();
  });
  return ev;
}

ComparisonReport compare(const SpectrumReport& report, const std::vector<double>& oracle, double tol_rel,
                         double z_cut) {
  if (report.zmax < z_cut) {
    throw Error(ErrorCode::WindowMismatch, "spectrum report stops at " + std::to_string(report.zmax) +
                                               " below the cut " + std::to_string(z_cut));
  }
  std::vector<double> o = oracle;
  std::sort(o.begin(), o.end());
  if (o.empty() || o.back() < z_cut) {
    throw Error(ErrorCode::WindowMismatch, "oracle eigenvalues do not reach the cut " + std::to_string(z_cut));
  }

  ComparisonReport out;
  out.z_cut = z_cut;
  out.tol_rel = tol_rel;
  const std::vector<double> t = report.theory_values(z_cut);

  std::size_t i = 0, j = 0;
  while (i < t.size() && j < o.size()) {
    const double scale = std::max(1.0, std::abs(t[i]));
    if (std::abs(t[i] - o[j]) <= tol_rel * scale) {
      const double rel = std::abs(t[i] - o[j]) / scale;
      out.matched.push_back({t[i], o[j], rel});
      out.max_relative_mismatch = std::max(out.max_relative_mismatch, rel);
      ++i;
      ++j;
    } else if (o[j] < t[i]) {
      out.unmatched_oracle.push_back(o[j++]);
    } else {
      out.unmatched_theory.push_back(t[i++]);
    }
  }
  for (; i < t.size(); ++i) out.unmatched_theory.push_back(t[i]);
  for (; j < o.size() && o[j] <= z_cut; ++j) out.unmatched_oracle.push_back(o[j]);
  return out;
}

SpectrumReport refine_sigma0(SpectrumReport report, const ComparisonReport& comparison) {
  for (Sigma0Entry& e : report.sigma0) {
    if (e.status != Sigma0Status::Undetermined || e.mu > comparison.z_cut) continue;
    const double tol = comparison.tol_rel * std::max(1.0, std::abs(e.mu));
    const auto hits = std::count_if(comparison.unmatched_oracle.begin(), comparison.unmatched_oracle.end(),
                                    [&](double z) { return std::abs(z - e.mu) <= tol; });
    e.status = hits > 0 ? Sigma0Status::Confirmed : Sigma0Status::Refuted;
    e.reason = "oracle";
    e.multiplicity = static_cast<int>(hits);
  }
  return report;
}

double observed_order(double coarse_error, double fine_error) { return std::log2(coarse_error / fine_error); }

ConvergenceDiagnostic convergence_diagnostic(const std::vector<double>& coarse, const std::vector<double>& fine,
                                             int fine_elements) {
  ConvergenceDiagnostic d;
  d.coarse_elements = fine_elements / 2;
  d.fine_elements = fine_elements;
  const std::size_t n = std::min(coarse.size(), fine.size());
  for (std::size_t i = 0; i < n; ++i) {
    d.max_relative_shift =
        std::max(d.max_relative_shift, std::abs(coarse[i] - fine[i]) / std::max(1.0, std::abs(fine[i])));
  }
  d.estimated_relative_error = d.max_relative_shift / 3.0;
  return d;
}

}  // namespace qgs
