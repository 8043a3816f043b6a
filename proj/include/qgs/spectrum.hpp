#pragma once

// Spectrum of the quantum graph operator from the edge discriminant and the
// discrete magnetic Laplacian: outside the Dirichlet spectrum, z is in the
// spectrum iff eta(z; alpha) is an eigenvalue of 2 Delta, with equal
// multiplicities. The remaining part Sigma_0 sits inside the Dirichlet
// spectrum and is classified separately.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgs/graph.hpp"
#include "qgs/hill.hpp"

namespace qgs {

enum class Sigma0Status { Present, Absent, Undetermined, Confirmed, Refuted };

std::string_view to_string(Sigma0Status s);
Sigma0Status sigma0_status_from(std::string_view s);

struct Sigma0Entry {
  double mu = 0.0;
  Sigma0Status status = Sigma0Status::Undetermined;
  std::string reason;
  /// Number of independent Dirichlet-supported eigenfunctions found; 0 when
  /// not counted (lattice mode, undetermined entries).
  int multiplicity = 0;

  friend bool operator==(const Sigma0Entry&, const Sigma0Entry&) = default;
};

struct SpectrumPoint {
  double z = 0.0;
  int multiplicity = 0;
  double lambda = 0.0;  // source eigenvalue of Delta
  std::size_t band = 0;
  /// Another source eigenvalue maps to the same z (within 1e-9).
  bool coincident = false;

  friend bool operator==(const SpectrumPoint&, const SpectrumPoint&) = default;
};

struct SpectrumInterval {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t band = 0;
  bool partial = false;

  friend bool operator==(const SpectrumInterval&, const SpectrumInterval&) = default;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class SpectrumMode { Finite, Lattice };

struct SpectrumReport {
  SpectrumMode mode = SpectrumMode::Finite;
  int lattice_dimension = 0;
  double zmax = 0.0;
  BandStructure bands_used;
  std::vector<EigenvalueCluster> discrete;  // sigma(Delta); lattice mode leaves it empty
  std::vector<SpectrumPoint> points;        // finite mode, spectral type "disc"
  std::vector<SpectrumInterval> intervals;  // lattice mode, spectral type "ess"
  std::vector<Sigma0Entry> sigma0;
  std::vector<Interval> gaps;               // bounded gaps inside the window

  /// Sorted spectrum values with multiplicity expanded: Sigma points plus
  /// Present/Confirmed Sigma_0 entries, all <= z_cut.
  std::vector<double> theory_values(double z_cut) const;

  friend bool operator==(const SpectrumReport&, const SpectrumReport&) = default;
};

/// M(z) = (m11 + m22)/2 I + m12 Delta in the unweighted (Hermitian) picture.
/// Throws DirichletPole.
Eigen::MatrixXcd weyl_matrix(const GraphSpec& g, double z);

/// Eigenvalues of M(z) - alpha/2 I, ascending.
Eigen::VectorXd spectral_condition_values(const GraphSpec& g, double z);

/// Points at a Dirichlet eigenvalue carry the exact number of eigenfunctions
/// with nonzero vertex values; Dirichlet-supported ones go to sigma0.
SpectrumReport quantum_spectrum(const GraphSpec& g, double zmax);

/// Z^n lattice with zero fluxes: bands of the Kronig-Penney operator, plus the
/// whole Dirichlet spectrum as eigenvalues when n >= 2.
SpectrumReport lattice_spectrum(int n, const Potential& u, double alpha, double zmax);

/// Present where an explicit eigenfunction supported on Dirichlet modes
/// exists: f_e = c_e phi_k with phi_k(0) = phi_k(1) = 0 and coefficients in the
/// kernel of the vertex flux map
///   sum_{i(e)=v} c_e - s'(1; mu_k) sum_{t(e)=v} e^{i beta(e)} c_e = 0.
/// Undetermined otherwise.
std::vector<Sigma0Entry> sigma0_classify(const GraphSpec& g, const std::vector<double>& dirichlet);
std::vector<Sigma0Entry> sigma0_classify(const GraphSpec& g, double zmax);

struct EdgeBoundaryData {
  std::complex<double> f0;  // f_e(0) = h(i(e))
  std::complex<double> f1;  // f_e(1) = e^{-i beta} h(t(e))
};

class LiftedEigenfunction {
 public:
  LiftedEigenfunction(const GraphSpec& g, double z, Eigen::VectorXcd h, std::vector<EdgeBoundaryData> data);

  double z() const { return z_; }
  const Eigen::VectorXcd& vertex_values() const { return h_; }
  const std::vector<EdgeBoundaryData>& boundary_data() const { return data_; }

  EdgeValue evaluate(std::size_t edge, double x) const;

  /// max |e^{i beta} f_e(1) - h(t(e))| and |f_e(0) - h(i(e))| from the evaluator.
  double continuity_residual() const { return continuity_residual_; }
  /// max_v |f'(v) - alpha(v) f(v)| / max(1, |h|_inf).
  double flux_residual() const { return flux_residual_; }

 private:
  Potential potential_;
  double z_;
  Eigen::VectorXcd h_;
  std::vector<EdgeBoundaryData> data_;
  double continuity_residual_ = 0.0;
  double flux_residual_ = 0.0;

  void compute_residuals(const GraphSpec& g);
};

/// Throws NotAnEigenpair if (M(z) - alpha/2) h is not ~0 (relative 1e-7), or,
/// at a Dirichlet eigenvalue, if the lifted function misses the flux condition.
LiftedEigenfunction lift_eigenfunction(const GraphSpec& g, double z, const Eigen::VectorXcd& h);

struct BandGapCount {
  std::size_t band = 0;
  double mu_lower = 0.0;  // band sits in [mu_{k-1}, mu_k]
  double mu_upper = 0.0;
  int operator_gaps = 0;   // components of [a_k, b_k] minus the spectrum
  int laplacian_gaps = 0;  // components of [-1, 1] minus sigma(Delta)
};

struct GapReport {
  std::vector<BandGapCount> per_band;  // complete bands only
  bool counts_agree = true;
  /// No Sigma point lies strictly inside an open gap of P_alpha.
  bool kp_gaps_free = true;
  std::vector<double> kp_gap_violations;
  /// sigma(Delta) = [-1, 1] (lattice mode).
  bool laplacian_full_interval = false;
  int laplacian_gap_count = 0;
};

GapReport gap_report(const SpectrumReport& report);
GapReport gap_report(const GraphSpec& g, double zmax);

}  // namespace qgs
