#pragma once

// Edge problem -f'' + U f = z f on [0, 1] for piecewise-constant U: fundamental
// solutions, Dirichlet-to-Neumann map, the Kronig-Penney discriminant
// eta(z; alpha) = s'(1;z) + c(1;z) + alpha s(1;z) and its band structure.
//
// Propagators are exact per segment, so nothing here integrates an ODE. All
// products run in long double; the Wronskian of the returned data stays at 1
// to ~1e-13 even where the solutions grow like cosh(sqrt(|z - U|)).

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "qgs/potential.hpp"

namespace qgs {

using Real = long double;
using Matrix2r = Eigen::Matrix<Real, 2, 2>;

/// Boundary data of the fundamental solutions s, c at x = 1.
struct EdgeSolution {
  double z = 0.0;
  Real s1 = 0, sp1 = 0, c1 = 0, cp1 = 0;

  /// s'c - s c', identically 1.
  Real wronskian() const { return sp1 * c1 - s1 * cp1; }
};

/// s(x), s'(x), c(x), c'(x) at an interior point.
struct FundamentalState {
  Real s = 0, sp = 0, c = 0, cp = 0;
};

/// cos(sqrt(w)) and sin(sqrt(w))/sqrt(w) as entire functions of w.
Real cos_sqrt(Real w);
Real sinc_sqrt(Real w);

FundamentalState fundamental_state(const Potential& u, double z, double x);
EdgeSolution fundamental_solutions(const Potential& u, double z);

double discriminant(const Potential& u, double alpha, double z);

/// Maps (f'(0+), f(0+)) to (f'(1+), f(1+)) for the Kronig-Penney operator.
/// Trace equals discriminant(); determinant is 1.
Matrix2r transfer_matrix(const Potential& u, double alpha, double z);

/// Weyl function m(z) of the single edge, i.e. its Dirichlet-to-Neumann map
/// (f(0), f(1)) -> (f'(0), -f'(1)). Throws DirichletPole when |s(1;z)| <= 1e-12.
Matrix2r dtn_matrix(const Potential& u, double z);

/// Number of Dirichlet eigenvalues strictly below z (Sturm oscillation count
/// of s(.;z) on (0, 1), via a continuous Pruefer angle).
std::size_t dirichlet_count(const Potential& u, double z);

/// All Dirichlet eigenvalues mu_0 < mu_1 < ... that do not exceed zmax.
std::vector<double> dirichlet_eigenvalues(const Potential& u, double zmax);

/// The lowest `count` Dirichlet eigenvalues.
std::vector<double> first_dirichlet_eigenvalues(const Potential& u, std::size_t count);

struct Band {
  double lower = 0.0;  // a_k
  double upper = 0.0;  // b_k
  bool partial = false;  // b_k > zmax

  friend bool operator==(const Band&, const Band&) = default;
};

/// The gap (b_k, a_{k+1}) around mu_k. Closed gaps have upper - lower <= 1e-8.
struct Gap {
  std::size_t index = 0;  // k
  double lower = 0.0;
  double upper = 0.0;
  double mu = 0.0;
  bool closed = false;

  double width() const { return upper - lower; }

  friend bool operator==(const Gap&, const Gap&) = default;
};

struct BandStructure {
  double alpha = 0.0;
  double zmax = 0.0;
  /// Lowest energy searched; eta > 2 below it.
  double floor = 0.0;
  std::vector<double> dirichlet;  // mu_k <= zmax
  std::vector<Band> bands;        // every band with a_k <= zmax
  std::vector<Gap> gaps;          // gap around mu_k for each mu_k with b_k <= zmax

  std::vector<Gap> open_gaps() const;
  /// Whether z lies in some [a_k, b_k] (within tol).
  bool in_band(double z, double tol = 0.0) const;

  friend bool operator==(const BandStructure&, const BandStructure&) = default;
};

/// Solves eta(z; alpha) = +-2 bracketed between consecutive Dirichlet
/// eigenvalues. The result satisfies a_k < b_k <= mu_k <= a_{k+1}.
BandStructure band_edges(const Potential& u, double alpha, double zmax);

/// The unique z in band k with eta(z; alpha) = y, |y| <= 2. The endpoints
/// y = +-2 return the stored band edge.
double invert_discriminant(const BandStructure& bs, const Potential& u, double alpha,
                           std::size_t band, double y);

/// Solution of -f'' + U f = z f with f(0) = f0, f(1) = f1, evaluated at x.
/// At a Dirichlet eigenvalue the data must be compatible (f1 = f0 c(1;z)); the
/// s-component is then taken as zero. Otherwise throws DirichletPole.
std::complex<double> interpolate_edge_solution(const Potential& u, double z, std::complex<double> f0,
                                               std::complex<double> f1, double x);

/// Value and derivative of the same solution.
struct EdgeValue {
  std::complex<double> value;
  std::complex<double> derivative;
};
EdgeValue edge_solution_at(const Potential& u, double z, std::complex<double> f0,
                           std::complex<double> f1, double x);

}  // namespace qgs
