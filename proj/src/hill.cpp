#include "qgs/hill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bisection.hpp"
#include "qgs/error.hpp"

namespace qgs {

namespace {

constexpr Real kSeriesCutoff = 1e-6L;
constexpr double kPoleThreshold = 1e-12;
constexpr double kClosedGapWidth = 1e-8;
// T(mu_k) = +-I to this accuracy means the gap around mu_k is closed.
constexpr Real kMonodromyIdentityTolerance = 1e-9L;
constexpr int kMaxScanDepth = 64;
constexpr Real kPi = std::numbers::pi_v<Real>;

Real wrap_angle(Real x) { return std::remainder(x, 2 * kPi); }

/// Propagator of (f, f') across a segment of length len where z - U = q.
Matrix2r segment_propagator(Real q, Real len) {
  const Real w = q * len * len;
  const Real c = cos_sqrt(w);
  const Real s = len * sinc_sqrt(w);
  Matrix2r p;
  p << c, s, -q * s, c;
  return p;
}

/// Columns are (c, c') and (s, s') at x.
Matrix2r propagate_to(const Potential& u, double z, double x) {
  Matrix2r phi = Matrix2r::Identity();
  const auto& bp = u.breakpoints();
  for (std::size_t j = 0; j < u.segment_count(); ++j) {
    if (x <= bp[j]) break;
    const Real len = static_cast<Real>(std::min(bp[j + 1], x)) - static_cast<Real>(bp[j]);
    const Real q = static_cast<Real>(z) - static_cast<Real>(u.values()[j]);
    phi = segment_propagator(q, len) * phi;
  }
  return phi;
}

Real s_at_one(const Potential& u, double z) { return propagate_to(u, z, 1.0)(0, 1); }

bool monodromy_is_scalar(const Potential& u, double alpha, double mu) {
  const EdgeSolution e = fundamental_solutions(u, mu);
  const Real scale = std::max<Real>(1, std::sqrt(std::abs(static_cast<Real>(mu))));
  const Real diag = std::abs(e.sp1 - e.c1);
  const Real off = std::abs(e.cp1 + alpha * e.c1) / scale;
  return diag <= kMonodromyIdentityTolerance && off <= kMonodromyIdentityTolerance;
}

struct ScanState {
  const Potential& u;
  std::vector<double>& roots;
};

void isolate_roots(ScanState& st, double a, double b, std::size_t na, std::size_t nb, int depth) {
  if (nb <= na) return;
  if (depth > kMaxScanDepth) {
    throw Error(ErrorCode::ScanResolutionExceeded,
                "cannot separate Dirichlet eigenvalues in [" + std::to_string(a) + ", " +
                    std::to_string(b) + "]");
  }
  if (nb - na == 1) {
    const Real sa = s_at_one(st.u, a);
    const Real sb = s_at_one(st.u, b);
    if (sa == 0) {
      st.roots.push_back(a);
      return;
    }
    if ((sa < 0) != (sb < 0) && sb != 0) {
      st.roots.push_back(detail::bisect_root([&](double z) { return s_at_one(st.u, z); }, a, b));
      return;
    }
  }
  const double mid = a + 0.5 * (b - a);
  if (mid <= a || mid >= b) {
    throw Error(ErrorCode::ScanResolutionExceeded,
                "Dirichlet scan interval collapsed near " + std::to_string(a));
  }
  const std::size_t nm = dirichlet_count(st.u, mid);
  isolate_roots(st, a, mid, na, nm, depth + 1);
  isolate_roots(st, mid, b, nm, nb, depth + 1);
}

/// Dirichlet eigenvalues in [lowest possible, hi), scanned on the asymptotic
/// lattice ((k + 1/2) pi)^2 + mean(U) and refined by halving.
std::vector<double> dirichlet_below(const Potential& u, double hi) {
  std::vector<double> roots;
  const double lo = u.min() - 1.0;
  if (!(hi > lo)) return roots;

  std::vector<double> grid{lo};
  const double mean = u.mean();
  for (int k = 0;; ++k) {
    const double g = std::pow((k + 0.5) * std::numbers::pi, 2) + mean;
    if (g >= hi) break;
    if (g > grid.back()) grid.push_back(g);
  }
  grid.push_back(hi);

  ScanState st{u, roots};
  std::size_t prev = dirichlet_count(u, lo);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const std::size_t next = dirichlet_count(u, grid[i + 1]);
    isolate_roots(st, grid[i], grid[i + 1], prev, next, 0);
    prev = next;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

Real cos_sqrt(Real w) {
  if (w > kSeriesCutoff) return std::cos(std::sqrt(w));
  if (w < -kSeriesCutoff) return std::cosh(std::sqrt(-w));
  // sum_{n<6} (-w)^n / (2n)!
  Real term = 1, sum = 1;
  for (int n = 1; n < 6; ++n) {
    term *= -w / static_cast<Real>((2 * n - 1) * (2 * n));
    sum += term;
  }
  return sum;
}

Real sinc_sqrt(Real w) {
  if (w > kSeriesCutoff) {
    const Real r = std::sqrt(w);
    return std::sin(r) / r;
  }
  if (w < -kSeriesCutoff) {
    const Real r = std::sqrt(-w);
    return std::sinh(r) / r;
  }
  // sum_{n<6} (-w)^n / (2n+1)!
  Real term = 1, sum = 1;
  for (int n = 1; n < 6; ++n) {
    term *= -w / static_cast<Real>((2 * n) * (2 * n + 1));
    sum += term;
  }
  return sum;
}

FundamentalState fundamental_state(const Potential& u, double z, double x) {
  const Matrix2r phi = propagate_to(u, z, x);
  return {phi(0, 1), phi(1, 1), phi(0, 0), phi(1, 0)};
}

EdgeSolution fundamental_solutions(const Potential& u, double z) {
  const Matrix2r phi = propagate_to(u, z, 1.0);
  EdgeSolution e;
  e.z = z;
  e.c1 = phi(0, 0);
  e.cp1 = phi(1, 0);
  e.s1 = phi(0, 1);
  e.sp1 = phi(1, 1);
  return e;
}

Matrix2r transfer_matrix(const Potential& u, double alpha, double z) {
  const EdgeSolution e = fundamental_solutions(u, z);
  const Real a = alpha;
  Matrix2r t;
  t << e.sp1 + a * e.s1, e.cp1 + a * e.c1, e.s1, e.c1;
  return t;
}

double discriminant(const Potential& u, double alpha, double z) {
  return static_cast<double>(transfer_matrix(u, alpha, z).trace());
}

Matrix2r dtn_matrix(const Potential& u, double z) {
  const EdgeSolution e = fundamental_solutions(u, z);
  if (std::abs(e.s1) <= kPoleThreshold) {
    throw Error(ErrorCode::DirichletPole, "s(1;z) vanishes at z = " + std::to_string(z));
  }
  Matrix2r m;
  m << -e.c1, 1, 1, -e.sp1;
  return m / e.s1;
}

std::size_t dirichlet_count(const Potential& u, double z) {
  // f = r sin(phi), f' = r cos(phi), phi(0) = 0 for s. phi crosses multiples
  // of pi only upwards, so zeros of s on (0, 1) are the multiples below phi(1).
  Real phi = 0;
  const auto& bp = u.breakpoints();
  for (std::size_t j = 0; j < u.segment_count(); ++j) {
    const Real len = static_cast<Real>(bp[j + 1]) - static_cast<Real>(bp[j]);
    const Real q = static_cast<Real>(z) - static_cast<Real>(u.values()[j]);
    if (q > 0) {
      // Scaled angle theta (f ~ sin theta, f'/k ~ cos theta) advances by k*len.
      const Real k = std::sqrt(q);
      Real theta = phi + wrap_angle(std::atan2(k * std::sin(phi), std::cos(phi)) - phi);
      theta += k * len;
      phi = theta + wrap_angle(std::atan2(std::sin(theta), k * std::cos(theta)) - theta);
    } else {
      // Non-oscillatory segment: phi moves by less than pi.
      const Matrix2r p = segment_propagator(q, len);
      const Real f = p(0, 0) * std::sin(phi) + p(0, 1) * std::cos(phi);
      const Real fp = p(1, 0) * std::sin(phi) + p(1, 1) * std::cos(phi);
      phi += wrap_angle(std::atan2(f, fp) - phi);
    }
  }
  const Real n = std::ceil(phi / kPi) - 1;
  return n > 0 ? static_cast<std::size_t>(n) : 0;
}

std::vector<double> dirichlet_eigenvalues(const Potential& u, double zmax) {
  std::vector<double> mus = dirichlet_below(u, std::nextafter(zmax, INFINITY));
  while (!mus.empty() && mus.back() > zmax) mus.pop_back();
  return mus;
}

std::vector<double> first_dirichlet_eigenvalues(const Potential& u, std::size_t count) {
  if (count == 0) return {};
  // Comparison with the constant potential max(U): mu_{n-1} <= (n pi)^2 + max(U).
  const double hi = std::pow(static_cast<double>(count) * std::numbers::pi, 2) + u.max() + 1.0;
  std::vector<double> mus = dirichlet_below(u, hi);
  if (mus.size() < count) {
    throw Error(ErrorCode::ScanResolutionExceeded, "found fewer Dirichlet eigenvalues than expected");
  }
  mus.resize(count);
  return mus;
}

std::vector<Gap> BandStructure::open_gaps() const {
  std::vector<Gap> out;
  for (const Gap& g : gaps) {
    if (!g.closed) out.push_back(g);
  }
  return out;
}

bool BandStructure::in_band(double z, double tol) const {
  return std::any_of(bands.begin(), bands.end(),
                     [&](const Band& b) { return z >= b.lower - tol && z <= b.upper + tol; });
}

BandStructure band_edges(const Potential& u, double alpha, double zmax) {
  BandStructure bs;
  bs.alpha = alpha;
  bs.zmax = zmax;
  bs.dirichlet = dirichlet_eigenvalues(u, zmax);

  // Bands 0..K+1 need mu_0..mu_{K+1}, two past the last one inside the window.
  const std::size_t last_band = bs.dirichlet.size() + 1;
  const std::vector<double> mus = first_dirichlet_eigenvalues(u, last_band + 1);

  const auto eta = [&](double z) { return discriminant(u, alpha, z); };

  // eta -> +inf as z -> -inf; step down until strictly above the band.
  double floor = u.min() - 1.0;
  for (double step = 1.0; eta(floor) <= 2.0; step *= 2.0) {
    floor -= step;
    if (step > 1e12) {
      throw Error(ErrorCode::ScanResolutionExceeded, "no lower bound for the lowest band");
    }
  }
  bs.floor = floor;

  std::vector<bool> closed(mus.size());
  for (std::size_t k = 0; k < mus.size(); ++k) closed[k] = monodromy_is_scalar(u, alpha, mus[k]);

  std::vector<Band> all(last_band + 1);
  for (std::size_t k = 0; k <= last_band; ++k) {
    const double lo = k == 0 ? floor : mus[k - 1];
    const double hi = mus[k];
    // Even bands run from eta = 2 down to -2, odd bands the other way.
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    Band& b = all[k];
    if (k > 0 && closed[k - 1]) {
      b.lower = lo;
    } else {
      b.lower = detail::bisect_transition([&](double z) { return sign * eta(z) >= 2.0; }, lo, hi);
    }
    if (closed[k]) {
      b.upper = hi;
    } else {
      b.upper = detail::bisect_transition([&](double z) { return sign * eta(z) > -2.0; }, b.lower, hi);
    }
    b.partial = b.upper > zmax;
  }

  for (std::size_t k = 0; k <= last_band; ++k) {
    if (all[k].lower <= zmax) bs.bands.push_back(all[k]);
  }
  for (std::size_t k = 0; k < last_band; ++k) {
    if (all[k].upper > zmax) break;
    Gap g;
    g.index = k;
    g.mu = mus[k];
    g.lower = all[k].upper;
    g.upper = all[k + 1].lower;
    g.closed = closed[k] || g.upper - g.lower <= kClosedGapWidth;
    bs.gaps.push_back(g);
  }
  return bs;
}

double invert_discriminant(const BandStructure& bs, const Potential& u, double alpha, std::size_t band,
                           double y) {
  if (band >= bs.bands.size()) {
    throw Error(ErrorCode::BandIndexOutOfRange,
                "band " + std::to_string(band) + " of " + std::to_string(bs.bands.size()));
  }
  if (!(std::abs(y) <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "discriminant value outside [-2, 2]");
  }
  const Band& b = bs.bands[band];
  const double sign = band % 2 == 0 ? 1.0 : -1.0;
  // sign * eta decreases from 2 at a_k to -2 at b_k.
  const double target = sign * y;
  if (target == 2.0) return b.lower;
  if (target == -2.0) return b.upper;
  return detail::bisect_transition([&](double z) { return sign * discriminant(u, alpha, z) > target; },
                                   b.lower, b.upper);
}

EdgeValue edge_solution_at(const Potential& u, double z, std::complex<double> f0, std::complex<double> f1,
                           double x) {
  const EdgeSolution e = fundamental_solutions(u, z);
  const FundamentalState st = fundamental_state(u, z, x);
  const std::complex<Real> a0(f0.real(), f0.imag());
  const std::complex<Real> a1(f1.real(), f1.imag());
  const std::complex<Real> numerator = a1 - a0 * e.c1;
  std::complex<Real> coef = 0;
  if (std::abs(e.s1) <= kPoleThreshold) {
    const Real scale = std::max<Real>({1, std::abs(a0), std::abs(a1)});
    if (std::abs(numerator) > 1e-8L * scale) {
      throw Error(ErrorCode::DirichletPole,
                  "boundary data incompatible with Dirichlet eigenvalue at z = " + std::to_string(z));
    }
  } else {
    coef = numerator / e.s1;
  }
  const std::complex<Real> value = coef * st.s + a0 * st.c;
  const std::complex<Real> deriv = coef * st.sp + a0 * st.cp;
  return {{static_cast<double>(value.real()), static_cast<double>(value.imag())},
          {static_cast<double>(deriv.real()), static_cast<double>(deriv.imag())}};
}

std::complex<double> interpolate_edge_solution(const Potential& u, double z, std::complex<double> f0,
                                               std::complex<double> f1, double x) {
  return edge_solution_at(u, z, f0, f1, x).value;
}

}  // namespace qgs
