// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qgs/hill.hpp"
#include "qgs/oracle.hpp"
#include "qgs/spectrum.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace qgs;
using oracle::pi;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

GraphSpec interval() { return make_graph({"v1", "v2"}, {{"e", "v1", "v2", 0.0}}, 0.0, Potential::zero()); }
GraphSpec circle() { return make_graph({"v"}, {{"e", "v", "v", 0.0}}, 0.0, Potential::zero()); }
GraphSpec path3() {
  return make_graph({"v1", "v2", "v3"}, {{"e1", "v1", "v2", 0.0}, {"e2", "v2", "v3", 0.0}}, 0.0, Potential::zero());
}

/// Max absolute error of sorted values against expected ones; infinity on a size mismatch.
double max_abs_error(const std::vector<double>& got, const std::vector<double>& want) {
  if (got.size() != want.size()) return INFINITY;
  double e = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) e = std::max(e, std::abs(got[i] - want[i]));
  return e;
}

double kp_eta(double z) {
  return static_cast<double>(oracle::kp_eta(oracle::BigFloat(z), oracle::BigFloat(2)));
}

Outcome interval_reproduction() {
  const std::vector<double> got = quantum_spectrum(interval(), 100).theory_values(100);
  const double err = max_abs_error(got, oracle::neumann_interval(1.0, 100.0));
  return {err <= 1e-8, "max abs error " + fmt("%.2e", err)};
}

Outcome circle_reproduction() {
  const std::vector<double> got = quantum_spectrum(circle(), 200).theory_values(200);
  const double err = max_abs_error(got, oracle::circle(0.0, 200.0));
  return {err <= 1e-8, std::to_string(got.size()) + " values, max abs error " + fmt("%.2e", err)};
}

Outcome composite_graph() {
  const GraphSpec g = path3();
  const SpectrumReport r = quantum_spectrum(g, 100);
  std::vector<double> want;
  for (int k = 0; k <= 6; ++k) want.push_back(k * k * pi * pi / 4);
  const double err = max_abs_error(r.theory_values(100), want);
  const DiscretizedOperator op = discretize(g, 500);
  const ComparisonReport c = compare(r, oracle_eigenvalues(op, static_cast<std::size_t>(op.dimension())), 1e-2, 100);
  const bool ok = err <= 1e-8 && c.success() && c.unmatched_oracle.empty() && c.matched.size() == want.size();
  return {ok, "max abs error " + fmt("%.2e", err) + ", oracle max rel mismatch " +
                  fmt("%.2e", c.max_relative_mismatch) + ", " + std::to_string(c.unmatched_oracle.size()) +
                  " unmatched oracle"};
}

Outcome wronskian_suite() {
  gen::Rng rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Potential u = gen::potential(rng, 5, -20, 20);
    const double z = gen::uniform(rng, -50, 500);
    const double x = gen::uniform(rng, 0, 1);
    worst = std::max(worst, static_cast<double>(std::abs(fundamental_solutions(u, z).wronskian() - 1)));
    const FundamentalState st = fundamental_state(u, z, x);
    worst = std::max(worst, static_cast<double>(std::abs(st.sp * st.c - st.s * st.cp - 1)));
  }
  return {worst <= 1e-10, "max |s'c - sc' - 1| = " + fmt("%.2e", worst)};
}

Outcome band_interlacing() {
  gen::Rng rng(1005);
  double worst = 0.0;  // largest violation of any inequality
  std::size_t triples = 0;
  for (int i = 0; i < 20; ++i) {
    const Potential u = gen::potential(rng);
    for (double alpha : {-2.0, 0.0, 2.0}) {
      const BandStructure bs = band_edges(u, alpha, 400);
      for (std::size_t k = 0; k < bs.dirichlet.size() && k + 1 < bs.bands.size(); ++k) {
        const double a = bs.bands[k].lower, b = bs.bands[k].upper, mu = bs.dirichlet[k];
        const double next = bs.bands[k + 1].lower;
        const double slack = 1e-8 * std::max(1.0, std::abs(mu));
        if (!(a < b)) worst = std::max(worst, slack + (a - b));
        worst = std::max({worst, b - mu - slack, mu - next - slack});
        ++triples;
      }
    }
  }
  return {worst <= 0.0, std::to_string(triples) + " triples, worst excess " + fmt("%.2e", worst)};
}

Outcome gap_theorem_a() {
  gen::Rng rng(1006);
  std::size_t points = 0, violations = 0;
  for (int i = 0; i < 10; ++i) {
    const GraphSpec g = gen::graph(rng, Potential::zero(), 2.0);
    const SpectrumReport r = quantum_spectrum(g, 250);
    for (const SpectrumPoint& p : r.points) {
      ++points;
      bool inside = false;
      for (const Gap& gap : r.bands_used.open_gaps()) inside = inside || (p.z > gap.lower && p.z < gap.upper);
      // Independent: a point in a gap would have |eta| > 2 there.
      if (inside || std::abs(kp_eta(p.z)) > 2.0 + 1e-7) ++violations;
    }
  }
  return {violations == 0, std::to_string(points) + " points checked, " + std::to_string(violations) + " inside gaps"};
}

/// Components of [lo, hi] with the finite set `cut` removed.
int components(double lo, double hi, std::vector<double> cut, double tol) {
  int inner = 0;
  std::sort(cut.begin(), cut.end());
  double last = -INFINITY;
  for (double x : cut) {
    if (x > lo + tol && x < hi - tol && x - last > tol) {
      ++inner;
      last = x;
    }
  }
  return inner + 1;
}

Outcome gap_theorem_b() {
  const GraphSpec g = path3();
  const SpectrumReport r = quantum_spectrum(g, 260);
  std::vector<double> lambdas;
  for (const EigenvalueCluster& c : r.discrete) lambdas.push_back(c.value);
  const int laplacian = components(-1.0, 1.0, lambdas, 1e-9);
  const std::vector<double> mu = oracle::dirichlet_free(260);
  const std::vector<double> sigma = r.theory_values(260);
  std::string counts;
  bool ok = laplacian == 2 && mu.size() >= 5;
  for (std::size_t k = 0; k <= 3 && k + 1 < mu.size(); ++k) {
    const int n = components(mu[k], mu[k + 1], sigma, 1e-9 * mu[k + 1]);
    counts += (counts.empty() ? "" : " ") + std::to_string(n);
    ok = ok && n == laplacian;
  }
  const GapReport rep = gap_report(r);
  ok = ok && rep.counts_agree && rep.laplacian_gap_count == laplacian;
  return {ok, "operator gap counts [" + counts + "], Laplacian " + std::to_string(laplacian)};
}

Outcome kronig_penney_gaps() {
  const BandStructure bs = band_edges(Potential::zero(), 2.0, 400);
  const std::vector<Gap> gaps = bs.open_gaps();
  if (gaps.size() < 5) return {false, "only " + std::to_string(gaps.size()) + " open gaps below 400"};
  double worst = 0.0, narrowest = INFINITY;
  for (std::size_t k = 0; k < 5; ++k) {
    const Gap& g = gaps[k];
    // For U = 0 the gap opens at b_k = mu_k = ((k + 1) pi)^2, where eta = 2 (-1)^{k+1};
    // a_{k+1} solves eta = eta(mu_k) just above it.
    const double target = k % 2 == 0 ? -2.0 : 2.0;
    const double b = std::pow((k + 1) * pi, 2);
    const double a = oracle::kp_solve(b + 1e-9, std::pow((k + 1.5) * pi, 2), 2.0, target);
    const double width = a - b;
    narrowest = std::min(narrowest, g.width());
    worst = std::max(worst, std::abs(g.width() - width));
  }
  return {narrowest > 0.0 && worst <= 1e-8,
          "narrowest width " + fmt("%.4g", narrowest) + ", max width error " + fmt("%.2e", worst)};
}

Outcome lattice_proposition() {
  const SpectrumReport r = lattice_spectrum(2, Potential::zero(), 2.0, 100);
  bool ok = !r.intervals.empty();
  double edge_err = 0.0;
  for (const SpectrumInterval& iv : r.intervals) {
    edge_err = std::max(edge_err, std::abs(std::abs(kp_eta(iv.lower)) - 2.0));
    if (!iv.partial) edge_err = std::max(edge_err, std::abs(std::abs(kp_eta(iv.upper)) - 2.0));
    ok = ok && std::abs(kp_eta(0.5 * (iv.lower + iv.upper))) < 2.0;
  }
  std::vector<double> pp;
  for (const Sigma0Entry& e : r.sigma0) {
    if (e.status == Sigma0Status::Present) pp.push_back(e.mu);
  }
  const double pp_err = max_abs_error(pp, oracle::dirichlet_free(100));
  for (double mu : pp) {
    for (const SpectrumInterval& iv : r.intervals) ok = ok && !(mu > iv.lower + 1e-9 && mu < iv.upper - 1e-9);
    ok = ok && std::abs(kp_eta(mu)) >= 2.0 - 1e-9;
  }
  ok = ok && edge_err <= 1e-8 && pp_err <= 1e-8;
  return {ok, std::to_string(r.intervals.size()) + " bands, edge |eta|-2 error " + fmt("%.2e", edge_err) +
                  ", point spectrum error " + fmt("%.2e", pp_err)};
}

Outcome oracle_convergence() {
  bool ok = true;
  std::string detail;
  const std::vector<double> exact_interval{pi * pi, 4 * pi * pi, 9 * pi * pi};
  const std::vector<double> exact_circle{4 * pi * pi, 4 * pi * pi, 16 * pi * pi};
  for (int which = 0; which < 2; ++which) {
    const GraphSpec g = which == 0 ? interval() : circle();
    const std::vector<double>& exact = which == 0 ? exact_interval : exact_circle;
    std::vector<double> err;
    for (int n : {200, 400, 800}) {
      const std::vector<double> ev = oracle_eigenvalues(discretize(g, n), exact.size() + 1);
      double e = 0.0;
      for (std::size_t i = 0; i < exact.size(); ++i) e = std::max(e, std::abs(ev[i + 1] - exact[i]) / exact[i]);
      err.push_back(e);
    }
    const double p1 = observed_order(err[0], err[1]);
    const double p2 = observed_order(err[1], err[2]);
    ok = ok && p1 >= 1.6 && p1 <= 2.4 && p2 >= 1.6 && p2 <= 2.4;
    detail += std::string(which == 0 ? "interval" : "circle") + " orders " + fmt("%.3f", p1) + ", " + fmt("%.3f", p2) +
              (which == 0 ? "; " : "");
  }
  return {ok, detail};
}

Outcome weyl_equivalence() {
  gen::Rng rng(1011);
  int agree = 0, pairs = 0;
  std::string first_bad;
  while (pairs < 50) {
    const GraphSpec g = gen::graph(rng, gen::even_potential(rng, 3, -10, 10), gen::uniform(rng, -3, 3));
    const double zmax = 200;
    const SpectrumReport r = quantum_spectrum(g, zmax);
    double z = 0.0;
    if (pairs % 2 == 0) {
      std::vector<double> candidates;
      for (const SpectrumPoint& p : r.points) {
        if (std::abs(fundamental_solutions(g.potential(), p.z).s1) > 1e-6) candidates.push_back(p.z);
      }
      if (candidates.empty()) continue;
      z = candidates[static_cast<std::size_t>(gen::uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1))];
    } else {
      do {
        z = gen::uniform(rng, r.bands_used.floor, zmax);
      } while (std::abs(fundamental_solutions(g.potential(), z).s1) <= 1e-6);
    }
    const Eigen::VectorXd ev = spectral_condition_values(g, z);
    const bool singular = ev.cwiseAbs().minCoeff() <= 1e-7;
    bool near = false;
    for (const SpectrumPoint& p : r.points) near = near || std::abs(p.z - z) <= 1e-6;
    ++pairs;
    if (singular == near) {
      ++agree;
    } else if (first_bad.empty()) {
      first_bad = ", first disagreement at z = " + fmt("%.12g", z) + " min|eig| " + fmt("%.2e", ev.cwiseAbs().minCoeff());
    }
  }
  return {agree == pairs, std::to_string(agree) + "/" + std::to_string(pairs) + " pairs agree" + first_bad};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "interval reproduction", 1, interval_reproduction},
      {2, "circle reproduction", 1, circle_reproduction},
      {3, "composite graph", 30, composite_graph},
      {4, "Wronskian suite", 5, wronskian_suite},
      {5, "band interlacing", 60, band_interlacing},
      {6, "gap theorem (A)", 60, gap_theorem_a},
      {7, "gap theorem (B)", 5, gap_theorem_b},
      {8, "Kronig-Penney gap openness", 5, kronig_penney_gaps},
      {9, "lattice point spectrum", 5, lattice_proposition},
      {10, "oracle convergence", 60, oracle_convergence},
      {11, "Weyl-function equivalence", 60, weyl_equivalence},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = seconds < c.limit_seconds;
    const bool pass = o.ok && in_time;
    if (!pass) ++failed;
    std::printf("%s %2d %s: %s (%.3f s, limit %g s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds, c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
