#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "qgs/error.hpp"
#include "qgs/oracle.hpp"
#include "qgs/spectrum.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace qgs;
using oracle::pi;

namespace {

GraphSpec interval(double alpha = 0.0) {
  return make_graph({"v1", "v2"}, {{"e", "v1", "v2", 0.0}}, alpha, Potential::zero());
}
GraphSpec circle(double beta = 0.0) { return make_graph({"v"}, {{"e", "v", "v", beta}}, 0.0, Potential::zero()); }
GraphSpec path3() {
  return make_graph({"v1", "v2", "v3"}, {{"e1", "v1", "v2", 0.0}, {"e2", "v2", "v3", 0.0}}, 0.0, Potential::zero());
}
GraphSpec step_loop() {
  return make_graph({"v"}, {{"e", "v", "v", 0.0}}, 1.0, Potential({0.0, 0.5, 1.0}, {0.0, 10.0}));
}

/// Textbook P1 matrices for -f'' on [0, 1] with N elements, nodes in order.
void textbook(int n, Eigen::MatrixXd& k, Eigen::MatrixXd& m) {
  const double h = 1.0 / n;
  k = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int el = 0; el < n; ++el) {
    k(el, el) += 1 / h;
    k(el + 1, el + 1) += 1 / h;
    k(el, el + 1) -= 1 / h;
    k(el + 1, el) -= 1 / h;
    m(el, el) += h / 3;
    m(el + 1, el + 1) += h / 3;
    m(el, el + 1) += h / 6;
    m(el + 1, el) += h / 6;
  }
}

SpectrumReport report_with_points(const std::vector<std::pair<double, int>>& pts, double zmax) {
  SpectrumReport r;
  r.zmax = zmax;
  for (auto [z, mult] : pts) r.points.push_back({z, mult, 0.0, 0, false});
  return r;
}

void check_rel(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() >= want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(got[i] - want[i]) <= tol * std::max(1.0, std::abs(want[i])));
  }
}

}  // namespace

TEST_SUITE("discretization") {
  TEST_CASE("single edge reproduces the textbook matrices") {
    const int n = 8;
    const DiscretizedOperator op = discretize(interval(), n);
    REQUIRE(op.dimension() == n + 1);
    CHECK(op.real);
    Eigen::MatrixXd k, m;
    textbook(n, k, m);
    // Node order along the edge: v1, interior 1..n-1, v2.
    auto global = [&](int node) -> Eigen::Index {
      if (node == 0) return 0;
      if (node == n) return 1;
      return op.interior_index(0, node);
    };
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        CAPTURE(a);
        CAPTURE(b);
        CHECK(std::abs(op.stiffness(global(a), global(b)) - k(a, b)) < 1e-12);
        CHECK(std::abs(op.mass(global(a), global(b)) - m(a, b)) < 1e-14);
      }
    }
  }

  TEST_CASE("vertex coupling adds deg * alpha / 2") {
    const DiscretizedOperator plain = discretize(path3(), 10);
    const GraphSpec g = path3().with_alpha(3.0);
    const DiscretizedOperator op = discretize(g, 10);
    for (std::size_t v = 0; v < 3; ++v) {
      const auto i = static_cast<Eigen::Index>(v);
      CHECK(std::abs(op.stiffness(i, i) - plain.stiffness(i, i) - 1.5 * g.degree(v)) < 1e-12);
    }
  }

  TEST_CASE("shared vertex collects both edges") {
    const int n = 10;
    const DiscretizedOperator op = discretize(path3(), n);
    CHECK(op.dimension() == 3 + 2 * (n - 1));
    CHECK(std::abs(op.stiffness(1, 1) - 2.0 * n) < 1e-12);
    CHECK(std::abs(op.stiffness(0, 0) - 1.0 * n) < 1e-12);
    CHECK(std::abs(op.mass(1, 1) - 2.0 / (3 * n)) < 1e-14);
    CHECK(std::abs(op.stiffness(1, op.interior_index(0, n - 1)) + 1.0 * n) < 1e-12);
    CHECK(std::abs(op.stiffness(1, op.interior_index(1, 1)) + 1.0 * n) < 1e-12);
  }

  TEST_CASE("flux enters as a phase at the terminal end") {
    const int n = 12;
    const double beta = 0.9;
    const DiscretizedOperator op = discretize(circle(beta), n);
    CHECK_FALSE(op.real);
    const std::complex<double> last = op.stiffness(0, op.interior_index(0, n - 1));
    const std::complex<double> first = op.stiffness(0, op.interior_index(0, 1));
    CHECK(std::abs(first + std::complex<double>(n, 0)) < 1e-12);
    CHECK(std::abs(last + static_cast<double>(n) * std::polar(1.0, beta)) < 1e-12);
  }

  TEST_CASE("stiffness is Hermitian and mass positive definite on random graphs") {
    gen::Rng rng(401);
    for (int i = 0; i < 20; ++i) {
      const GraphSpec g = gen::graph(rng, gen::even_potential(rng), gen::uniform(rng, -3, 3));
      const DiscretizedOperator op = discretize(g, 8);
      CHECK((op.stiffness - op.stiffness.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((op.mass - op.mass.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.mass, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      CHECK(op.real == g.flux_free());
    }
  }

  TEST_CASE("meshes below eight elements are rejected") {
    for (int n : {0, 1, 7}) {
      try {
        (void)discretize(interval(), n);
        FAIL("expected MeshTooCoarse");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MeshTooCoarse);
      }
    }
    CHECK_NOTHROW((void)discretize(interval(), 8));
  }

  TEST_CASE("asking for more eigenvalues than unknowns is an error") {
    const DiscretizedOperator op = discretize(interval(), 8);
    try {
      (void)oracle_eigenvalues(op, 10);
      FAIL("expected InvalidArgument");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }
}

TEST_SUITE("oracle eigenvalues") {
  TEST_CASE("single edge approaches the Neumann values") {
    const std::vector<double> ev = oracle_eigenvalues(discretize(interval(), 400), 4);
    check_rel(ev, oracle::neumann_interval(1.0, 100.0), 5e-3);
  }

  TEST_CASE("circle eigenvalues come in pairs") {
    const std::vector<double> ev = oracle_eigenvalues(discretize(circle(), 400), 5);
    check_rel(ev, {0.0, 4 * pi * pi, 4 * pi * pi, 16 * pi * pi, 16 * pi * pi}, 5e-3);
  }

  TEST_CASE("anti-periodic loop") {
    const std::vector<double> ev = oracle_eigenvalues(discretize(circle(pi), 300), 4);
    check_rel(ev, {pi * pi, pi * pi, 9 * pi * pi, 9 * pi * pi}, 5e-3);
  }

  TEST_CASE("Dirichlet values dominate Neumann values index-wise") {
    const int n = 100;
    const DiscretizedOperator op = discretize(interval(), n);
    const std::vector<double> neumann = oracle_eigenvalues(op, 10);
    // Drop the two vertex unknowns.
    const Eigen::Index m = n - 1;
    Eigen::MatrixXd k = op.stiffness.real().bottomRightCorner(m, m);
    Eigen::MatrixXd mass = op.mass.real().bottomRightCorner(m, m);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, mass, Eigen::EigenvaluesOnly);
    REQUIRE(es.info() == Eigen::Success);
    for (int i = 0; i < 10; ++i) {
      CAPTURE(i);
      CHECK(es.eigenvalues()(i) >= neumann[static_cast<std::size_t>(i)]);
    }
    check_rel({es.eigenvalues().data(), es.eigenvalues().data() + 3}, oracle::dirichlet_free(90.0), 5e-3);
  }

  TEST_CASE("potential shift moves every eigenvalue by the same amount") {
    const GraphSpec g = make_graph({"a", "b"}, {{"1", "a", "b", 0.0}, {"2", "b", "a", 0.4}}, 1.0,
                                   Potential({0.0, 0.3, 1.0}, {2.0, -1.0}));
    const GraphSpec shifted = make_graph({"a", "b"}, {{"1", "a", "b", 0.0}, {"2", "b", "a", 0.4}}, 1.0,
                                         Potential({0.0, 0.3, 1.0}, {7.0, 4.0}));
    const std::vector<double> a = oracle_eigenvalues(discretize(g, 40), 8);
    const std::vector<double> b = oracle_eigenvalues(discretize(shifted, 40), 8);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b[i] - a[i] - 5.0) < 1e-9);
  }

  TEST_CASE("observed order is about two against closed forms") {
    const std::vector<double> exact_interval = oracle::neumann_interval(1.0, 100.0);
    const std::vector<double> exact_circle{0.0, 4 * pi * pi, 4 * pi * pi, 16 * pi * pi};
    for (int which = 0; which < 2; ++which) {
      const GraphSpec g = which == 0 ? interval() : circle();
      const std::vector<double>& exact = which == 0 ? exact_interval : exact_circle;
      double err[3];
      int k = 0;
      for (int n : {50, 100, 200}) {
        const std::vector<double> ev = oracle_eigenvalues(discretize(g, n), exact.size());
        err[k] = 0.0;
        for (std::size_t i = 1; i < exact.size(); ++i) err[k] = std::max(err[k], std::abs(ev[i] - exact[i]) / exact[i]);
        ++k;
      }
      CAPTURE(which);
      CHECK(observed_order(err[0], err[1]) == doctest::Approx(2.0).epsilon(0.1));
      CHECK(observed_order(err[1], err[2]) == doctest::Approx(2.0).epsilon(0.1));
    }
  }

  TEST_CASE("error ratio is about four against a fine reference") {
    const GraphSpec g = step_loop();
    const std::vector<double> ref = oracle_eigenvalues(discretize(g, 800), 6);
    const std::vector<double> c = oracle_eigenvalues(discretize(g, 100), 6);
    const std::vector<double> f = oracle_eigenvalues(discretize(g, 200), 6);
    double ec = 0.0, ef = 0.0;
    for (std::size_t i = 1; i < ref.size(); ++i) {
      ec = std::max(ec, std::abs(c[i] - ref[i]) / std::abs(ref[i]));
      ef = std::max(ef, std::abs(f[i] - ref[i]) / std::abs(ref[i]));
    }
    CHECK(ec / ef == doctest::Approx(4.0).epsilon(0.2));
  }

  TEST_CASE("general eigenvalues of a triangular matrix") {
    Eigen::MatrixXcd a(3, 3);
    a << 3.0, 1.0, std::complex<double>(0, 2), 0.0, -1.0, 5.0, 0.0, 0.0, 2.0;
    const Eigen::VectorXcd ev = general_eigenvalues(a);
    CHECK(std::abs(ev(0) + 1.0) < 1e-12);
    CHECK(std::abs(ev(1) - 2.0) < 1e-12);
    CHECK(std::abs(ev(2) - 3.0) < 1e-12);
  }
}

TEST_SUITE("comparison") {
  TEST_CASE("matching respects tolerance and multiplicity") {
    const SpectrumReport r = report_with_points({{0.0, 1}, {10.0, 2}, {20.0, 1}}, 30.0);
    const ComparisonReport c = compare(r, {0.005, 10.05, 10.08, 19.0, 25.0, 40.0}, 1e-2, 30.0);
    REQUIRE(c.matched.size() == 3);
    CHECK(c.matched[0].oracle == 0.005);
    CHECK(c.matched[0].relative_error == doctest::Approx(0.005));
    CHECK(c.matched[2].relative_error == doctest::Approx(0.008));
    CHECK(c.max_relative_mismatch == doctest::Approx(0.008));
    CHECK(c.unmatched_theory == std::vector<double>{20.0});
    CHECK(c.unmatched_oracle == std::vector<double>{19.0, 25.0});
    CHECK_FALSE(c.success());
  }

  TEST_CASE("values above the cut are ignored") {
    const SpectrumReport r = report_with_points({{5.0, 1}, {50.0, 1}}, 60.0);
    const ComparisonReport c = compare(r, {5.0, 12.0, 48.0}, 1e-2, 20.0);
    CHECK(c.success());
    CHECK(c.matched.size() == 1);
    CHECK(c.unmatched_oracle == std::vector<double>{12.0});
  }

  TEST_CASE("window mismatch on either side") {
    const SpectrumReport r = report_with_points({{5.0, 1}}, 10.0);
    for (const auto& [oracle_values, cut] :
         std::vector<std::pair<std::vector<double>, double>>{{{5.0, 100.0}, 20.0}, {{5.0, 8.0}, 9.0}}) {
      try {
        (void)compare(r, oracle_values, 1e-2, cut);
        FAIL("expected WindowMismatch");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WindowMismatch);
      }
    }
  }

  TEST_CASE("path of three edges matches the finite element oracle") {
    const GraphSpec g = path3();
    const SpectrumReport r = quantum_spectrum(g, 100.0);
    const DiscretizedOperator op = discretize(g, 500);
    const ComparisonReport c = compare(r, oracle_eigenvalues(op, static_cast<std::size_t>(op.dimension())), 1e-2, 60.0);
    CHECK(c.success());
    CHECK(c.matched.size() == 5);
    CHECK(c.unmatched_oracle.empty());
    CHECK(c.max_relative_mismatch < 1e-3);
  }

  TEST_CASE("circle and anti-periodic loop including Sigma_0") {
    for (double beta : {0.0, pi}) {
      const GraphSpec g = circle(beta);
      const SpectrumReport r = quantum_spectrum(g, 100.0);
      const DiscretizedOperator op = discretize(g, 500);
      const ComparisonReport c =
          compare(r, oracle_eigenvalues(op, static_cast<std::size_t>(op.dimension())), 1e-2, 100.0);
      CAPTURE(beta);
      CHECK(c.success());
      CHECK(c.unmatched_oracle.empty());
      CHECK(c.matched.size() == (beta == 0.0 ? 3u : 4u));
    }
  }

  TEST_CASE("sample graphs with fluxes, loops and potentials") {
    std::vector<GraphSpec> graphs;
    graphs.push_back(step_loop());
    graphs.push_back(make_graph({"a", "b", "c"}, {{"ab", "a", "b", 0.7}, {"bc", "b", "c", 0.0}, {"ca", "c", "a", 0.0}},
                                1.0, Potential({0.0, 0.5, 1.0}, {0.0, 10.0})));
    graphs.push_back(make_graph({"v"}, {{"l1", "v", "v", 0.0}, {"l2", "v", "v", 0.0}}, 0.0, Potential::zero()));
    graphs.push_back(path3().with_alpha(-2.0));
    for (const GraphSpec& g : graphs) {
      const SpectrumReport r = quantum_spectrum(g, 80.0);
      const DiscretizedOperator op = discretize(g, 300);
      const ComparisonReport c = compare(r, oracle_eigenvalues(op, static_cast<std::size_t>(op.dimension())), 1e-2, 60.0);
      CAPTURE(g.edge_count());
      CHECK(c.success());
      CHECK(c.unmatched_oracle.empty());
    }
  }

  TEST_CASE("random graphs agree below the cut") {
    gen::Rng rng(409);
    const gen::GraphShape shape{3, 2, true, true};
    for (int i = 0; i < 8; ++i) {
      const GraphSpec g = gen::graph(rng, gen::even_potential(rng, 3, -10, 10), gen::uniform(rng, -2, 2), shape);
      const SpectrumReport base = quantum_spectrum(g, 80.0);
      const DiscretizedOperator op = discretize(g, 200);
      const std::vector<double> ev = oracle_eigenvalues(op, static_cast<std::size_t>(op.dimension()));
      const ComparisonReport c = compare(base, ev, 1e-2, 60.0);
      CAPTURE(i);
      CHECK(c.success());
      // Whatever the oracle sees beyond the theory must sit on an open Sigma_0 question.
      const SpectrumReport refined = refine_sigma0(base, c);
      int confirmed = 0;
      for (const Sigma0Entry& e : refined.sigma0) {
        if (e.status == Sigma0Status::Confirmed) confirmed += e.multiplicity;
      }
      CHECK(static_cast<std::size_t>(confirmed) == c.unmatched_oracle.size());
    }
  }
}

TEST_SUITE("Sigma_0 refinement") {
  TEST_CASE("undetermined entries are confirmed or refuted") {
    SpectrumReport r = report_with_points({{1.0, 1}}, 100.0);
    r.sigma0 = {{10.0, Sigma0Status::Undetermined, "no-dirichlet-supported-eigenfunction", 0},
                {20.0, Sigma0Status::Undetermined, "no-dirichlet-supported-eigenfunction", 0},
                {30.0, Sigma0Status::Present, "dirichlet-kernel", 1},
                {80.0, Sigma0Status::Undetermined, "no-dirichlet-supported-eigenfunction", 0}};
    const ComparisonReport c = compare(r, {1.0, 10.02, 10.05, 30.1, 60.0}, 1e-2, 50.0);
    CHECK(c.success());
    const SpectrumReport refined = refine_sigma0(r, c);
    CHECK(refined.sigma0[0].status == Sigma0Status::Confirmed);
    CHECK(refined.sigma0[0].multiplicity == 2);
    CHECK(refined.sigma0[0].reason == "oracle");
    CHECK(refined.sigma0[1].status == Sigma0Status::Refuted);
    CHECK(refined.sigma0[1].multiplicity == 0);
    CHECK(refined.sigma0[2] == r.sigma0[2]);
    CHECK(refined.sigma0[3] == r.sigma0[3]);
  }

  TEST_CASE("confirmed entries count as theory values") {
    SpectrumReport r = report_with_points({}, 100.0);
    r.sigma0 = {{10.0, Sigma0Status::Confirmed, "oracle", 2}, {20.0, Sigma0Status::Refuted, "oracle", 0}};
    CHECK(r.theory_values(50.0) == std::vector<double>{10.0, 10.0});
  }
}

TEST_SUITE("convergence diagnostic") {
  TEST_CASE("shift and estimate") {
    const ConvergenceDiagnostic d = convergence_diagnostic({0.0, 10.3, 40.0}, {0.0, 10.0, 40.6}, 400);
    CHECK(d.coarse_elements == 200);
    CHECK(d.fine_elements == 400);
    CHECK(d.max_relative_shift == doctest::Approx(0.03));
    CHECK(d.estimated_relative_error == doctest::Approx(0.01));
    CHECK(observed_order(4.0, 1.0) == doctest::Approx(2.0));
  }
}
