#include <doctest.h>

#include <cmath>
#include <random>

#include "graphblow/errors.hpp"
#include "graphblow/graph.hpp"
#include "graphblow/laplacian.hpp"
#include "graphblow/spectral.hpp"

using namespace graphblow;

namespace {

WeightedGraph scaled_weights(const WeightedGraph& g, double c) {
  GraphBuilder b;
  for (VertexId x = 0; x < g.num_vertices(); ++x) b.add_vertex(g.mu(x), g.label(x));
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (g.is_truncation_cut(x)) b.mark_truncation_cut(x);
    for (const auto& nb : g.neighbors(x)) {
      if (x < nb.vertex) b.add_edge(x, nb.vertex, c * nb.weight);
    }
  }
  return b.build();
}

// Smallest eigenvalue of the generalized problem L v = lambda v, computed
// from the unsymmetrized matrix with Eigen's general solver.
double oracle_lambda1(const Eigen::MatrixXd& L) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(L);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < L.rows(); ++i) best = std::min(best, es.eigenvalues()(i).real());
  return best;
}

}  // namespace

TEST_CASE("single interior vertex") {
  const auto g = path_graph(3);
  const auto dom = DomainDecomposition::whole(g);
  const auto eig = first_eigenpair(g, dom);
  CHECK(std::abs(eig.lambda1 - 2.0) <= 1e-12);
  CHECK(std::abs(eig.phi1(1) - 1.0) <= 1e-12);
  CHECK(eig.phi1(0) == 0.0);
  const auto spec = full_spectrum(g, dom);
  REQUIRE(spec.size() == 1u);
  CHECK(std::abs(spec[0] - 2.0) <= 1e-12);

  // Non-unit measure and weights: lambda1 = m(x0) / mu(x0).
  GraphBuilder b;
  b.add_vertex(1.0);
  b.add_vertex(2.5);
  b.add_vertex(1.0);
  b.add_edge(0, 1, 0.7);
  b.add_edge(1, 2, 1.9);
  b.mark_truncation_cut(0);
  b.mark_truncation_cut(2);
  const auto h = b.build();
  const auto e2 = first_eigenpair(h, DomainDecomposition::whole(h));
  CHECK(std::abs(e2.lambda1 - 2.6 / 2.5) <= 1e-12);
  CHECK(std::abs(2.5 * e2.phi1(1) - 1.0) <= 1e-12);
}

TEST_CASE("path(4) inner pair") {
  const auto g = path_graph(4);
  const auto dom = DomainDecomposition::whole(g);
  const auto eig = first_eigenpair(g, dom);
  CHECK(std::abs(eig.lambda1 - 1.0) <= 1e-10);
  CHECK(std::abs(eig.phi1(1) - 0.5) <= 1e-12);
  CHECK(std::abs(eig.phi1(2) - 0.5) <= 1e-12);
  const auto spec = full_spectrum(g, dom);
  REQUIRE(spec.size() == 2u);
  CHECK(std::abs(spec[0] - 1.0) <= 1e-10);
  CHECK(std::abs(spec[1] - 3.0) <= 1e-10);
}

TEST_CASE("weight scaling scales lambda1 and keeps phi1") {
  const auto g = random_connected_graph(60, 30, 4);
  const auto dom = DomainDecomposition::from_ball(g, 0, 3);
  const auto e1 = first_eigenpair(g, dom);
  const auto h = scaled_weights(g, 3.5);
  const auto e2 = first_eigenpair(h, DomainDecomposition::from_ball(h, 0, 3));
  CHECK(e2.lambda1 == doctest::Approx(3.5 * e1.lambda1).epsilon(1e-12));
  CHECK((e2.phi1_compact - e1.phi1_compact).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("eigenpair invariants on random domains") {
  std::mt19937_64 rng(2024);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = random_connected_graph(40 + 3 * seed, 20 + seed, seed);
    const auto dom = DomainDecomposition::from_ball(g, seed % 10, 2 + seed % 3);
    const auto eig = first_eigenpair(g, dom);
    const auto L = assemble_dirichlet_matrix(g, dom);

    CHECK(eig.lambda1 > 0.0);
    CHECK(eig.lambda1 == doctest::Approx(oracle_lambda1(L)).epsilon(1e-10));
    CHECK(eig.residual <= 1e-10 * eig.lambda1);

    double mass = 0.0;
    for (VertexId x : dom.interior()) {
      CHECK(eig.phi1(x) > 0.0);
      mass += g.mu(x) * eig.phi1(x);
    }
    CHECK(std::abs(mass - 1.0) <= 1e-12);

    const auto spec = full_spectrum(g, dom);
    CHECK(spec.size() == dom.interior_size());
    CHECK(spec.front() == doctest::Approx(eig.lambda1).epsilon(1e-10));
    for (std::size_t i = 1; i < spec.size(); ++i) CHECK(spec[i] >= spec[i - 1]);

    std::normal_distribution<double> nd;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd h(static_cast<Eigen::Index>(dom.interior_size()));
      for (auto& v : h) v = nd(rng);
      CHECK(eig.lambda1 <= rayleigh_quotient(g, dom, h) * (1.0 + 1e-12));
    }
    CHECK(rayleigh_quotient(g, dom, eig.phi1_compact) == doctest::Approx(eig.lambda1).epsilon(1e-12));
  }
}

TEST_CASE("iterative solver agrees with the dense solver and is start-independent") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = random_connected_graph(120, 60, seed);
    const auto dom = DomainDecomposition::from_ball(g, 0, 4);
    SpectralOptions dense;
    dense.method = EigenMethod::dense;
    SpectralOptions it1;
    it1.method = EigenMethod::iterative;
    SpectralOptions it2 = it1;
    it2.seed = 777 + seed;
    const auto ed = first_eigenpair(g, dom, dense);
    const auto ea = first_eigenpair(g, dom, it1);
    const auto eb = first_eigenpair(g, dom, it2);
    CHECK(ea.lambda1 == doctest::Approx(ed.lambda1).epsilon(1e-10));
    CHECK((ea.phi1_compact - ed.phi1_compact).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((ea.phi1_compact - eb.phi1_compact).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(ea.residual <= 1e-10 * ea.lambda1);
    CHECK(ea.iterations > 0u);
  }
}

TEST_CASE("automatic method switches above the dense cap") {
  const auto g = lattice_graph(2, 50);  // 2304 interior vertices
  const auto dom = DomainDecomposition::whole(g);
  REQUIRE(dom.interior_size() > kDenseCap);
  const auto eig = first_eigenpair(g, dom);
  // Dirichlet square of side 48 in Z^2: lambda1 = 2 (2 - 2 cos(pi / 49)).
  const double exact = 4.0 * (1.0 - std::cos(M_PI / 49.0));
  CHECK(eig.lambda1 == doctest::Approx(exact).epsilon(1e-9));
  CHECK(eig.iterations > 0u);
  CHECK_THROWS_AS(full_spectrum(g, dom), ValidationError);
  CHECK_THROWS_AS(assemble_dirichlet_matrix(g, dom), ValidationError);
}

TEST_CASE("closed-form path spectrum") {
  // Interior of path(n + 2) is a path of n vertices: lambda_k = 2 - 2 cos(k pi / (n + 1)).
  const std::size_t n = 30;
  const auto g = path_graph(n + 2);
  const auto spec = full_spectrum(g, DomainDecomposition::whole(g));
  REQUIRE(spec.size() == n);
  for (std::size_t k = 1; k <= n; ++k) {
    CHECK(std::abs(spec[k - 1] - (2.0 - 2.0 * std::cos(static_cast<double>(k) * M_PI / (n + 1)))) < 1e-12);
  }
}
