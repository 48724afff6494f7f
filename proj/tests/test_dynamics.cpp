#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "graphblow/dynamics.hpp"
#include "graphblow/errors.hpp"
#include "graphblow/graph.hpp"
#include "graphblow/heat_kernel.hpp"
#include "graphblow/laplacian.hpp"
#include "graphblow/nonlinearity.hpp"
#include "graphblow/spectral.hpp"

using namespace graphblow;

namespace {

GraphFunction delta(const WeightedGraph& g, VertexId v, double c) {
  std::vector<double> a(g.num_vertices(), 0.0);
  a[v] = c;
  return GraphFunction(std::move(a));
}

SimulationConfig dirichlet_config(const WeightedGraph& g, GraphFunction a) {
  SimulationConfig cfg;
  cfg.problem = Problem::dirichlet(DomainDecomposition::whole(g));
  cfg.initial = std::move(a);
  return cfg;
}

}  // namespace

TEST_CASE("right-hand side examples") {
  const auto g = path_graph(3);
  const auto dir = Problem::dirichlet(DomainDecomposition::whole(g));
  const auto rhs = step_rhs(g, dir, Nonlinearity::power(1.0), delta(g, 1, 3.0));
  CHECK(rhs(1) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(rhs(0) == 0.0);
  CHECK(rhs(2) == 0.0);

  const auto zero = step_rhs(g, dir, Nonlinearity::expm1(), GraphFunction::constant(3, 0.0));
  for (VertexId x = 0; x < 3; ++x) CHECK(zero(x) == 0.0);

  const auto c = cycle_graph(7);
  for (const auto& nl : {Nonlinearity::power(0.5), Nonlinearity::exp(), Nonlinearity::linear()}) {
    const auto r = step_rhs(c, Problem::cauchy(), nl, GraphFunction::constant(7, 1.7));
    for (VertexId x = 0; x < 7; ++x) CHECK(r(x) == doctest::Approx(nl(1.7)).epsilon(1e-14));
  }

  CHECK_THROWS_AS(step_rhs(g, dir, Nonlinearity::linear(), GraphFunction::constant(3, 1.0)), ValidationError);
  CHECK_THROWS_AS(step_rhs(g, Problem::cauchy(), Nonlinearity::linear(), GraphFunction::constant(4, 1.0)),
                  ValidationError);
  CHECK_THROWS_AS(step_rhs(c, dir, Nonlinearity::linear(), GraphFunction::constant(7, 0.0)), ValidationError);
}

TEST_CASE("single vertex above the equilibrium blows up at ln(3)/2") {
  const auto g = path_graph(3);
  const auto rec = integrate(g, dirichlet_config(g, delta(g, 1, 3.0)), Nonlinearity::power(1.0));
  REQUIRE(rec.verdict == Verdict::blowup);
  REQUIRE(rec.T_est.has_value());
  const double exact = 0.5 * std::log(3.0);
  CHECK(std::abs(*rec.T_est - exact) <= 1e-3 * exact);
  const auto& last = rec.samples.back();
  CHECK(last.u_linf >= 1e12);
  CHECK(last.dt <= 1e-14 * (1.0 + 1e-9));
  REQUIRE(rec.T_tail.has_value());
  CHECK(*rec.T_tail == doctest::Approx(1e-12).epsilon(1e-12));
  CHECK_FALSE(rec.nonfinite);
  for (std::size_t i = 1; i < rec.samples.size(); ++i) CHECK(rec.samples[i].t > rec.samples[i - 1].t);
}

TEST_CASE("single vertex below the equilibrium decays") {
  const auto g = path_graph(3);
  auto cfg = dirichlet_config(g, delta(g, 1, 1.0));
  cfg.t_max = 100.0;
  const auto rec = integrate(g, cfg, Nonlinearity::power(1.0));
  CHECK(rec.verdict == Verdict::bounded);
  CHECK_FALSE(rec.T_est.has_value());
  CHECK(rec.samples.back().u_linf < 1e-9);
  // Exact solution of u' = u (u - 2), u(0) = 1: u = 2 / (1 + e^(2t)).
  for (const auto& s : rec.samples) {
    CHECK(std::abs(s.u_max - 2.0 / (1.0 + std::exp(2.0 * s.t))) <= 1e-6);
  }
}

TEST_CASE("horizon verdict and the equilibrium") {
  const auto g = path_graph(3);
  auto cfg = dirichlet_config(g, delta(g, 1, 2.0));
  cfg.detect_steady_state = false;
  cfg.t_max = 10.0;
  const auto rec = integrate(g, cfg, Nonlinearity::power(1.0));
  CHECK(rec.verdict == Verdict::horizon);
  CHECK(rec.samples.back().t == doctest::Approx(10.0).epsilon(1e-14));
  for (const auto& s : rec.samples) CHECK(std::abs(s.u_max - 2.0) <= 1e-6);

  cfg.detect_steady_state = true;
  CHECK(integrate(g, cfg, Nonlinearity::power(1.0)).verdict == Verdict::bounded);
}

TEST_CASE("configuration validation") {
  const auto g = path_graph(5);
  const auto ok = dirichlet_config(g, delta(g, 2, 1.0));
  const auto nl = Nonlinearity::power(1.0);
  CHECK_NOTHROW(validate_config(g, ok));

  auto bad = ok;
  bad.initial = GraphFunction::constant(5, 0.0);
  CHECK_THROWS_WITH_AS(integrate(g, bad, nl), "initial data is trivial", ValidationError);
  // Nonzero only on the boundary is trivial on the Dirichlet domain.
  bad.initial = delta(g, 0, 1.0);
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad = ok;
  bad.initial = delta(g, 2, -1.0);
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad.initial = delta(g, 2, std::nan(""));
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad.initial = GraphFunction::constant(4, 1.0);
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad = ok;
  bad.dt_init = 1.0;
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad = ok;
  bad.dt_min = 0.0;
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad = ok;
  bad.u_blow = 1e5;
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad = ok;
  bad.t_max = -1.0;
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad = ok;
  bad.local_tol = 0.0;
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad = ok;
  bad.record_stride = 0;
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);
  bad = ok;
  bad.truncation_radius = 1;
  CHECK_THROWS_AS(validate_config(g, bad), ValidationError);

  SimulationConfig cauchy;
  cauchy.initial = delta(g, 2, 1.0);
  cauchy.truncation_radius = 1;
  CHECK_THROWS_AS(validate_config(g, cauchy), ValidationError);  // no source
  cauchy.source_vertex = 2;
  CHECK_NOTHROW(validate_config(g, cauchy));
  cauchy.truncation_radius = 3;
  CHECK_THROWS_AS(validate_config(g, cauchy), ValidationError);  // ball leaves the graph

  const auto wild = Nonlinearity::custom(
      "pole", [](double u) { return u > 10.0 ? std::nan("") : u * u; }, {true, true, true, true});
  CHECK_THROWS_AS(integrate(g, ok, wild), ValidationError);
}

TEST_CASE("overflow before detection is reported as blow-up") {
  const auto g = path_graph(3);
  auto cfg = dirichlet_config(g, delta(g, 1, 5.0));
  cfg.u_blow = 1e300;
  const auto rec = integrate(g, cfg, Nonlinearity::exp());
  CHECK(rec.verdict == Verdict::blowup);
  CHECK(rec.nonfinite);
  REQUIRE(rec.T_est.has_value());
  // u' = -2u + e^u from u = 5 blows up shortly after e^-5.
  CHECK(*rec.T_est > 0.0);
  CHECK(*rec.T_est < 0.01);
}

TEST_CASE("functional J examples") {
  const auto g = path_graph(4);
  const auto dom = DomainDecomposition::whole(g);
  const auto eig = first_eigenpair(g, dom);
  const GraphFunction u(std::vector<double>{0.0, 2.0, 4.0, 0.0});
  CHECK(functional_J(g, dom, eig, u) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(functional_J(g, dom, eig, GraphFunction::constant(4, 0.0)) == 0.0);
  CHECK_THROWS_AS(functional_J(g, dom, eig, GraphFunction::constant(4, 1.0)), ValidationError);
  CHECK_THROWS_AS(functional_J(g, dom, eig, GraphFunction::constant(5, 0.0)), ValidationError);

  // J(0) is the initial mass.
  const auto rec = integrate(g, dirichlet_config(g, u), Nonlinearity::power(1.0));
  CHECK(rec.samples.front().J == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("functional J_T examples") {
  const auto g = path_graph(2);
  const HeatKernelEvaluator ev(g, HeatMethod::dense);
  const GraphFunction u(std::vector<double>{1.0, 0.0});
  CHECK(functional_JT(ev, 0, 3.0, 2.0, u) == doctest::Approx((1.0 + std::exp(-2.0)) / 2.0).epsilon(1e-12));
  CHECK(functional_JT(ev, 0, 3.0, 0.0, GraphFunction::constant(2, 0.0)) == 0.0);

  const auto r = random_connected_graph(30, 15, 9);
  const HeatKernelEvaluator er(r);
  CHECK(functional_JT(er, 4, 2.0, 0.5, GraphFunction::constant(30, 2.5)) == doctest::Approx(2.5).epsilon(1e-10));
  CHECK_THROWS_AS(functional_JT(ev, 0, 3.0, 3.0, u), ValidationError);
  CHECK_THROWS_AS(functional_JT(ev, 0, 3.0, -0.1, u), ValidationError);
}

TEST_CASE("J_T is recorded along Cauchy runs") {
  const auto g = cycle_graph(12);
  SimulationConfig cfg;
  cfg.initial = delta(g, 0, 0.5);
  cfg.source_vertex = 0;
  cfg.jt_horizon = 1.0;
  cfg.t_max = 0.5;
  cfg.sample_interval = 0.1;
  const auto rec = integrate(g, cfg, Nonlinearity::power(1.0));
  const HeatKernelEvaluator ev(g);
  // At s = 0, J_T(0) = mu(nu) p(T, nu, nu) a(nu).
  CHECK(rec.samples.front().J ==
        doctest::Approx(functional_JT(ev, 0, 1.0, 0.0, cfg.initial)).epsilon(1e-12));
  for (const auto& s : rec.samples) CHECK(std::isfinite(s.J));
}

TEST_CASE("J differential inequality") {
  const auto g = path_graph(3);
  auto cfg = dirichlet_config(g, delta(g, 1, 3.0));
  const auto nl = Nonlinearity::power(1.0);
  const auto rec = integrate(g, cfg, nl);
  REQUIRE(rec.eigen.has_value());
  const auto rep = check_J_inequality(rec, *rec.eigen, nl);
  CHECK(rep.intervals >= 10u);
  CHECK(rep.max_normalized_violation <= 1e-3);

  // Slowing the clock halves J' and must be flagged.
  auto slow = rec;
  for (auto& s : slow.samples) {
    s.t *= 2.0;
    s.t_lo *= 2.0;
  }
  CHECK(check_J_inequality(slow, *slow.eigen, nl).max_normalized_violation > 0.3);

  // Linear f: J' = (1 - lambda1) J exactly.
  const auto p = path_graph(8);
  auto lin = dirichlet_config(p, delta(p, 3, 1.0));
  lin.t_max = 2.0;
  lin.sample_interval = 0.05;
  lin.detect_steady_state = false;
  const auto lr = integrate(p, lin, Nonlinearity::linear());
  const auto lrep = check_J_inequality(lr, *lr.eigen, Nonlinearity::linear());
  CHECK(lrep.max_normalized_violation <= 1e-3);
  const double j0 = lr.samples.front().J;
  for (const auto& s : lr.samples) {
    CHECK(std::abs(s.J - j0 * std::exp((1.0 - lr.eigen->lambda1) * s.t)) <= 1e-7);
  }

  // Blow-up along a richer domain.
  const auto q = random_connected_graph(40, 20, 5);
  auto rc = dirichlet_config(q, delta(q, 0, 40.0));
  rc.problem = Problem::dirichlet(DomainDecomposition::from_ball(q, 0, 2));
  const auto rr = integrate(q, rc, nl);
  CHECK(check_J_inequality(rr, *rr.eigen, nl).max_normalized_violation <= 1e-3);

  auto few = cfg;
  few.t_max = 0.1;
  few.sample_interval = 0.05;
  const auto fr = integrate(g, few, nl);
  CHECK_THROWS_AS(check_J_inequality(fr, *fr.eigen, nl), ValidationError);
}

TEST_CASE("comparison principle") {
  const auto g = path_graph(6);
  std::vector<double> base(6, 0.0);
  base[1] = 0.4;
  base[2] = 1.0;
  base[3] = 0.7;
  std::vector<double> big = base;
  for (auto& v : big) v *= 1.5;
  const auto nl = Nonlinearity::power(1.0);
  auto cfg = dirichlet_config(g, GraphFunction(base));
  cfg.t_max = 3.0;
  cfg.sample_interval = 0.05;
  cfg.record_states = true;
  cfg.detect_steady_state = false;
  auto upper_cfg = cfg;
  upper_cfg.initial = GraphFunction(big);

  const auto lower = integrate(g, cfg, nl);
  const auto upper = integrate(g, upper_cfg, nl);
  CHECK(check_comparison(upper, lower) <= 1e-6);
  CHECK(std::abs(check_comparison(lower, lower)) <= 1e-8 * 10.0);
  // Swapping the roles exposes a genuine gap.
  CHECK(check_comparison(lower, upper) > 0.1);

  auto coarse = upper_cfg;
  coarse.sample_interval = 0.1;
  CHECK_THROWS_AS(check_comparison(integrate(g, coarse, nl), lower), ValidationError);
  auto bare = cfg;
  bare.record_states = false;
  CHECK_THROWS_AS(check_comparison(upper, integrate(g, bare, nl)), ValidationError);

  // A blowing-up upper run stops early; the shared window is still ordered.
  auto hot = upper_cfg;
  std::vector<double> hot_data = big;
  for (auto& v : hot_data) v *= 10.0;
  hot.initial = GraphFunction(hot_data);
  const auto hr = integrate(g, hot, nl);
  CHECK(hr.verdict == Verdict::blowup);
  CHECK(check_comparison(hr, lower) <= 1e-6);
}

TEST_CASE("positivity, exponential barrier and Jensen direction") {
  const auto nl = Nonlinearity::power(1.0);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto g = random_connected_graph(40, 20, seed);
    const auto dom = DomainDecomposition::from_ball(g, 0, 2);
    std::vector<double> a(g.num_vertices(), 0.0);
    for (std::size_t i = 0; i < dom.interior_size(); ++i) {
      a[dom.interior()[i]] = i % 3 == 0 ? 0.0 : 0.2 * static_cast<double>(1 + i % 5);
    }
    SimulationConfig cfg;
    cfg.problem = Problem::dirichlet(dom);
    cfg.initial = GraphFunction(a);
    cfg.t_max = 2.0;
    cfg.record_states = true;
    const auto rec = integrate(g, cfg, nl);
    CHECK_FALSE(rec.integrity_violation);
    REQUIRE(rec.states.size() == rec.samples.size());
    const double dmu = g.d_mu();
    for (std::size_t k = 0; k < rec.samples.size(); ++k) {
      const auto& s = rec.samples[k];
      CHECK(s.u_min >= -10.0 * cfg.local_tol);
      double lhs = 0.0;
      for (std::size_t i = 0; i < rec.state_vertices.size(); ++i) {
        const VertexId z = rec.state_vertices[i];
        const double u = rec.states[k][i];
        if (a[z] > 0.0) CHECK(u >= a[z] * std::exp(-dmu * s.t) - 10.0 * cfg.local_tol);
        lhs += g.mu(z) * rec.eigen->phi1_compact[static_cast<Eigen::Index>(i)] * nl(u);
      }
      const double rhs = nl(s.J);
      CHECK(lhs >= rhs - 1e-10 * (1.0 + std::abs(lhs) + std::abs(rhs)));
    }
  }
}

TEST_CASE("halving the tolerance converges") {
  const auto g = path_graph(5);
  std::vector<double> a{0.0, 2.0, 6.0, 3.0, 0.0};
  const auto nl = Nonlinearity::power(1.0);
  std::vector<double> T;
  for (const double tol : {1e-5, 5e-6, 2.5e-6, 1.25e-6}) {
    auto cfg = dirichlet_config(g, GraphFunction(a));
    cfg.local_tol = tol;
    const auto rec = integrate(g, cfg, nl);
    REQUIRE(rec.verdict == Verdict::blowup);
    T.push_back(*rec.T_est);
  }
  for (std::size_t i = 2; i < T.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(T[i] - T[i - 1]) < std::abs(T[i - 1] - T[i - 2]));
  }
}

TEST_CASE("truncated Cauchy runs are stable under doubling the radius") {
  const auto g = lattice_graph(1, 201);
  const VertexId nu = 100;
  const auto nl = Nonlinearity::power(0.5);
  const auto run = [&](std::size_t radius) {
    SimulationConfig cfg;
    cfg.initial = delta(g, nu, 0.5);
    cfg.source_vertex = nu;
    cfg.truncation_radius = radius;
    cfg.t_max = 3.0;
    cfg.sample_interval = 0.25;
    cfg.detect_steady_state = false;
    return integrate(g, cfg, nl);
  };
  const auto r1 = run(20);
  const auto r2 = run(40);
  REQUIRE(r1.samples.size() == r2.samples.size());
  CHECK(r1.state_vertices.size() == 41u);
  for (std::size_t k = 0; k < r1.samples.size(); ++k) {
    CHECK(r1.samples[k].t == r2.samples[k].t);
    CHECK(std::abs(r1.samples[k].u_source - r2.samples[k].u_source) <= 1e-6);
    // Zero closure under-estimates: the larger ball dominates.
    CHECK(r2.samples[k].u_source >= r1.samples[k].u_source - 1e-9);
  }
  const auto p = resolve_problem(g, SimulationConfig{.problem = {},
                                                     .truncation_radius = 20,
                                                     .initial = delta(g, nu, 0.5),
                                                     .source_vertex = nu});
  CHECK(p.kind == ProblemKind::dirichlet);
  REQUIRE(p.domain.has_value());
  CHECK(p.domain->interior_size() == 41u);
}

TEST_CASE("sample-interval runs land on the interval") {
  const auto g = path_graph(5);
  auto cfg = dirichlet_config(g, delta(g, 2, 0.5));
  cfg.t_max = 1.0;
  cfg.sample_interval = 0.125;
  cfg.detect_steady_state = false;
  const auto rec = integrate(g, cfg, Nonlinearity::power(1.0));
  REQUIRE(rec.samples.size() == 9u);
  for (std::size_t k = 0; k < rec.samples.size(); ++k) {
    CHECK(rec.samples[k].t == doctest::Approx(0.125 * static_cast<double>(k)).epsilon(1e-14));
  }
}

TEST_CASE("trajectory CSV layout") {
  const auto g = path_graph(3);
  auto cfg = dirichlet_config(g, delta(g, 1, 3.0));
  cfg.record_stride = 50;
  const auto rec = integrate(g, cfg, Nonlinearity::power(1.0));
  std::ostringstream os;
  write_trajectory_csv(os, rec);
  std::istringstream is(os.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  REQUIRE(lines.size() == rec.samples.size() + 2);
  CHECK(lines.front() == "t,dt,u_min,u_max,u_linf,J");
  CHECK(lines.back().rfind("# verdict=blowup,T_est=0.549", 0) == 0);
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 5);
  }

  TrajectoryRecord empty;
  empty.verdict = Verdict::horizon;
  std::ostringstream e;
  write_trajectory_csv(e, empty);
  CHECK(e.str() == "t,dt,u_min,u_max,u_linf,J\n# verdict=horizon,T_est=NA\n");
}
