#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "graphblow/errors.hpp"
#include "graphblow/graph.hpp"

using namespace graphblow;

namespace {

// All-pairs hop distances by Floyd-Warshall, independent of the BFS code.
std::vector<std::vector<std::size_t>> floyd(const WeightedGraph& g) {
  const std::size_t n = g.num_vertices();
  const std::size_t inf = n + 1;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (VertexId x = 0; x < n; ++x) {
    d[x][x] = 0;
    for (const auto& nb : g.neighbors(x)) d[x][nb.vertex] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

std::vector<WeightedGraph> small_suite() {
  std::vector<WeightedGraph> gs;
  gs.push_back(path_graph(7));
  gs.push_back(cycle_graph(9));
  gs.push_back(star_graph(6));
  gs.push_back(complete_graph(5));
  gs.push_back(lattice_graph(2, 6));
  gs.push_back(lattice_graph(3, 3));
  for (std::uint64_t s = 1; s <= 4; ++s) gs.push_back(random_connected_graph(40, 15, s));
  return gs;
}

}  // namespace

TEST_CASE("generator degrees and D_mu") {
  const auto p2 = path_graph(2);
  CHECK(p2.degree(0) == 1.0);
  CHECK(p2.degree(1) == 1.0);
  CHECK(p2.d_mu() == 1.0);

  const auto s4 = star_graph(4);
  CHECK(s4.degree(0) == 3.0);
  for (VertexId x = 1; x < 4; ++x) CHECK(s4.degree(x) == 1.0);
  CHECK(s4.d_mu() == 3.0);

  const auto l = lattice_graph(1, 21);
  CHECK(l.degree(0) == 1.0);
  CHECK(l.degree(20) == 1.0);
  for (VertexId x = 1; x < 20; ++x) CHECK(l.degree(x) == 2.0);
  CHECK(l.d_mu() == 2.0);
}

TEST_CASE("generator options and validation") {
  const auto g = path_graph(3, 2.0, 3.0);
  CHECK(g.mu(1) == 2.0);
  CHECK(g.weight(0, 1) == 3.0);
  CHECK(g.d_mu() == doctest::Approx(3.0));
  CHECK_THROWS_AS(path_graph(1), ValidationError);
  CHECK_THROWS_AS(cycle_graph(2), ValidationError);
  CHECK_THROWS_AS(lattice_graph(4, 3), ValidationError);
  CHECK_THROWS_AS(lattice_graph(2, 1), ValidationError);
  CHECK(lattice_graph(2, 5).num_vertices() == 25);
  CHECK(lattice_graph(3, 4).num_vertices() == 64);
  CHECK(lattice_graph(2, 5).num_edges() == 40);
  CHECK(complete_graph(6).num_edges() == 15);
}

TEST_CASE("truncation cuts sit on the outer faces") {
  const auto p = path_graph(5);
  CHECK(p.is_truncation_cut(0));
  CHECK(p.is_truncation_cut(4));
  CHECK_FALSE(p.is_truncation_cut(2));
  CHECK(truncation_radius(p, 2) == 2.0);
  const auto sq = lattice_graph(2, 5);
  CHECK(sq.is_truncation_cut(0));
  CHECK_FALSE(sq.is_truncation_cut(lattice_center(2, 5)));
  CHECK(truncation_radius(sq, lattice_center(2, 5)) == 2.0);
  CHECK(std::isinf(truncation_radius(cycle_graph(5), 0)));
  CHECK_FALSE(complete_graph(4).has_truncation_cut());
}

TEST_CASE("builder rejects invalid graphs") {
  {
    GraphBuilder b;
    b.add_vertex(1.0);
    b.add_vertex(1.0);
    CHECK_THROWS_WITH_AS(b.build(), "graph is disconnected", ValidationError);
  }
  {
    GraphBuilder b;
    b.add_vertex(0.0);
    CHECK_THROWS_AS(b.build(), ValidationError);
  }
  {
    GraphBuilder b;
    b.add_vertex(1.0);
    b.add_vertex(1.0);
    b.add_edge(0, 1, -1.0);
    CHECK_THROWS_AS(b.build(), ValidationError);
  }
  {
    GraphBuilder b;
    b.add_vertex(1.0);
    b.add_vertex(1.0);
    b.add_edge(0, 1, 1.0);
    b.add_edge(1, 0, 1.0);
    CHECK_THROWS_AS(b.build(), ValidationError);
  }
  {
    GraphBuilder b;
    b.add_vertex(1.0);
    b.add_edge(0, 0, 1.0);
    CHECK_THROWS_AS(b.build(), ValidationError);
  }
}

TEST_CASE("graph file round trip and errors") {
  const std::string text =
      "# two triangles sharing an edge\n"
      "v 10 1.5\nv 20 2\nv 30 0.5\nv 40 1\n"
      "b 40\n"
      "e 10 20 1\ne 20 30 2.5\ne 10 30 1\ne 30 40 0.25\n";
  std::istringstream in(text);
  const auto g = parse_graph(in);
  CHECK(g.num_vertices() == 4);
  CHECK(g.num_edges() == 4);
  CHECK(g.label(0) == 10);
  CHECK(g.find_label(30) == 2u);
  CHECK(g.is_truncation_cut(3));
  CHECK(g.weight(1, 2) == 2.5);
  CHECK(g.degree(2) == doctest::Approx(3.75));
  CHECK(g.d_mu() == doctest::Approx(3.75 / 0.5));

  std::ostringstream out;
  write_graph(out, g);
  std::istringstream again(out.str());
  const auto h = parse_graph(again);
  REQUIRE(h.num_vertices() == g.num_vertices());
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    CHECK(h.mu(x) == g.mu(x));
    CHECK(h.label(x) == g.label(x));
    CHECK(h.is_truncation_cut(x) == g.is_truncation_cut(x));
    for (VertexId y = 0; y < g.num_vertices(); ++y) CHECK(h.weight(x, y) == g.weight(x, y));
  }

  auto bad = [](const std::string& s) {
    std::istringstream is(s);
    return parse_graph(is);
  };
  CHECK_THROWS_AS(bad("v 1 1\nv 2 1\ne 1 2 1\nv 3 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("v 1 1\nv 1 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("v 1 1\nv 2 1\ne 1 2 1\ne 2 1 2\n"), ValidationError);
  CHECK_THROWS_AS(bad("v 1 1\nv 2 1\ne 1 2 1\ne 1 2 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("v 1 -1\n"), ValidationError);
  CHECK_THROWS_AS(bad("v 1 1\nv 2 1\ne 1 3 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("v 1 1\nv 2 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("x 1 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("v 1 abc\n"), ValidationError);
  CHECK_THROWS_AS(read_graph_file("/nonexistent/graph.txt"), IoError);
}

TEST_CASE("descriptors") {
  CHECK(looks_like_descriptor("path:5"));
  CHECK(looks_like_descriptor("lattice:2:11"));
  CHECK_FALSE(looks_like_descriptor("graph.txt"));
  CHECK(load_graph("lattice:2:11").num_vertices() == 121);
  CHECK(load_graph("random:30:5:7").num_vertices() == 30);
  CHECK_THROWS_AS(parse_graph_descriptor("path:x"), ValidationError);
  CHECK_THROWS_AS(parse_graph_descriptor("blob:3"), ValidationError);
  CHECK_THROWS_AS(load_graph("lattice:9:3"), ValidationError);
}

TEST_CASE("distances") {
  CHECK(graph_distance(path_graph(5), 0, 4) == 4);
  CHECK(graph_distance(cycle_graph(6), 0, 3) == 3);
  const auto g = random_connected_graph(20, 5, 3);
  for (VertexId x = 0; x < g.num_vertices(); ++x) CHECK(graph_distance(g, x, x) == 0);
  CHECK_THROWS_AS(graph_distance(g, 0, 99), ValidationError);
}

TEST_CASE("BFS matches Floyd-Warshall and satisfies the metric axioms") {
  for (const auto& g : small_suite()) {
    const auto d = floyd(g);
    const std::size_t n = g.num_vertices();
    for (VertexId x = 0; x < n; ++x) {
      const auto row = bfs_distances(g, x);
      for (VertexId y = 0; y < n; ++y) {
        REQUIRE(row[y] == d[x][y]);
        CHECK(d[x][y] == d[y][x]);
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) REQUIRE(d[i][k] <= d[i][j] + d[j][k]);
  }
}

TEST_CASE("ball volumes") {
  const auto p = path_graph(5);
  CHECK(ball_volume(p, 2, 1) == 3.0);
  CHECK(ball_volume(p, 2, 0.5) == 1.0);
  const auto r = random_connected_graph(25, 10, 11);
  for (VertexId x = 0; x < r.num_vertices(); ++x) CHECK(ball_volume(r, x, 0) == r.mu(x));

  const auto sq = lattice_graph(2, 11);
  const VertexId c = lattice_center(2, 11);
  // l1 ball count by coordinates: |dx| + |dy| <= 2.
  int count = 0;
  for (int dx = -5; dx <= 5; ++dx)
    for (int dy = -5; dy <= 5; ++dy)
      if (std::abs(dx) + std::abs(dy) <= 2) ++count;
  CHECK(ball_volume(sq, c, 2) == count);
  CHECK(count == 13);
  CHECK(ball(sq, c, 2).size() == 13u);

  for (const auto& g : small_suite()) {
    double prev = 0.0;
    for (double rad = 0.0; rad <= 12.0; rad += 0.5) {
      const double v = ball_volume(g, 0, rad);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(prev == doctest::Approx(g.total_volume()).epsilon(1e-14));
  }
}

TEST_CASE("D_mu cache matches a fresh computation and weights are symmetric") {
  for (const auto& g : small_suite()) {
    CHECK(g.recompute_d_mu() == g.d_mu());
    double dmax = 0.0;
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
      double m = 0.0;
      for (const auto& nb : g.neighbors(x)) {
        m += nb.weight;
        CHECK(g.weight(nb.vertex, x) == nb.weight);
      }
      CHECK(m == doctest::Approx(g.degree(x)).epsilon(1e-15));
      dmax = std::max(dmax, m / g.mu(x));
    }
    CHECK(dmax == doctest::Approx(g.d_mu()).epsilon(1e-15));
  }
}

TEST_CASE("volume growth fits") {
  {
    const auto g = lattice_graph(1, 2001);
    const auto est = estimate_volume_growth(g, lattice_center(1, 2001), 100);
    CHECK(std::abs(est.m_degree - 1.0) <= 0.05);
    for (double r : est.radii) CHECK(ball_volume(g, est.center, r) <= est.c0 * std::pow(r, est.m_degree));
  }
  {
    const auto g = lattice_graph(2, 201);
    const auto est = estimate_volume_growth(g, lattice_center(2, 201), 40);
    CHECK(std::abs(est.m_degree - 2.0) <= 0.1);
    CHECK(est.radii.size() == 40u);
    for (double r : est.radii) CHECK(ball_volume(g, est.center, r) <= est.c0 * std::pow(r, est.m_degree));
  }
  CHECK_THROWS_WITH_AS(estimate_volume_growth(complete_graph(50), 0, 5),
                       doctest::Contains("truncation too small"), ValidationError);
  CHECK_THROWS_AS(estimate_volume_growth(lattice_graph(1, 101), 50, 3), ValidationError);
}
