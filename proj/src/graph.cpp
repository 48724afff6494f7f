#include "graphblow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "graphblow/errors.hpp"
#include "graphblow/text.hpp"

namespace graphblow {

// ---------------------------------------------------------------------------
// WeightedGraph

bool WeightedGraph::has_truncation_cut() const {
  return std::any_of(cut_.begin(), cut_.end(), [](char c) { return c != 0; });
}

double WeightedGraph::weight(VertexId x, VertexId y) const {
  for (const auto& nb : neighbors(x)) {
    if (nb.vertex == y) return nb.weight;
  }
  return 0.0;
}

std::optional<VertexId> WeightedGraph::find_label(std::int64_t label) const {
  // Generated graphs use label == index; try that first.
  if (label >= 0 && static_cast<std::size_t>(label) < labels_.size() &&
      labels_[static_cast<std::size_t>(label)] == label) {
    return static_cast<VertexId>(label);
  }
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<VertexId>(it - labels_.begin());
}

double WeightedGraph::recompute_d_mu() const {
  double best = 0.0;
  for (VertexId x = 0; x < num_vertices(); ++x) {
    double m = 0.0;
    for (const auto& nb : neighbors(x)) m += nb.weight;
    best = std::max(best, m / mu_[x]);
  }
  return best;
}

void WeightedGraph::check_vertex(VertexId x) const {
  if (x >= num_vertices()) {
    throw ValidationError("unknown vertex id " + std::to_string(x));
  }
}

// ---------------------------------------------------------------------------
// GraphBuilder

VertexId GraphBuilder::add_vertex(double mu) {
  return add_vertex(mu, static_cast<std::int64_t>(mu_.size()));
}

VertexId GraphBuilder::add_vertex(double mu, std::int64_t label) {
  mu_.push_back(mu);
  labels_.push_back(label);
  cut_.push_back(0);
  return mu_.size() - 1;
}

void GraphBuilder::add_edge(VertexId x, VertexId y, double weight) {
  edges_.push_back({x, y, weight});
}

void GraphBuilder::mark_truncation_cut(VertexId x) {
  if (x >= mu_.size()) throw ValidationError("unknown vertex id " + std::to_string(x));
  cut_[x] = 1;
}

WeightedGraph GraphBuilder::build() const {
  const std::size_t n = mu_.size();
  if (n == 0) throw ValidationError("graph has no vertices");
  for (std::size_t x = 0; x < n; ++x) {
    if (!(mu_[x] > 0.0) || !std::isfinite(mu_[x])) {
      throw ValidationError("vertex measure must be positive and finite (vertex " +
                            std::to_string(labels_[x]) + ")");
    }
  }

  std::vector<std::size_t> count(n, 0);
  {
    std::vector<std::pair<VertexId, VertexId>> keys;
    keys.reserve(edges_.size());
    for (const auto& e : edges_) {
      if (e.x >= n || e.y >= n) throw ValidationError("edge references unknown vertex");
      if (e.x == e.y) {
        throw ValidationError("self-loop at vertex " + std::to_string(labels_[e.x]));
      }
      if (!(e.w > 0.0) || !std::isfinite(e.w)) {
        throw ValidationError("edge weight must be positive and finite");
      }
      keys.emplace_back(std::min(e.x, e.y), std::max(e.x, e.y));
      ++count[e.x];
      ++count[e.y];
    }
    std::sort(keys.begin(), keys.end());
    const auto dup = std::adjacent_find(keys.begin(), keys.end());
    if (dup != keys.end()) {
      throw ValidationError("duplicate edge " + std::to_string(labels_[dup->first]) + " " +
                            std::to_string(labels_[dup->second]));
    }
  }

  WeightedGraph g;
  g.mu_ = mu_;
  g.labels_ = labels_;
  g.cut_ = cut_;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t x = 0; x < n; ++x) g.offsets_[x + 1] = g.offsets_[x] + count[x];
  g.targets_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : edges_) {
    g.targets_[fill[e.x]++] = {e.y, e.w};
    g.targets_[fill[e.y]++] = {e.x, e.w};
  }
  for (std::size_t x = 0; x < n; ++x) {
    std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[x]),
              g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[x + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
  }

  g.degree_.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& nb : g.neighbors(x)) g.degree_[x] += nb.weight;
  }
  g.d_mu_ = 0.0;
  g.total_volume_ = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    g.d_mu_ = std::max(g.d_mu_, g.degree_[x] / g.mu_[x]);
    g.total_volume_ += g.mu_[x];
  }

  const auto dist = bfs_distances(g, 0);
  if (std::any_of(dist.begin(), dist.end(), [](std::size_t d) { return d == kUnreachable; })) {
    throw ValidationError("graph is disconnected");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

void require_at_least(std::size_t value, std::size_t min, const char* what) {
  if (value < min) {
    throw ValidationError(std::string(what) + " must be >= " + std::to_string(min));
  }
}

}  // namespace

WeightedGraph path_graph(std::size_t n, double mu, double omega) {
  return lattice_graph(1, n, mu, omega);
}

WeightedGraph cycle_graph(std::size_t n, double mu, double omega) {
  require_at_least(n, 3, "cycle length");
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_vertex(mu);
  for (std::size_t i = 0; i < n; ++i) b.add_edge(i, (i + 1) % n, omega);
  return b.build();
}

WeightedGraph lattice_graph(std::size_t dim, std::size_t side, double mu, double omega) {
  if (dim < 1 || dim > 3) throw ValidationError("lattice dimension must be 1, 2 or 3");
  require_at_least(side, 2, "lattice side");
  std::size_t n = 1;
  for (std::size_t d = 0; d < dim; ++d) n *= side;
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_vertex(mu);
  std::size_t stride = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t coord = (i / stride) % side;
      if (coord + 1 < side) b.add_edge(i, i + stride, omega);
      if (coord == 0 || coord + 1 == side) b.mark_truncation_cut(i);
    }
    stride *= side;
  }
  return b.build();
}

WeightedGraph star_graph(std::size_t n, double mu, double omega) {
  require_at_least(n, 2, "star size");
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_vertex(mu);
  for (std::size_t i = 1; i < n; ++i) b.add_edge(0, i, omega);
  return b.build();
}

WeightedGraph complete_graph(std::size_t n, double mu, double omega) {
  require_at_least(n, 2, "complete graph size");
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_vertex(mu);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) b.add_edge(i, j, omega);
  }
  return b.build();
}

WeightedGraph random_connected_graph(std::size_t n, std::size_t extra_edges, std::uint64_t seed) {
  require_at_least(n, 2, "random graph size");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(0.5, 2.0);
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_vertex(value(rng));
  std::vector<std::pair<VertexId, VertexId>> present;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    const auto j = pick(rng);
    b.add_edge(j, i, value(rng));
    present.emplace_back(j, i);
  }
  const std::size_t max_edges = n * (n - 1) / 2;
  const std::size_t target = std::min(max_edges, present.size() + extra_edges);
  std::sort(present.begin(), present.end());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (present.size() < target) {
    auto x = pick(rng);
    auto y = pick(rng);
    if (x == y) continue;
    if (x > y) std::swap(x, y);
    const auto key = std::make_pair(x, y);
    const auto it = std::lower_bound(present.begin(), present.end(), key);
    if (it != present.end() && *it == key) continue;
    present.insert(it, key);
    b.add_edge(x, y, value(rng));
  }
  return b.build();
}

VertexId lattice_center(std::size_t dim, std::size_t side) {
  VertexId idx = 0;
  std::size_t stride = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    idx += (side / 2) * stride;
    stride *= side;
  }
  return idx;
}

bool looks_like_descriptor(std::string_view text) {
  for (const char* prefix : {"path:", "cycle:", "lattice:", "star:", "complete:", "random:", "file:"}) {
    if (text.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

GraphDescriptor parse_graph_descriptor(std::string_view text) {
  const auto parts = split(text, ':');
  const auto kind = parts.front();
  GraphDescriptor d;
  auto expect = [&](std::size_t count) {
    if (parts.size() != count) {
      throw ValidationError("malformed graph descriptor '" + std::string(text) + "'");
    }
  };
  if (kind == "file") {
    if (parts.size() < 2) throw ValidationError("malformed graph descriptor");
    d.kind = GraphKind::file;
    d.file = std::string(text.substr(5));
    return d;
  }
  if (kind == "path" || kind == "cycle" || kind == "star" || kind == "complete") {
    expect(2);
    d.kind = kind == "path"    ? GraphKind::path
             : kind == "cycle" ? GraphKind::cycle
             : kind == "star"  ? GraphKind::star
                               : GraphKind::complete;
    d.n = parse_size(parts[1], "vertex count");
  } else if (kind == "lattice") {
    expect(3);
    d.kind = GraphKind::lattice;
    d.dim = parse_size(parts[1], "lattice dimension");
    d.side = parse_size(parts[2], "lattice side");
  } else if (kind == "random") {
    expect(4);
    d.kind = GraphKind::random;
    d.n = parse_size(parts[1], "vertex count");
    d.extra_edges = parse_size(parts[2], "extra edge count");
    d.seed = parse_size(parts[3], "seed");
  } else {
    throw ValidationError("unknown graph kind '" + std::string(kind) + "'");
  }
  return d;
}

WeightedGraph build_graph(const GraphDescriptor& d) {
  switch (d.kind) {
    case GraphKind::path:
      return path_graph(d.n, d.mu, d.omega);
    case GraphKind::cycle:
      return cycle_graph(d.n, d.mu, d.omega);
    case GraphKind::lattice:
      return lattice_graph(d.dim, d.side, d.mu, d.omega);
    case GraphKind::star:
      return star_graph(d.n, d.mu, d.omega);
    case GraphKind::complete:
      return complete_graph(d.n, d.mu, d.omega);
    case GraphKind::random:
      return random_connected_graph(d.n, d.extra_edges, d.seed);
    case GraphKind::file:
      return read_graph_file(d.file);
  }
  throw ValidationError("unknown graph kind");
}

WeightedGraph load_graph(std::string_view spec) {
  if (looks_like_descriptor(spec)) return build_graph(parse_graph_descriptor(spec));
  return read_graph_file(std::string(spec));
}

// ---------------------------------------------------------------------------
// File format

WeightedGraph parse_graph(std::istream& in) {
  GraphBuilder b;
  std::unordered_map<std::int64_t, VertexId> index;
  std::map<std::pair<VertexId, VertexId>, double> seen;
  bool in_edges = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> ValidationError {
    return ValidationError("graph file line " + std::to_string(lineno) + ": " + msg);
  };
  auto lookup = [&](std::string_view tok) {
    const auto id = parse_int(tok, "vertex id");
    const auto it = index.find(id);
    if (it == index.end()) throw fail("unknown vertex " + std::string(tok));
    return it->second;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tok = split_whitespace(body);
    try {
      if (tok[0] == "v") {
        if (tok.size() != 3) throw fail("expected 'v <id> <mu>'");
        if (in_edges) throw fail("vertex record after edge records");
        const auto id = parse_int(tok[1], "vertex id");
        if (index.count(id)) throw fail("duplicate vertex " + std::string(tok[1]));
        const double mu = parse_double(tok[2], "measure");
        if (!(mu > 0.0)) throw fail("measure must be > 0");
        index.emplace(id, b.add_vertex(mu, id));
      } else if (tok[0] == "b") {
        if (tok.size() != 2) throw fail("expected 'b <id>'");
        b.mark_truncation_cut(lookup(tok[1]));
      } else if (tok[0] == "e") {
        if (tok.size() != 4) throw fail("expected 'e <id1> <id2> <weight>'");
        in_edges = true;
        const auto x = lookup(tok[1]);
        const auto y = lookup(tok[2]);
        const double w = parse_double(tok[3], "weight");
        if (!(w > 0.0)) throw fail("weight must be > 0");
        if (x == y) throw fail("self-loop");
        const auto key = std::make_pair(std::min(x, y), std::max(x, y));
        const auto it = seen.find(key);
        if (it != seen.end()) {
          if (it->second != w) throw fail("asymmetric weights for edge");
          throw fail("duplicate edge");
        }
        seen.emplace(key, w);
        b.add_edge(x, y, w);
      } else {
        throw fail("unknown record '" + std::string(tok[0]) + "'");
      }
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind("graph file line", 0) == 0) throw;
      throw fail(what);
    }
  }
  return b.build();
}

WeightedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  return parse_graph(in);
}

void write_graph(std::ostream& out, const WeightedGraph& g) {
  out << "# graphblow weighted graph: " << g.num_vertices() << " vertices, " << g.num_edges()
      << " edges\n";
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    out << "v " << g.label(x) << ' ' << format_double(g.mu(x)) << '\n';
  }
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (g.is_truncation_cut(x)) out << "b " << g.label(x) << '\n';
  }
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    for (const auto& nb : g.neighbors(x)) {
      if (nb.vertex > x) {
        out << "e " << g.label(x) << ' ' << g.label(nb.vertex) << ' ' << format_double(nb.weight)
            << '\n';
      }
    }
  }
}

void write_graph_file(const std::string& path, const WeightedGraph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file '" + path + "'");
  write_graph(out, g);
  if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Distances

std::vector<std::size_t> bfs_distances(const WeightedGraph& g, VertexId source) {
  g.check_vertex(source);
  std::vector<std::size_t> dist(g.num_vertices(), kUnreachable);
  std::queue<VertexId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const auto x = frontier.front();
    frontier.pop();
    for (const auto& nb : g.neighbors(x)) {
      if (dist[nb.vertex] == kUnreachable) {
        dist[nb.vertex] = dist[x] + 1;
        frontier.push(nb.vertex);
      }
    }
  }
  return dist;
}

std::size_t graph_distance(const WeightedGraph& g, VertexId x, VertexId y) {
  g.check_vertex(y);
  return bfs_distances(g, x)[y];
}

std::vector<double> ball_volume_profile(const WeightedGraph& g, VertexId x) {
  const auto dist = bfs_distances(g, x);
  const auto ecc = *std::max_element(dist.begin(), dist.end());
  std::vector<double> profile(ecc + 1, 0.0);
  for (VertexId y = 0; y < g.num_vertices(); ++y) profile[dist[y]] += g.mu(y);
  for (std::size_t r = 1; r < profile.size(); ++r) profile[r] += profile[r - 1];
  return profile;
}

double ball_volume(const WeightedGraph& g, VertexId x, double r) {
  if (!(r >= 0.0)) throw ValidationError("ball radius must be >= 0");
  const auto profile = ball_volume_profile(g, x);
  const double idx = std::floor(r);
  if (idx >= static_cast<double>(profile.size() - 1)) return profile.back();
  return profile[static_cast<std::size_t>(idx)];
}

std::vector<VertexId> ball(const WeightedGraph& g, VertexId x, double r) {
  if (!(r >= 0.0)) throw ValidationError("ball radius must be >= 0");
  const auto dist = bfs_distances(g, x);
  std::vector<VertexId> out;
  for (VertexId y = 0; y < g.num_vertices(); ++y) {
    if (static_cast<double>(dist[y]) <= r) out.push_back(y);
  }
  return out;
}

double truncation_radius(const WeightedGraph& g, VertexId x) {
  const auto dist = bfs_distances(g, x);
  double best = std::numeric_limits<double>::infinity();
  for (VertexId y = 0; y < g.num_vertices(); ++y) {
    if (g.is_truncation_cut(y)) best = std::min(best, static_cast<double>(dist[y]));
  }
  return best;
}

VolumeGrowthEstimate estimate_volume_growth(const WeightedGraph& g, VertexId center,
                                            std::size_t r_max) {
  const auto profile = ball_volume_profile(g, center);
  if (r_max + 1 >= profile.size()) {
    throw ValidationError("truncation too small: ball of radius " + std::to_string(r_max) +
                          " exhausts the graph");
  }
  if (r_max < 4) throw ValidationError("fewer than 4 usable radii for the volume-growth fit");

  // Cell-centred abscissa: the ball of radius r covers unit cells out to r + 1/2.
  const auto count = static_cast<double>(r_max);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t r = 1; r <= r_max; ++r) {
    const double lx = std::log(static_cast<double>(r) + 0.5);
    const double ly = std::log(profile[r]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / count;

  VolumeGrowthEstimate est;
  est.m_degree = slope;
  est.center = center;
  double c0 = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t r = 1; r <= r_max; ++r) {
    const double rr = static_cast<double>(r);
    est.radii.push_back(rr);
    const double fitted = intercept + slope * std::log(rr + 0.5);
    ss += std::pow(std::log(profile[r]) - fitted, 2);
    c0 = std::max(c0, profile[r] / std::pow(rr, slope));
  }
  est.c0 = c0 * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
  est.residual = std::sqrt(ss / count);
  if (!(est.m_degree > 0.0)) throw ValidationError("volume-growth fit produced a non-positive degree");
  return est;
}

}  // namespace graphblow
