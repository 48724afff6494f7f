#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace graphblow {

/// Dense 0-based vertex index.
using VertexId = std::size_t;

struct Neighbor {
  VertexId vertex;
  double weight;
};

/// Finite, connected, symmetric weighted graph with vertex measure mu.
///
/// Adjacency is stored in CSR form with both orientations of every edge
/// sharing the same weight value. Vertices may carry a "truncation cut" mark:
/// such a vertex stands for a place where a larger (possibly infinite) graph
/// was cut off, i.e. it has neighbours that are not materialized here.
/// Immutable once built; construct through GraphBuilder or a generator.
class WeightedGraph {
 public:
  std::size_t num_vertices() const { return mu_.size(); }
  std::size_t num_edges() const { return targets_.size() / 2; }

  double mu(VertexId x) const { return mu_[x]; }
  /// m(x): total incident edge weight.
  double degree(VertexId x) const { return degree_[x]; }
  /// D_mu = max_x m(x) / mu(x).
  double d_mu() const { return d_mu_; }
  double total_volume() const { return total_volume_; }

  std::span<const Neighbor> neighbors(VertexId x) const {
    return {targets_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }
  std::span<const double> measures() const { return mu_; }

  bool is_truncation_cut(VertexId x) const { return cut_[x] != 0; }
  bool has_truncation_cut() const;

  /// Edge weight, or 0 when x and y are not adjacent.
  double weight(VertexId x, VertexId y) const;

  /// External id of a vertex (as written in graph files).
  std::int64_t label(VertexId x) const { return labels_[x]; }
  std::optional<VertexId> find_label(std::int64_t label) const;

  /// Recomputes D_mu from mu and the adjacency, ignoring the cache.
  double recompute_d_mu() const;

  void check_vertex(VertexId x) const;

 private:
  friend class GraphBuilder;
  WeightedGraph() = default;

  std::vector<double> mu_;
  std::vector<double> degree_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> targets_;
  std::vector<char> cut_;
  std::vector<std::int64_t> labels_;
  double d_mu_ = 0.0;
  double total_volume_ = 0.0;
};

/// Accumulates vertices and edges, then validates everything in build().
class GraphBuilder {
 public:
  VertexId add_vertex(double mu);
  VertexId add_vertex(double mu, std::int64_t label);
  void add_edge(VertexId x, VertexId y, double weight);
  void mark_truncation_cut(VertexId x);

  std::size_t num_vertices() const { return mu_.size(); }

  /// Throws ValidationError on non-positive measures or weights, self-loops,
  /// duplicate edges, or a disconnected result.
  WeightedGraph build() const;

 private:
  struct Edge {
    VertexId x, y;
    double w;
  };
  std::vector<double> mu_;
  std::vector<std::int64_t> labels_;
  std::vector<char> cut_;
  std::vector<Edge> edges_;
};

enum class GraphKind { path, cycle, lattice, star, complete, random, file };

/// Generator descriptor. Textual forms accepted by parse_graph_descriptor:
///   path:<n>  cycle:<n>  lattice:<dim>:<side>  star:<n>  complete:<n>
///   random:<n>:<extra_edges>:<seed>  file:<path>
struct GraphDescriptor {
  GraphKind kind = GraphKind::path;
  std::size_t n = 0;
  std::size_t dim = 1;
  std::size_t side = 0;
  std::size_t extra_edges = 0;
  std::uint64_t seed = 0;
  std::string file;
  double mu = 1.0;
  double omega = 1.0;
};

GraphDescriptor parse_graph_descriptor(std::string_view text);
bool looks_like_descriptor(std::string_view text);

WeightedGraph build_graph(const GraphDescriptor& desc);

/// Path on n vertices; both endpoints are truncation cuts (it is the
/// one-dimensional lattice of side n).
WeightedGraph path_graph(std::size_t n, double mu = 1.0, double omega = 1.0);
WeightedGraph cycle_graph(std::size_t n, double mu = 1.0, double omega = 1.0);
/// Cubic grid piece of Z^dim, side^dim vertices in row-major order. Vertices
/// on the outer faces are truncation cuts.
WeightedGraph lattice_graph(std::size_t dim, std::size_t side, double mu = 1.0,
                            double omega = 1.0);
/// Vertex 0 is the hub.
WeightedGraph star_graph(std::size_t n, double mu = 1.0, double omega = 1.0);
WeightedGraph complete_graph(std::size_t n, double mu = 1.0, double omega = 1.0);
/// Random spanning tree plus extra_edges chords; mu and omega drawn from
/// [0.5, 2]. Deterministic for a given seed.
WeightedGraph random_connected_graph(std::size_t n, std::size_t extra_edges,
                                     std::uint64_t seed);

/// Central vertex of lattice_graph(dim, side).
VertexId lattice_center(std::size_t dim, std::size_t side);

WeightedGraph parse_graph(std::istream& in);
WeightedGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const WeightedGraph& g);
void write_graph_file(const std::string& path, const WeightedGraph& g);

/// Resolves either a generator descriptor or a plain file path.
WeightedGraph load_graph(std::string_view spec);

// --- distances and volumes ---

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> bfs_distances(const WeightedGraph& g, VertexId source);
std::size_t graph_distance(const WeightedGraph& g, VertexId x, VertexId y);

/// V(x, r) = sum of mu over the ball {y : d(x, y) <= r}.
double ball_volume(const WeightedGraph& g, VertexId x, double r);

/// Cumulative ball volumes V(x, 0), V(x, 1), ..., V(x, ecc(x)).
std::vector<double> ball_volume_profile(const WeightedGraph& g, VertexId x);

/// Vertices of the ball B(x, r), ascending.
std::vector<VertexId> ball(const WeightedGraph& g, VertexId x, double r);

/// Hop distance from x to the nearest truncation cut; +inf when the graph
/// carries no cuts.
double truncation_radius(const WeightedGraph& g, VertexId x);

struct VolumeGrowthEstimate {
  double m_degree = 0.0;
  double c0 = 0.0;
  VertexId center = 0;
  std::vector<double> radii;
  double residual = 0.0;
};

/// Least-squares slope of log V(center, r) against log(r + 1/2) for r = 1..r_max,
/// with c0 raised so that V(center, r) <= c0 r^m on every fitted radius.
VolumeGrowthEstimate estimate_volume_growth(const WeightedGraph& g, VertexId center,
                                            std::size_t r_max);

}  // namespace graphblow
