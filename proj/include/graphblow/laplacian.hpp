#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphblow/graph.hpp"

namespace graphblow {

/// Largest interior size for which dense matrices are assembled.
inline constexpr std::size_t kDenseCap = 2000;

/// A finite vertex set Omega split into boundary and interior.
///
/// A vertex of Omega is on the boundary when it has a neighbour outside
/// Omega, or when it is a truncation cut of the graph (its missing
/// neighbours lie outside every materialized Omega). The split is always
/// recomputed from Omega and the graph.
class DomainDecomposition {
 public:
  static DomainDecomposition from_vertices(const WeightedGraph& g, std::vector<VertexId> omega);
  static DomainDecomposition from_ball(const WeightedGraph& g, VertexId center, double radius);
  /// Omega = V.
  static DomainDecomposition whole(const WeightedGraph& g);

  const std::vector<VertexId>& omega() const { return omega_; }
  const std::vector<VertexId>& boundary() const { return boundary_; }
  const std::vector<VertexId>& interior() const { return interior_; }

  std::size_t interior_size() const { return interior_.size(); }
  std::size_t graph_size() const { return index_.size(); }

  bool is_interior(VertexId x) const { return x < index_.size() && index_[x] >= 0; }
  /// Position of x in interior(); x must be interior.
  std::size_t interior_index(VertexId x) const { return static_cast<std::size_t>(index_[x]); }

  /// Values of a full-length vertex array at the interior vertices.
  Eigen::VectorXd restrict(std::span<const double> full) const;
  /// Zero extension of an interior-indexed vector to all vertices.
  std::vector<double> extend(const Eigen::VectorXd& compact) const;

  void check_graph(const WeightedGraph& g) const;

 private:
  DomainDecomposition() = default;
  std::vector<VertexId> omega_;
  std::vector<VertexId> boundary_;
  std::vector<VertexId> interior_;
  std::vector<std::ptrdiff_t> index_;
};

/// Real function on the vertices with a declared support (V or an interior
/// set). Values outside the support are stored as, and read as, zero.
class GraphFunction {
 public:
  GraphFunction() = default;
  /// Supported on all of V.
  explicit GraphFunction(std::vector<double> values);
  /// Supported on the interior of dom; values outside it are discarded.
  GraphFunction(const DomainDecomposition& dom, std::vector<double> full_values);
  static GraphFunction from_compact(const DomainDecomposition& dom, const Eigen::VectorXd& compact);
  static GraphFunction constant(std::size_t n, double c);

  std::size_t size() const { return values_.size(); }
  double operator()(VertexId x) const { return values_[x]; }
  std::span<const double> values() const { return values_; }

  bool supported_everywhere() const { return !mask_; }
  bool in_support(VertexId x) const { return !mask_ || (*mask_)[x] != 0; }

  double sup_norm() const;

 private:
  std::vector<double> values_;
  std::shared_ptr<const std::vector<char>> mask_;
};

/// Delta h(x) = (1/mu(x)) sum_{y~x} w_xy (h(y) - h(x)); h must be supported on V.
double apply_laplacian(const WeightedGraph& g, const GraphFunction& h, VertexId x);

/// Dirichlet Laplacian at an interior vertex, zero-extending h outside the interior.
double apply_dirichlet_laplacian(const WeightedGraph& g, const DomainDecomposition& dom,
                                 const GraphFunction& h, VertexId x);

/// Delta applied at every vertex.
std::vector<double> laplacian(const WeightedGraph& g, std::span<const double> h);

/// Matrix-free Laplacian on a compact index set: either all of V or the
/// interior of a domain with zero extension outside it.
class LaplacianOperator {
 public:
  static LaplacianOperator full(const WeightedGraph& g);
  static LaplacianOperator dirichlet(const WeightedGraph& g, const DomainDecomposition& dom);

  std::size_t size() const { return mu_.size(); }
  std::span<const double> measures() const { return mu_; }
  /// Largest m(x)/mu(x) over the index set.
  double diagonal_bound() const { return diag_bound_; }

  /// out = Delta(in) on the index set.
  void apply(std::span<const double> in, std::span<double> out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& in) const;

 private:
  struct Entry {
    std::size_t col;
    double weight;
  };
  std::vector<double> mu_;
  std::vector<double> degree_;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
  double diag_bound_ = 0.0;
};

/// Dense matrix of -Delta_Omega over the interior (interior() order).
/// Self-adjoint in the mu-weighted inner product. Throws above kDenseCap.
Eigen::MatrixXd assemble_dirichlet_matrix(const WeightedGraph& g, const DomainDecomposition& dom);

/// Dense matrix of -Delta over all of V. Throws above kDenseCap.
Eigen::MatrixXd assemble_laplacian_matrix(const WeightedGraph& g);

// --- function files: lines `a <vertex-id> <value>`, unlisted vertices are 0 ---

GraphFunction parse_function(std::istream& in, const WeightedGraph& g);
GraphFunction read_function_file(const std::string& path, const WeightedGraph& g);
void write_function(std::ostream& out, const WeightedGraph& g, const GraphFunction& f);
void write_function_file(const std::string& path, const WeightedGraph& g, const GraphFunction& f);

}  // namespace graphblow
