#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "graphblow/graph.hpp"
#include "graphblow/laplacian.hpp"

namespace graphblow {

enum class HeatMethod { series, dense };

/// p(t, source, .) on every vertex.
struct KernelSlice {
  double t = 0.0;
  VertexId source = 0;
  std::vector<double> values;
};

/// Heat semigroup P_t = exp(t Delta) on a finite graph.
///
/// The series route sums t^k Delta^k g / k! by repeated matrix-free
/// application of Delta. Long times are split into n equal substeps with
/// 2 D_mu tau <= 1, and each substep is truncated at the first order K whose
/// tail bound A * sum_{k>K} (2 D_mu tau)^k / k! is at most tolerance / n,
/// where A = sup|g| (P_t never increases the sup norm). The dense route
/// diagonalizes the mu-symmetrized Laplacian once at construction.
///
/// Holds a reference to the graph, which must outlive the evaluator.
class HeatKernelEvaluator {
 public:
  explicit HeatKernelEvaluator(const WeightedGraph& g, HeatMethod method = HeatMethod::series,
                               double series_tolerance = 1e-12);

  const WeightedGraph& graph() const { return *graph_; }
  HeatMethod method() const { return method_; }
  double series_tolerance() const { return tolerance_; }

  struct SeriesPlan {
    std::size_t substeps = 1;
    double step = 0.0;
    std::size_t order = 0;
    double tail_bound = 0.0;  // per substep
  };
  /// Truncation plan for time t and input bound A.
  SeriesPlan series_plan(double t, double bound_a) const;

  /// P_t g. Throws ValidationError for t <= 0.
  GraphFunction semigroup_apply(double t, const GraphFunction& g) const;
  std::vector<double> apply(double t, std::span<const double> g) const;

  /// p(t, source, y) = (P_t 1_source)(y) / mu(source).
  KernelSlice kernel_slice(double t, VertexId source) const;

 private:
  std::vector<double> apply_series(double t, std::span<const double> g) const;
  std::vector<double> apply_dense(double t, std::span<const double> g) const;

  struct DenseFactor {
    Eigen::VectorXd eigenvalues;   // of -Delta, ascending
    Eigen::MatrixXd eigenvectors;  // of the symmetrized operator
    Eigen::VectorXd sqrt_mu;
  };

  const WeightedGraph* graph_;
  LaplacianOperator op_;
  HeatMethod method_;
  double tolerance_;
  std::shared_ptr<const DenseFactor> dense_;
};

/// |sum_y mu(y) (Delta_y p(t,x,y)) g(y) - sum_y mu(y) p(t,x,y) (Delta g)(y)|.
double check_adjointness(const HeatKernelEvaluator& ev, double t, const GraphFunction& g,
                         VertexId x);

enum class BoundStatus { holds, fails, outside_window };

const char* to_string(BoundStatus status);

struct OnDiagonalCheck {
  BoundStatus status = BoundStatus::outside_window;
  double kernel_value = 0.0;  // p(t, x, x)
  double radius = 0.0;        // C0 t log t
  double window = 0.0;        // hop distance to the nearest truncation cut
  double ball_volume = 0.0;   // V(x, radius) on the graph
  double lower_bound = 0.0;   // 1 / (4 V(x, radius))
  double model_lower_bound = 0.0;  // 1 / (4 c0 radius^m) from the growth fit
};

/// Large-time on-diagonal lower bound p(t,x,x) >= 1 / (4 V(x, C0 t log t)).
/// Requires C0 > 2 e D_mu and t > 1. Reports outside_window when the ball
/// radius reaches the truncation cuts, where the finite graph no longer
/// resembles the infinite one.
OnDiagonalCheck ondiag_lower_bound_check(const WeightedGraph& g, const VolumeGrowthEstimate& vge,
                                         VertexId x, double t, double C0);

}  // namespace graphblow
