#include "graphblow/heat_kernel.hpp"

#include <cmath>
#include <numbers>

#include "graphblow/errors.hpp"

namespace graphblow {

namespace {

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("time must be positive and finite");
}

// Upper bound on sum_{k>K} x^k / k! for 0 <= x < K + 2.
double exp_tail_bound(double x, std::size_t order) {
  double term = 1.0;
  for (std::size_t k = 1; k <= order + 1; ++k) term *= x / static_cast<double>(k);
  return term / (1.0 - x / static_cast<double>(order + 2));
}

}  // namespace

HeatKernelEvaluator::HeatKernelEvaluator(const WeightedGraph& g, HeatMethod method,
                                         double series_tolerance)
    : graph_(&g), op_(LaplacianOperator::full(g)), method_(method), tolerance_(series_tolerance) {
  if (!(series_tolerance > 0.0)) throw ValidationError("series tolerance must be positive");
  if (method == HeatMethod::dense) {
    const auto n = static_cast<Eigen::Index>(g.num_vertices());
    if (g.num_vertices() > kDenseCap) throw ValidationError("graph exceeds the dense cap");
    auto factor = std::make_shared<DenseFactor>();
    factor->sqrt_mu.resize(n);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
      const auto i = static_cast<Eigen::Index>(x);
      factor->sqrt_mu[i] = std::sqrt(g.mu(x));
      S(i, i) = g.degree(x) / g.mu(x);
      for (const auto& nb : g.neighbors(x)) {
        S(i, static_cast<Eigen::Index>(nb.vertex)) = -nb.weight / std::sqrt(g.mu(x) * g.mu(nb.vertex));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (solver.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
    factor->eigenvalues = solver.eigenvalues();
    factor->eigenvectors = solver.eigenvectors();
    dense_ = std::move(factor);
  }
}

HeatKernelEvaluator::SeriesPlan HeatKernelEvaluator::series_plan(double t, double bound_a) const {
  require_positive_time(t);
  SeriesPlan plan;
  const double rate = 2.0 * graph_->d_mu();
  plan.substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(rate * t)));
  plan.step = t / static_cast<double>(plan.substeps);
  const double x = rate * plan.step;
  const double budget = tolerance_ / static_cast<double>(plan.substeps);
  plan.order = 0;
  plan.tail_bound = bound_a * exp_tail_bound(x, 0);
  while (plan.tail_bound > budget) {
    ++plan.order;
    plan.tail_bound = bound_a * exp_tail_bound(x, plan.order);
  }
  return plan;
}

std::vector<double> HeatKernelEvaluator::apply_series(double t, std::span<const double> g) const {
  double bound_a = 0.0;
  for (const double v : g) bound_a = std::max(bound_a, std::abs(v));
  const auto plan = series_plan(t, bound_a);
  const auto n = g.size();
  std::vector<double> current(g.begin(), g.end());
  std::vector<double> term(n), next(n);
  for (std::size_t s = 0; s < plan.substeps; ++s) {
    term = current;
    for (std::size_t k = 1; k <= plan.order; ++k) {
      op_.apply(term, next);
      const double scale = plan.step / static_cast<double>(k);
      for (std::size_t i = 0; i < n; ++i) {
        term[i] = scale * next[i];
        current[i] += term[i];
      }
    }
  }
  return current;
}

std::vector<double> HeatKernelEvaluator::apply_dense(double t, std::span<const double> g) const {
  const auto& f = *dense_;
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g[static_cast<std::size_t>(i)] * f.sqrt_mu[i];
  Eigen::VectorXd coeff = f.eigenvectors.transpose() * v;
  coeff.array() *= (-t * f.eigenvalues.array()).exp();
  const Eigen::VectorXd w = f.eigenvectors * coeff;
  std::vector<double> out(g.size());
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = w[i] / f.sqrt_mu[i];
  return out;
}

std::vector<double> HeatKernelEvaluator::apply(double t, std::span<const double> g) const {
  require_positive_time(t);
  if (g.size() != graph_->num_vertices()) {
    throw ValidationError("function length does not match the graph");
  }
  return method_ == HeatMethod::series ? apply_series(t, g) : apply_dense(t, g);
}

GraphFunction HeatKernelEvaluator::semigroup_apply(double t, const GraphFunction& g) const {
  return GraphFunction(apply(t, g.values()));
}

KernelSlice HeatKernelEvaluator::kernel_slice(double t, VertexId source) const {
  require_positive_time(t);
  graph_->check_vertex(source);
  std::vector<double> delta(graph_->num_vertices(), 0.0);
  delta[source] = 1.0;
  KernelSlice slice;
  slice.t = t;
  slice.source = source;
  slice.values = apply(t, delta);
  const double inv_mu = 1.0 / graph_->mu(source);
  for (auto& v : slice.values) v *= inv_mu;
  return slice;
}

double check_adjointness(const HeatKernelEvaluator& ev, double t, const GraphFunction& g,
                         VertexId x) {
  const auto& graph = ev.graph();
  if (g.size() != graph.num_vertices()) throw ValidationError("function length does not match the graph");
  const auto p = ev.kernel_slice(t, x).values;
  const auto lap_p = laplacian(graph, p);
  const auto lap_g = laplacian(graph, g.values());
  double lhs = 0.0, rhs = 0.0;
  for (VertexId y = 0; y < graph.num_vertices(); ++y) {
    lhs += graph.mu(y) * lap_p[y] * g(y);
    rhs += graph.mu(y) * p[y] * lap_g[y];
  }
  return std::abs(lhs - rhs);
}

const char* to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::holds:
      return "holds";
    case BoundStatus::fails:
      return "fails";
    case BoundStatus::outside_window:
      return "outside-window";
  }
  return "unknown";
}

OnDiagonalCheck ondiag_lower_bound_check(const WeightedGraph& g, const VolumeGrowthEstimate& vge,
                                         VertexId x, double t, double C0) {
  g.check_vertex(x);
  const double min_c0 = 2.0 * g.d_mu() * std::numbers::e;
  if (!(C0 > min_c0)) {
    throw ValidationError("C0 must exceed 2 e D_mu = " + std::to_string(min_c0));
  }
  if (!(t > 1.0)) throw ValidationError("on-diagonal bound needs t > 1");

  OnDiagonalCheck out;
  out.radius = C0 * t * std::log(t);
  out.window = truncation_radius(g, x);
  if (out.radius > out.window) {
    out.status = BoundStatus::outside_window;
    return out;
  }
  const HeatKernelEvaluator ev(g, HeatMethod::series);
  out.kernel_value = ev.kernel_slice(t, x).values[x];
  out.ball_volume = ball_volume(g, x, out.radius);
  out.lower_bound = 1.0 / (4.0 * out.ball_volume);
  out.model_lower_bound = 1.0 / (4.0 * vge.c0 * std::pow(std::max(out.radius, 1.0), vge.m_degree));
  out.status = out.kernel_value >= out.lower_bound ? BoundStatus::holds : BoundStatus::fails;
  return out;
}

}  // namespace graphblow
