#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "graphblow/graph.hpp"
#include "graphblow/heat_kernel.hpp"
#include "graphblow/laplacian.hpp"
#include "graphblow/nonlinearity.hpp"
#include "graphblow/spectral.hpp"

namespace graphblow {

enum class ProblemKind { cauchy, dirichlet };

const char* to_string(ProblemKind kind);

/// Which equation is integrated: u_t = Delta u + f(u) on all of V, or
/// u_t = Delta_Omega u + f(u) on the interior with u = 0 outside it.
struct Problem {
  ProblemKind kind = ProblemKind::cauchy;
  std::optional<DomainDecomposition> domain;  // required for dirichlet

  static Problem cauchy() { return {}; }
  static Problem dirichlet(DomainDecomposition dom) { return {ProblemKind::dirichlet, std::move(dom)}; }
};

struct SimulationConfig {
  Problem problem;
  /// Cauchy runs only: realize the problem on the ball truncation
  /// B(source, R + 1) with zero closure, i.e. interior B(source, R).
  std::optional<std::size_t> truncation_radius;
  double t_max = 10.0;
  double dt_init = 1e-3;
  double dt_min = 1e-14;
  double dt_max = 0.1;
  double local_tol = 1e-8;
  double u_blow = 1e12;
  GraphFunction initial;
  std::optional<VertexId> source_vertex;
  std::size_t record_stride = 1;
  /// When set, steps land on multiples of this interval and only those
  /// times (plus t = 0 and the terminal time) are recorded.
  std::optional<double> sample_interval;
  bool record_states = false;
  bool detect_steady_state = true;
  /// Cauchy runs with a source vertex: record J_T(s) for this horizon T.
  std::optional<double> jt_horizon;
  std::size_t max_steps = 20'000'000;
};

/// Throws ValidationError with a one-line reason when the configuration is
/// unusable (e.g. "initial data is trivial").
void validate_config(const WeightedGraph& g, const SimulationConfig& config);

/// The problem actually integrated after applying any truncation.
Problem resolve_problem(const WeightedGraph& g, const SimulationConfig& config);

struct TrajectorySample {
  double t = 0.0;
  /// Low-order part of the accumulated time: the elapsed time is t + t_lo.
  double t_lo = 0.0;
  double dt = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double u_linf = 0.0;
  double J = 0.0;         // J(t) for Dirichlet runs, J_T(s) or NaN otherwise
  double u_source = 0.0;  // u(t, source) or NaN
};

enum class Verdict { blowup, bounded, horizon };

const char* to_string(Verdict v);

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  /// Vertex of each state component (interior order for Dirichlet runs).
  std::vector<VertexId> state_vertices;
  /// Recorded states, one per sample, when requested.
  std::vector<std::vector<double>> states;
  Verdict verdict = Verdict::horizon;
  std::optional<double> T_est;
  /// Remaining Osgood tail F(U_blow); the blow-up time lies within
  /// [T_est, T_est + T_tail] up to integration error.
  std::optional<double> T_tail;
  bool nonfinite = false;
  /// Set when u dipped below -10 local_tol on a Dirichlet or truncated run.
  bool integrity_violation = false;
  std::optional<EigenPair> eigen;  // Dirichlet runs
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Delta u + f(u) on the problem's index set (compact vectors).
void step_rhs(const LaplacianOperator& op, const Nonlinearity& nl, std::span<const double> state,
              std::span<double> out);

/// Header `t,dt,u_min,u_max,u_linf,J`, one row per sample (NA for a missing
/// J), then `# verdict=<v>,T_est=<value|NA>`.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);

/// Pointwise Delta u + f(u) (Cauchy) or Delta_Omega u + f(u) (Dirichlet; zero
/// outside the interior). Throws when the state is not on the problem's domain.
GraphFunction step_rhs(const WeightedGraph& g, const Problem& problem, const Nonlinearity& nl,
                       const GraphFunction& state);

/// Adaptive Dormand-Prince 5(4) integration with blow-up detection.
TrajectoryRecord integrate(const WeightedGraph& g, const SimulationConfig& config,
                           const Nonlinearity& nl);

/// J = sum over the interior of mu u phi1.
double functional_J(const WeightedGraph& g, const DomainDecomposition& dom, const EigenPair& eig,
                    const GraphFunction& state);

/// J_T(s) = sum_x mu(x) p(T - s, nu, x) u(x). Requires 0 <= s < T.
double functional_JT(const HeatKernelEvaluator& ev, VertexId nu, double T, double s,
                     const GraphFunction& state);

struct JInequalityReport {
  double max_violation = 0.0;             // max(RHS - J', 0)
  double max_normalized_violation = 0.0;  // violation / (1 + |RHS|)
  std::size_t intervals = 0;
};

/// Compares the secant J' between consecutive samples with g(J) = -lambda1 J + f(J):
/// with g at the J-midpoint, or, where g > 0 and J rises, with the harmonic
/// mean (J_b - J_a) / int dJ / g(J).
JInequalityReport check_J_inequality(const TrajectoryRecord& record, const EigenPair& eig,
                                     const Nonlinearity& nl);

/// Max over shared sample times and state components of (lower - upper).
/// Both runs need recorded states on identical sampling grids.
double check_comparison(const TrajectoryRecord& upper, const TrajectoryRecord& lower);

}  // namespace graphblow
