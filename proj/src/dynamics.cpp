#include "graphblow/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>

#include "graphblow/criteria.hpp"
#include "graphblow/errors.hpp"
#include "graphblow/text.hpp"

namespace graphblow {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool is_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const char* to_string(ProblemKind kind) {
  return kind == ProblemKind::cauchy ? "cauchy" : "dirichlet";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::blowup:
      return "blowup";
    case Verdict::bounded:
      return "bounded";
    case Verdict::horizon:
      return "horizon";
  }
  return "unknown";
}

Problem resolve_problem(const WeightedGraph& g, const SimulationConfig& config) {
  if (config.problem.kind == ProblemKind::dirichlet) {
    if (!config.problem.domain) throw ValidationError("dirichlet problem needs a domain");
    config.problem.domain->check_graph(g);
    if (config.truncation_radius) {
      throw ValidationError("truncation radius applies to cauchy problems only");
    }
    return config.problem;
  }
  if (!config.truncation_radius) return Problem::cauchy();
  if (!config.source_vertex) throw ValidationError("truncation needs a source vertex");
  const VertexId nu = *config.source_vertex;
  g.check_vertex(nu);
  const double R = static_cast<double>(*config.truncation_radius);
  if (R + 1.0 > truncation_radius(g, nu)) {
    throw ValidationError("truncation radius exceeds the materialized graph");
  }
  return Problem::dirichlet(DomainDecomposition::from_ball(g, nu, R + 1.0));
}

void validate_config(const WeightedGraph& g, const SimulationConfig& config) {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(config.t_max)) throw ValidationError("t_max must be positive");
  if (!positive(config.dt_init) || !positive(config.dt_min) || !positive(config.dt_max)) {
    throw ValidationError("step sizes must be positive");
  }
  if (!(config.dt_min <= config.dt_init && config.dt_init <= config.dt_max)) {
    throw ValidationError("need dt_min <= dt_init <= dt_max");
  }
  if (!positive(config.local_tol)) throw ValidationError("local_tol must be positive");
  if (!(config.u_blow >= 1e6) || !std::isfinite(config.u_blow)) {
    throw ValidationError("u_blow must be at least 1e6");
  }
  if (config.record_stride == 0) throw ValidationError("record_stride must be positive");
  if (config.sample_interval && !positive(*config.sample_interval)) {
    throw ValidationError("sample_interval must be positive");
  }
  if (config.jt_horizon) {
    if (!positive(*config.jt_horizon)) throw ValidationError("jt_horizon must be positive");
    if (!config.source_vertex) throw ValidationError("jt_horizon needs a source vertex");
  }
  if (config.source_vertex) g.check_vertex(*config.source_vertex);
  if (config.initial.size() != g.num_vertices()) {
    throw ValidationError("initial data does not match the graph size");
  }
  const Problem problem = resolve_problem(g, config);
  bool nontrivial = false;
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    const double a = config.initial(x);
    if (!std::isfinite(a)) throw ValidationError("initial data must be bounded");
    if (a < 0.0) throw ValidationError("initial data must be non-negative");
    const bool in_domain = problem.kind == ProblemKind::cauchy || problem.domain->is_interior(x);
    if (in_domain && a > 0.0) nontrivial = true;
  }
  if (!nontrivial) throw ValidationError("initial data is trivial");
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
  out << "t,dt,u_min,u_max,u_linf,J\n";
  for (const auto& s : record.samples) {
    out << format_double(s.t) << ',' << format_double(s.dt) << ',' << format_double(s.u_min) << ','
        << format_double(s.u_max) << ',' << format_double(s.u_linf) << ','
        << (std::isnan(s.J) ? std::string("NA") : format_double(s.J)) << '\n';
  }
  out << "# verdict=" << to_string(record.verdict)
      << ",T_est=" << (record.T_est ? format_double(*record.T_est) : std::string("NA")) << '\n';
}

void step_rhs(const LaplacianOperator& op, const Nonlinearity& nl, std::span<const double> state,
              std::span<double> out) {
  op.apply(state, out);
  for (std::size_t i = 0; i < state.size(); ++i) out[i] += nl(state[i]);
}

GraphFunction step_rhs(const WeightedGraph& g, const Problem& problem, const Nonlinearity& nl,
                       const GraphFunction& state) {
  if (state.size() != g.num_vertices()) throw ValidationError("state does not match the graph size");
  if (problem.kind == ProblemKind::cauchy) {
    std::vector<double> out = laplacian(g, state.values());
    for (VertexId x = 0; x < g.num_vertices(); ++x) out[x] += nl(state(x));
    return GraphFunction(std::move(out));
  }
  if (!problem.domain) throw ValidationError("dirichlet problem needs a domain");
  const DomainDecomposition& dom = *problem.domain;
  if (dom.graph_size() != g.num_vertices()) throw ValidationError("domain does not match the graph");
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (!dom.is_interior(x) && state(x) != 0.0) {
      throw ValidationError("state is nonzero outside the domain interior");
    }
  }
  const LaplacianOperator op = LaplacianOperator::dirichlet(g, dom);
  const Eigen::VectorXd compact = dom.restrict(state.values());
  std::vector<double> out(op.size());
  step_rhs(op, nl, std::span<const double>(compact.data(), compact.size()), out);
  return GraphFunction::from_compact(dom, Eigen::Map<const Eigen::VectorXd>(out.data(), out.size()));
}

TrajectoryRecord integrate(const WeightedGraph& g, const SimulationConfig& config,
                           const Nonlinearity& nl) {
  validate_config(g, config);
  const Problem problem = resolve_problem(g, config);
  const bool dirichlet = problem.kind == ProblemKind::dirichlet;

  TrajectoryRecord rec;
  LaplacianOperator op = dirichlet ? LaplacianOperator::dirichlet(g, *problem.domain)
                                   : LaplacianOperator::full(g);
  std::vector<double> u;
  if (dirichlet) {
    const DomainDecomposition& dom = *problem.domain;
    rec.state_vertices = dom.interior();
    const Eigen::VectorXd c = dom.restrict(config.initial.values());
    u.assign(c.data(), c.data() + c.size());
    rec.eigen = first_eigenpair(g, dom);
  } else {
    rec.state_vertices.resize(g.num_vertices());
    for (VertexId x = 0; x < g.num_vertices(); ++x) rec.state_vertices[x] = x;
    u.assign(config.initial.values().begin(), config.initial.values().end());
  }
  const std::size_t n = u.size();

  if (nl.kind() == NonlinearityKind::custom) {
    for (double r : geometric_grid(1e-6, config.u_blow, 200)) {
      if (!std::isfinite(nl(r))) throw ValidationError("nonlinearity is not finite on [0, u_blow]");
    }
    if (!std::isfinite(nl(0.0))) throw ValidationError("nonlinearity is not finite on [0, u_blow]");
  }
  if (auto F = nl.osgood_closed_form(config.u_blow); F && std::isfinite(*F)) rec.T_tail = *F;

  std::ptrdiff_t source_index = -1;
  if (config.source_vertex) {
    const auto it = std::find(rec.state_vertices.begin(), rec.state_vertices.end(),
                              *config.source_vertex);
    if (it != rec.state_vertices.end()) source_index = it - rec.state_vertices.begin();
  }
  std::optional<HeatKernelEvaluator> kernel;
  if (config.jt_horizon && !dirichlet) kernel.emplace(g);

  auto full_state = [&](std::span<const double> s) {
    if (!dirichlet) return GraphFunction(std::vector<double>(s.begin(), s.end()));
    return GraphFunction::from_compact(*problem.domain,
                                       Eigen::Map<const Eigen::VectorXd>(s.data(), s.size()));
  };

  double t_carry = 0.0;  // Kahan-style compensation for the running time
  auto record = [&](double t, double dt, std::span<const double> s) {
    TrajectorySample smp;
    smp.t = t;
    smp.t_lo = -t_carry;
    smp.dt = dt;
    if (n > 0) {
      const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
      smp.u_min = *lo;
      smp.u_max = *hi;
    }
    smp.u_linf = sup_abs(s);
    smp.u_source = source_index >= 0 ? s[static_cast<std::size_t>(source_index)] : kNaN;
    if (dirichlet) {
      double J = 0.0;
      for (std::size_t i = 0; i < n; ++i) J += op.measures()[i] * s[i] * rec.eigen->phi1_compact[i];
      smp.J = J;
    } else if (kernel && t < *config.jt_horizon && is_finite(s)) {
      smp.J = functional_JT(*kernel, *config.source_vertex, *config.jt_horizon, t, full_state(s));
    } else {
      smp.J = kNaN;
    }
    if (dirichlet && smp.u_min < -10.0 * config.local_tol) rec.integrity_violation = true;
    rec.samples.push_back(smp);
    if (config.record_states) rec.states.emplace_back(s.begin(), s.end());
  };

  std::array<std::vector<double>, 7> k;
  for (auto& v : k) v.assign(n, 0.0);
  std::vector<double> stage(n), trial(n);

  double t = 0.0;
  step_rhs(op, nl, u, k[0]);
  record(0.0, 0.0, u);

  auto steady = [&](std::span<const double> rhs, std::span<const double> s) {
    return config.detect_steady_state && sup_abs(rhs) <= 1e-10 * (1.0 + sup_abs(s));
  };
  if (steady(k[0], u)) {
    rec.verdict = Verdict::bounded;
    return rec;
  }

  double dt = config.dt_init;
  std::size_t next_sample = 1;
  const double interval = config.sample_interval.value_or(0.0);
  auto sample_time = [&](std::size_t i) { return static_cast<double>(i) * interval; };
  std::size_t since_record = 0;

  auto stage_combo = [&](double h, std::initializer_list<std::pair<int, double>> terms) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const auto& [j, a] : terms) acc += a * k[static_cast<std::size_t>(j)][i];
      stage[i] = u[i] + h * acc;
    }
  };

  while (true) {
    if (rec.accepted_steps + rec.rejected_steps >= config.max_steps) {
      throw SolverError("step limit reached before the horizon");
    }
    double h = std::min(dt, config.t_max - t);
    bool lands_on_sample = false;
    if (interval > 0.0) {
      while (sample_time(next_sample) <= t) ++next_sample;
      if (sample_time(next_sample) - t <= h) {
        h = sample_time(next_sample) - t;
        lands_on_sample = true;
      }
    }
    const bool lands_on_horizon = h >= config.t_max - t;

    stage_combo(h, {{0, a21}});
    step_rhs(op, nl, stage, k[1]);
    stage_combo(h, {{0, a31}, {1, a32}});
    step_rhs(op, nl, stage, k[2]);
    stage_combo(h, {{0, a41}, {1, a42}, {2, a43}});
    step_rhs(op, nl, stage, k[3]);
    stage_combo(h, {{0, a51}, {1, a52}, {2, a53}, {3, a54}});
    step_rhs(op, nl, stage, k[4]);
    stage_combo(h, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
    step_rhs(op, nl, stage, k[5]);
    for (std::size_t i = 0; i < n; ++i) {
      trial[i] = u[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                             b6 * k[5][i]);
    }
    step_rhs(op, nl, trial, k[6]);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                            e6 * k[5][i] + e7 * k[6][i]);
      const double scale = config.local_tol * (1.0 + std::max(std::abs(u[i]), std::abs(trial[i])));
      err = std::max(err, std::abs(e) / scale);
    }
    const bool finite = is_finite(trial) && is_finite(k[6]) && std::isfinite(err);
    const bool pinned = dt <= config.dt_min * (1.0 + 1e-9);

    if (!finite) {
      if (pinned) {
        rec.nonfinite = true;
        rec.verdict = Verdict::blowup;
        rec.T_est = t + h;
        record(t + h, h, trial);
        return rec;
      }
      ++rec.rejected_steps;
      dt = std::max(dt * 0.25, config.dt_min);
      continue;
    }
    if (err > 1.0 && !pinned) {
      ++rec.rejected_steps;
      dt = std::max(dt * std::max(0.25, 0.9 * std::pow(err, -0.2)), config.dt_min);
      continue;
    }

    ++rec.accepted_steps;
    if (lands_on_horizon || lands_on_sample) {
      t = lands_on_horizon ? config.t_max : sample_time(next_sample);
      t_carry = 0.0;
    } else {
      const double y = h - t_carry;
      const double sum = t + y;
      t_carry = (sum - t) - y;
      t = sum;
    }
    u.swap(trial);
    std::swap(k[0], k[6]);
    const double factor = err == 0.0 ? 2.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.25, 2.0);
    const double dt_next = std::clamp(dt * factor, config.dt_min, config.dt_max);

    const double linf = sup_abs(u);
    const bool blown = linf >= config.u_blow && h <= config.dt_min * (1.0 + 1e-9);
    const bool at_rest = steady(k[0], u);
    const bool done = blown || at_rest || lands_on_horizon;
    ++since_record;
    const bool want = interval > 0.0 ? lands_on_sample : since_record >= config.record_stride;
    if (want || done) {
      record(t, h, u);
      since_record = 0;
    }
    if (blown) {
      rec.verdict = Verdict::blowup;
      rec.T_est = t;
      return rec;
    }
    if (at_rest) {
      rec.verdict = Verdict::bounded;
      return rec;
    }
    if (lands_on_horizon) {
      rec.verdict = Verdict::horizon;
      return rec;
    }
    dt = dt_next;
  }
}

double functional_J(const WeightedGraph& g, const DomainDecomposition& dom, const EigenPair& eig,
                    const GraphFunction& state) {
  if (state.size() != g.num_vertices() || dom.graph_size() != g.num_vertices()) {
    throw ValidationError("state does not match the domain");
  }
  if (static_cast<std::size_t>(eig.phi1_compact.size()) != dom.interior_size()) {
    throw ValidationError("eigenpair does not match the domain");
  }
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (!dom.is_interior(x) && state(x) != 0.0) {
      throw ValidationError("state is nonzero outside the domain interior");
    }
  }
  double J = 0.0;
  const auto& interior = dom.interior();
  for (std::size_t i = 0; i < interior.size(); ++i) {
    J += g.mu(interior[i]) * state(interior[i]) * eig.phi1_compact[static_cast<Eigen::Index>(i)];
  }
  return J;
}

double functional_JT(const HeatKernelEvaluator& ev, VertexId nu, double T, double s,
                     const GraphFunction& state) {
  const WeightedGraph& g = ev.graph();
  if (!(s >= 0.0 && s < T)) throw ValidationError("need 0 <= s < T");
  if (state.size() != g.num_vertices()) throw ValidationError("state does not match the graph size");
  g.check_vertex(nu);
  const KernelSlice slice = ev.kernel_slice(T - s, nu);
  double acc = 0.0;
  for (VertexId x = 0; x < g.num_vertices(); ++x) acc += g.mu(x) * slice.values[x] * state(x);
  return acc;
}

JInequalityReport check_J_inequality(const TrajectoryRecord& record, const EigenPair& eig,
                                     const Nonlinearity& nl) {
  if (!record.eigen) throw ValidationError("J inequality needs a dirichlet run");
  std::vector<const TrajectorySample*> usable;
  for (const auto& s : record.samples) {
    if (std::isfinite(s.J)) usable.push_back(&s);
  }
  if (usable.size() < 10) throw ValidationError("too few samples for the J inequality");
  JInequalityReport rep;
  for (std::size_t i = 0; i + 1 < usable.size(); ++i) {
    const auto& a = *usable[i];
    const auto& b = *usable[i + 1];
    const double dJ = (b.J - a.J) / ((b.t - a.t) + (b.t_lo - a.t_lo));
    const double mid = 0.5 * (a.J + b.J);
    const auto g = [&](double J) { return -eig.lambda1 * J + nl(J); };
    double rhs = g(mid);
    // While g > 0 and J rises, J' >= g(J) integrates to
    // t_b - t_a <= int dJ / g(J): compare the secant with that harmonic mean.
    if (b.J > a.J && g(a.J) > 0.0 && rhs > 0.0 && g(b.J) > 0.0) {
      const double inv = Gauss::integrate([&](double J) { return 1.0 / g(J); }, a.J, b.J);
      if (inv > 0.0 && std::isfinite(inv)) rhs = (b.J - a.J) / inv;
    }
    if (!std::isfinite(rhs) || !std::isfinite(dJ)) continue;
    const double v = std::max(rhs - dJ, 0.0);
    rep.max_violation = std::max(rep.max_violation, v);
    rep.max_normalized_violation = std::max(rep.max_normalized_violation, v / (1.0 + std::abs(rhs)));
    ++rep.intervals;
  }
  return rep;
}

double check_comparison(const TrajectoryRecord& upper, const TrajectoryRecord& lower) {
  if (upper.states.size() != upper.samples.size() || lower.states.size() != lower.samples.size()) {
    throw ValidationError("comparison needs recorded states");
  }
  if (upper.state_vertices != lower.state_vertices) {
    throw ValidationError("runs are on different domains");
  }
  const std::size_t shared = std::min(upper.samples.size(), lower.samples.size());
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < shared; ++i) {
    if (upper.samples[i].t != lower.samples[i].t) {
      const bool terminal = i + 1 == upper.samples.size() || i + 1 == lower.samples.size();
      if (terminal) continue;
      throw ValidationError("mismatched sampling grids");
    }
    const auto& su = upper.states[i];
    const auto& sl = lower.states[i];
    for (std::size_t j = 0; j < su.size(); ++j) worst = std::max(worst, sl[j] - su[j]);
  }
  return worst;
}

}  // namespace graphblow
