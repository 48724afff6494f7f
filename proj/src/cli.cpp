#include "graphblow/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "graphblow/criteria.hpp"
#include "graphblow/dynamics.hpp"
#include "graphblow/errors.hpp"
#include "graphblow/graph.hpp"
#include "graphblow/heat_kernel.hpp"
#include "graphblow/laplacian.hpp"
#include "graphblow/spectral.hpp"
#include "graphblow/sweep.hpp"
#include "graphblow/text.hpp"

namespace graphblow {

namespace {

template <class Write>
void emit(const std::string& path, std::ostream& fallback, Write write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw IoError("write to '" + path + "' failed");
}

VertexId vertex_label(const WeightedGraph& g, std::int64_t label) {
  const auto v = g.find_label(label);
  if (!v) throw ValidationError("unknown vertex id " + std::to_string(label));
  return *v;
}

void print_verdict(std::ostream& out, const CriterionVerdict& v) {
  out << "criterion=" << to_string(v.criterion) << '\n';
  out << "verdict=" << to_string(v.holds) << '\n';
  for (const auto& [k, val] : v.witness) out << k << '=' << val << '\n';
}

std::string one_line(std::string msg) {
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return msg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semilinear heat flow and blow-up on weighted graphs", "graphblow"};
  app.require_subcommand(1);
  std::function<void()> action;

  // graph-gen
  std::string gen_graph, gen_out;
  auto* gen = app.add_subcommand("graph-gen", "Write a generated graph in the edge-list format");
  gen->add_option("--graph", gen_graph, "Descriptor, e.g. lattice:2:11")->required();
  gen->add_option("--out", gen_out, "Output file (stdout if omitted)");
  gen->callback([&] {
    action = [&] {
      const WeightedGraph g = build_graph(parse_graph_descriptor(gen_graph));
      emit(gen_out, out, [&](std::ostream& o) { write_graph(o, g); });
    };
  });

  // simulate
  RunSpec spec;
  std::string sim_out;
  std::optional<double> sim_scale;
  auto* sim = app.add_subcommand("simulate", "Integrate u_t = Delta u + f(u)");
  sim->add_option("--graph", spec.graph, "Graph file or descriptor")->required();
  sim->add_option("--problem", spec.problem, "cauchy or dirichlet")
      ->check(CLI::IsMember({"cauchy", "dirichlet"}));
  sim->add_option("--omega", spec.omega, "all, ball:<v>:<r> or list:<file>");
  sim->add_option("--f", spec.f, "power, expm1, exp or linear");
  sim->add_option("--alpha", spec.alpha, "Exponent of power(alpha)");
  sim->add_option("--init", spec.init, "const:<c>, delta:<v>:<c> or file:<path>")->required();
  sim->add_option("--init-scale", spec.init_scale, "Multiplier for the initial data");
  sim->add_option("--t-max", spec.t_max, "Time horizon");
  sim->add_option("--tol", spec.tol, "Local error tolerance");
  sim->add_option("--u-blow", spec.u_blow, "Blow-up threshold");
  sim->add_option("--dt-init", spec.dt_init);
  sim->add_option("--dt-min", spec.dt_min);
  sim->add_option("--dt-max", spec.dt_max);
  sim->add_option("--stride", spec.stride, "Record every n-th accepted step");
  sim->add_option("--sample-interval", spec.sample_interval, "Record on a fixed time grid");
  sim->add_option("--truncation", spec.truncation, "Ball truncation radius for cauchy runs");
  sim->add_option("--source", spec.source, "Source vertex id");
  sim->add_option("--out", sim_out, "Trajectory CSV (stdout if omitted)");
  sim->callback([&] {
    action = [&] {
      const ResolvedRun run = resolve_run(spec);
      const TrajectoryRecord rec = integrate(run.graph, run.config, run.nl);
      emit(sim_out, out, [&](std::ostream& o) { write_trajectory_csv(o, rec); });
      if (!sim_out.empty() && sim_out != "-") {
        out << "verdict=" << to_string(rec.verdict) << '\n';
        out << "T_est=" << (rec.T_est ? format_double(*rec.T_est) : std::string("NA")) << '\n';
        if (rec.T_tail) out << "T_tail=" << format_double(*rec.T_tail) << '\n';
        if (rec.nonfinite) out << "nonfinite=true\n";
        if (rec.integrity_violation) out << "integrity_violation=true\n";
      }
    };
  });

  // heat-kernel
  std::string hk_graph, hk_out, hk_method = "series";
  std::int64_t hk_source = 0;
  double hk_t = 1.0, hk_tol = 1e-12;
  auto* hk = app.add_subcommand("heat-kernel", "Evaluate p(t, source, .)");
  hk->add_option("--graph", hk_graph, "Graph file or descriptor")->required();
  hk->add_option("--source", hk_source, "Source vertex id")->required();
  hk->add_option("--t", hk_t, "Time")->required();
  hk->add_option("--method", hk_method)->check(CLI::IsMember({"series", "dense"}));
  hk->add_option("--tol", hk_tol, "Series truncation tolerance");
  hk->add_option("--out", hk_out, "CSV vertex,p_value (stdout if omitted)");
  hk->callback([&] {
    action = [&] {
      const WeightedGraph g = load_graph(hk_graph);
      const HeatKernelEvaluator ev(g, hk_method == "dense" ? HeatMethod::dense : HeatMethod::series,
                                   hk_tol);
      const KernelSlice slice = ev.kernel_slice(hk_t, vertex_label(g, hk_source));
      emit(hk_out, out, [&](std::ostream& o) {
        o << "vertex,p_value\n";
        for (VertexId y = 0; y < g.num_vertices(); ++y) {
          o << g.label(y) << ',' << format_double(slice.values[y]) << '\n';
        }
      });
    };
  });

  // eigen
  std::string eg_graph, eg_omega = "all", eg_out, eg_method = "auto";
  auto* eg = app.add_subcommand("eigen", "First Dirichlet eigenpair");
  eg->add_option("--graph", eg_graph, "Graph file or descriptor")->required();
  eg->add_option("--omega", eg_omega, "all, ball:<v>:<r> or list:<file>");
  eg->add_option("--method", eg_method)->check(CLI::IsMember({"auto", "dense", "iterative"}));
  eg->add_option("--out", eg_out, "Function file for phi1");
  eg->callback([&] {
    action = [&] {
      const WeightedGraph g = load_graph(eg_graph);
      const DomainDecomposition dom = parse_omega(g, eg_omega);
      SpectralOptions opts;
      if (eg_method == "dense") opts.method = EigenMethod::dense;
      if (eg_method == "iterative") opts.method = EigenMethod::iterative;
      const EigenPair eig = first_eigenpair(g, dom, opts);
      out << "lambda1=" << format_double(eig.lambda1) << '\n';
      out << "residual=" << format_double(eig.residual) << '\n';
      out << "interior_size=" << dom.interior_size() << '\n';
      if (!eg_out.empty()) write_function_file(eg_out, g, eig.phi1);
    };
  });

  // criteria
  auto* cr = app.add_subcommand("criteria", "Sufficient blow-up conditions");
  cr->require_subcommand(1);
  std::string cr_f = "power";
  double cr_alpha = 1.0;
  double cr_m = 1.0;
  double cr_t_lo = 1e2, cr_t_hi = 1e10;
  std::size_t cr_t_n = 81;
  bool cr_grid = false;
  auto* t1 = cr->add_subcommand("thm1", "Volume-growth criterion for the Cauchy problem");
  t1->add_option("--f", cr_f);
  t1->add_option("--alpha", cr_alpha);
  t1->add_option("--m", cr_m, "Volume growth degree")->required();
  t1->add_option("--t-min", cr_t_lo);
  t1->add_option("--t-max", cr_t_hi);
  t1->add_option("--t-points", cr_t_n);
  t1->add_flag("--grid", cr_grid, "Force the theta grid search");
  t1->callback([&] {
    action = [&] {
      const Nonlinearity nl = make_nonlinearity(cr_f, cr_alpha);
      const auto grid = geometric_grid(cr_t_lo, cr_t_hi, cr_t_n);
      print_verdict(out, cr_grid ? check_thm1_grid(nl, cr_m, grid) : check_thm1(nl, cr_m, grid));
    };
  });
  std::string t2_graph, t2_omega = "all", t2_init;
  double t2_tau_max = 0.0;
  auto* t2 = cr->add_subcommand("thm2", "Dirichlet criterion");
  t2->add_option("--graph", t2_graph)->required();
  t2->add_option("--omega", t2_omega);
  t2->add_option("--f", cr_f);
  t2->add_option("--alpha", cr_alpha);
  t2->add_option("--init", t2_init)->required();
  t2->add_option("--tau-max", t2_tau_max, "Upper end of the tau grid (default 1e3 max(1, kappa))");
  t2->callback([&] {
    action = [&] {
      const WeightedGraph g = load_graph(t2_graph);
      const DomainDecomposition dom = parse_omega(g, t2_omega);
      const Nonlinearity nl = make_nonlinearity(cr_f, cr_alpha);
      const GraphFunction a = parse_init(g, t2_init);
      const EigenPair eig = first_eigenpair(g, dom);
      const double kappa = initial_mass(g, dom, eig, a);
      const double tau_max = t2_tau_max > 0.0 ? t2_tau_max : 1e3 * std::max(1.0, kappa);
      print_verdict(out, check_thm2(g, dom, eig, nl, a, tau_max));
    };
  });
  std::vector<double> os_r{1.0};
  auto* os = cr->add_subcommand("osgood", "F(r) = integral_r^inf dtau / f(tau)");
  os->add_option("--f", cr_f);
  os->add_option("--alpha", cr_alpha);
  os->add_option("--r", os_r, "Lower limits")->expected(1, -1);
  os->callback([&] {
    action = [&] {
      const Nonlinearity nl = make_nonlinearity(cr_f, cr_alpha);
      const OsgoodReport rep = osgood_report(nl, os_r);
      out << "finite=" << (rep.finite ? "true" : "false") << '\n';
      out << "method=" << (rep.method == OsgoodMethod::closed_form ? "closed-form" : "quadrature") << '\n';
      for (const auto& [r, F] : rep.F_at) out << "F(" << format_double(r) << ")=" << format_double(F) << '\n';
      if (rep.cross_check) out << "cross_check=" << format_double(*rep.cross_check) << '\n';
    };
  });
  auto* hy = cr->add_subcommand("hypotheses", "Probe H1-H4");
  hy->add_option("--f", cr_f);
  hy->add_option("--alpha", cr_alpha);
  hy->callback([&] {
    action = [&] {
      const HypothesisReport rep = check_hypotheses(make_nonlinearity(cr_f, cr_alpha));
      auto b = [](bool v) { return v ? "true" : "false"; };
      out << "H1=" << b(rep.flags.h1) << "\nH2=" << b(rep.flags.h2) << "\nH3=" << b(rep.flags.h3)
          << "\nH4=" << b(rep.flags.h4) << "\nprobe_limit=" << format_double(rep.probe_limit) << '\n';
    };
  });

  // sweep
  std::string sw_config, sw_out;
  std::size_t sw_par = 0;
  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
  sw->add_option("--config", sw_config)->required();
  sw->add_option("--out", sw_out, "Output directory (overrides the config)");
  sw->add_option("--parallelism", sw_par);
  sw->callback([&] {
    action = [&] {
      SweepConfig cfg = read_sweep_config(sw_config);
      if (!sw_out.empty()) cfg.output_dir = sw_out;
      if (sw_par > 0) cfg.parallelism = sw_par;
      const RunManifest m = run_sweep(cfg);
      out << "runs=" << m.rows.size() << '\n';
      out << "manifest=" << (cfg.output_dir / "manifest.csv").string() << '\n';
    };
  });

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    err << "graphblow: unknown subcommand '" << argv[1] << "'\n";
    return 2;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "graphblow: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "graphblow: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const ValidationError& e) {
    err << "graphblow: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "graphblow: " << one_line(e.what()) << '\n';
    return 3;
  } catch (const SolverError& e) {
    err << "graphblow: " << one_line(e.what()) << '\n';
    return 1;
  }
}

}  // namespace graphblow
