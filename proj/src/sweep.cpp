#include "graphblow/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "graphblow/criteria.hpp"
#include "graphblow/errors.hpp"
#include "graphblow/text.hpp"

namespace graphblow {

namespace {

VertexId vertex_of(const WeightedGraph& g, std::string_view token) {
  const std::int64_t label = parse_int(token, "vertex id");
  const auto v = g.find_label(label);
  if (!v) throw ValidationError("unknown vertex id " + std::string(token));
  return *v;
}

std::string_view strip_prefix(std::string_view text, std::string_view prefix) {
  return text.substr(prefix.size());
}

template <class T, class Parse>
std::vector<T> parse_list(std::string_view value, Parse parse) {
  std::vector<T> out;
  if (trim(value).empty()) return out;
  for (auto item : split(value, ',')) {
    item = trim(item);
    if (item.empty()) throw ValidationError("empty entry in list '" + std::string(value) + "'");
    out.push_back(parse(item));
  }
  return out;
}

std::string criterion_cell(const CriterionVerdict& v) { return to_string(v.holds); }

}  // namespace

void set_run_key(RunSpec& spec, std::string_view key, std::string_view value) {
  const std::string v(trim(value));
  if (key == "graph") {
    spec.graph = v;
  } else if (key == "problem") {
    if (v != "cauchy" && v != "dirichlet") throw ValidationError("problem must be cauchy or dirichlet");
    spec.problem = v;
  } else if (key == "omega") {
    spec.omega = v;
  } else if (key == "f") {
    spec.f = v;
  } else if (key == "alpha") {
    spec.alpha = parse_double(v, "alpha");
  } else if (key == "init") {
    spec.init = v;
  } else if (key == "init-scale") {
    spec.init_scale = parse_double(v, "init-scale");
  } else if (key == "t-max") {
    spec.t_max = parse_double(v, "t-max");
  } else if (key == "tol") {
    spec.tol = parse_double(v, "tol");
  } else if (key == "u-blow") {
    spec.u_blow = parse_double(v, "u-blow");
  } else if (key == "dt-init") {
    spec.dt_init = parse_double(v, "dt-init");
  } else if (key == "dt-min") {
    spec.dt_min = parse_double(v, "dt-min");
  } else if (key == "dt-max") {
    spec.dt_max = parse_double(v, "dt-max");
  } else if (key == "stride") {
    spec.stride = parse_size(v, "stride");
  } else if (key == "truncation") {
    spec.truncation = parse_size(v, "truncation");
  } else if (key == "source") {
    spec.source = parse_int(v, "source");
  } else if (key == "sample-interval") {
    spec.sample_interval = parse_double(v, "sample-interval");
  } else if (key == "m") {
    spec.m = parse_double(v, "m");
  } else {
    throw ValidationError("unknown key '" + std::string(key) + "'");
  }
}

DomainDecomposition parse_omega(const WeightedGraph& g, std::string_view text) {
  if (text == "all") return DomainDecomposition::whole(g);
  if (text.starts_with("ball:")) {
    const auto parts = split(strip_prefix(text, "ball:"), ':');
    if (parts.size() != 2) throw ValidationError("omega ball needs ball:<v>:<r>");
    const double r = parse_double(parts[1], "ball radius");
    if (!(r >= 0.0)) throw ValidationError("ball radius must be non-negative");
    return DomainDecomposition::from_ball(g, vertex_of(g, parts[0]), r);
  }
  if (text.starts_with("list:")) {
    const std::string path(strip_prefix(text, "list:"));
    std::ifstream in(path);
    if (!in) throw IoError("cannot open omega list '" + path + "'");
    std::vector<VertexId> omega;
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      for (auto tok : split_whitespace(line)) omega.push_back(vertex_of(g, tok));
    }
    return DomainDecomposition::from_vertices(g, std::move(omega));
  }
  throw ValidationError("unknown omega '" + std::string(text) + "'");
}

GraphFunction parse_init(const WeightedGraph& g, std::string_view text) {
  if (text.starts_with("const:")) {
    return GraphFunction::constant(g.num_vertices(), parse_double(strip_prefix(text, "const:"), "init constant"));
  }
  if (text.starts_with("delta:")) {
    const auto parts = split(strip_prefix(text, "delta:"), ':');
    if (parts.size() != 2) throw ValidationError("delta init needs delta:<v>:<c>");
    std::vector<double> values(g.num_vertices(), 0.0);
    values[vertex_of(g, parts[0])] = parse_double(parts[1], "delta amplitude");
    return GraphFunction(std::move(values));
  }
  if (text.starts_with("file:")) return read_function_file(std::string(strip_prefix(text, "file:")), g);
  if (text.empty()) throw ValidationError("missing initial data");
  throw ValidationError("unknown init '" + std::string(text) + "'");
}

ResolvedRun resolve_run(const RunSpec& spec) {
  WeightedGraph g = load_graph(spec.graph);
  Nonlinearity nl = make_nonlinearity(spec.f, spec.alpha);
  SimulationConfig cfg;
  if (spec.problem == "dirichlet") {
    cfg.problem = Problem::dirichlet(parse_omega(g, spec.omega));
  } else if (spec.problem == "cauchy") {
    if (spec.omega != "all") throw ValidationError("omega applies to dirichlet problems only");
  } else {
    throw ValidationError("problem must be cauchy or dirichlet");
  }
  GraphFunction init = parse_init(g, spec.init);
  if (!std::isfinite(spec.init_scale) || spec.init_scale < 0.0) {
    throw ValidationError("init-scale must be non-negative");
  }
  if (spec.init_scale != 1.0) {
    std::vector<double> scaled(init.values().begin(), init.values().end());
    for (double& v : scaled) v *= spec.init_scale;
    init = GraphFunction(std::move(scaled));
  }
  cfg.initial = std::move(init);
  if (spec.source) {
    cfg.source_vertex = vertex_of(g, std::to_string(*spec.source));
  } else if (spec.init.starts_with("delta:")) {
    cfg.source_vertex = vertex_of(g, split(strip_prefix(spec.init, "delta:"), ':').front());
  }
  cfg.truncation_radius = spec.truncation;
  cfg.t_max = spec.t_max;
  cfg.local_tol = spec.tol;
  cfg.u_blow = spec.u_blow;
  cfg.dt_init = spec.dt_init;
  cfg.dt_min = spec.dt_min;
  cfg.dt_max = spec.dt_max;
  cfg.record_stride = spec.stride;
  cfg.sample_interval = spec.sample_interval;
  validate_config(g, cfg);
  return {std::move(g), std::move(cfg), std::move(nl)};
}

std::size_t SweepConfig::size() const {
  auto n = [](std::size_t k) { return k == 0 ? std::size_t{1} : k; };
  return n(alpha.size()) * n(init_scale.size()) * n(truncation.size());
}

SweepConfig parse_sweep_config(std::istream& in) {
  SweepConfig cfg;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    try {
      if (text.front() == '[') {
        if (text.back() != ']') throw ValidationError("unterminated section header");
        section = std::string(text.substr(1, text.size() - 2));
        if (section != "base" && section != "axes" && section != "output") {
          throw ValidationError("unknown section '" + section + "'");
        }
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string_view::npos) throw ValidationError("expected key = value");
      const std::string_view key = trim(text.substr(0, eq));
      const std::string_view value = trim(text.substr(eq + 1));
      if (section == "base") {
        set_run_key(cfg.base, key, value);
      } else if (section == "axes") {
        if (key == "alpha") {
          cfg.alpha = parse_list<double>(value, [](auto s) { return parse_double(s, "alpha"); });
        } else if (key == "init-scale") {
          cfg.init_scale = parse_list<double>(value, [](auto s) { return parse_double(s, "init-scale"); });
        } else if (key == "truncation") {
          cfg.truncation = parse_list<std::size_t>(value, [](auto s) { return parse_size(s, "truncation"); });
        } else {
          throw ValidationError("unknown axis '" + std::string(key) + "'");
        }
      } else if (section == "output") {
        if (key == "dir") {
          cfg.output_dir = std::string(value);
        } else if (key == "parallelism") {
          cfg.parallelism = parse_size(value, "parallelism");
          if (cfg.parallelism == 0) throw ValidationError("parallelism must be positive");
        } else if (key == "cap") {
          cfg.cap = parse_size(value, "cap");
        } else {
          throw ValidationError("unknown output key '" + std::string(key) + "'");
        }
      } else {
        throw ValidationError("key outside a section");
      }
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

SweepConfig read_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep config '" + path + "'");
  return parse_sweep_config(in);
}

std::vector<RunSpec> expand_sweep(const SweepConfig& cfg) {
  if (cfg.size() > cfg.cap) {
    throw ValidationError("sweep has " + std::to_string(cfg.size()) + " points, above the cap of " +
                          std::to_string(cfg.cap));
  }
  const std::vector<double> alphas = cfg.alpha.empty() ? std::vector<double>{cfg.base.alpha} : cfg.alpha;
  const std::vector<double> scales =
      cfg.init_scale.empty() ? std::vector<double>{cfg.base.init_scale} : cfg.init_scale;
  std::vector<std::optional<std::size_t>> truncs;
  if (cfg.truncation.empty()) {
    truncs.push_back(cfg.base.truncation);
  } else {
    for (auto r : cfg.truncation) truncs.emplace_back(r);
  }
  std::vector<RunSpec> out;
  for (double a : alphas) {
    for (double s : scales) {
      for (const auto& r : truncs) {
        RunSpec spec = cfg.base;
        spec.alpha = a;
        spec.init_scale = s;
        spec.truncation = r;
        out.push_back(std::move(spec));
      }
    }
  }
  // Validate every point before any work starts.
  for (const auto& spec : out) resolve_run(spec);
  return out;
}

namespace {

ManifestRow execute_point(const RunSpec& spec, std::size_t index, const std::filesystem::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  ResolvedRun run = resolve_run(spec);
  const TrajectoryRecord rec = integrate(run.graph, run.config, run.nl);

  ManifestRow row;
  row.index = index;
  row.alpha = spec.alpha;
  row.init_scale = spec.init_scale;
  row.truncation = spec.truncation;
  row.file = "run_" + std::to_string(index) + ".csv";
  row.verdict = rec.verdict;
  row.T_est = rec.T_est;

  std::ofstream out(dir / row.file);
  if (!out) throw IoError("cannot write " + (dir / row.file).string());
  write_trajectory_csv(out, rec);
  if (!out) throw IoError("cannot write " + (dir / row.file).string());

  if (spec.m) {
    try {
      row.thm1 = criterion_cell(check_thm1(run.nl, *spec.m));
    } catch (const ValidationError&) {
      row.thm1 = "NA";
    }
  }
  if (spec.problem == "dirichlet" && rec.eigen) {
    try {
      const DomainDecomposition& dom = *run.config.problem.domain;
      const double kappa = initial_mass(run.graph, dom, *rec.eigen, run.config.initial);
      row.thm2 = criterion_cell(
          check_thm2(run.graph, dom, *rec.eigen, run.nl, run.config.initial, 1e3 * std::max(1.0, kappa)));
    } catch (const ValidationError&) {
      row.thm2 = "NA";
    }
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::size_t worker_count(std::size_t configured) {
  if (const char* env = std::getenv("GRAPHBLOW_THREADS"); env && *env) {
    const std::size_t n = parse_size(env, "GRAPHBLOW_THREADS");
    if (n == 0) throw ValidationError("GRAPHBLOW_THREADS must be positive");
    return n;
  }
  return configured;
}

}  // namespace

RunManifest run_sweep(const SweepConfig& cfg) {
  const std::vector<RunSpec> specs = expand_sweep(cfg);
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
    throw IoError("output directory not writable: " + cfg.output_dir.string());
  }

  RunManifest manifest;
  manifest.rows.resize(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  {
    const std::size_t workers = std::min(worker_count(cfg.parallelism), specs.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) {
          try {
            manifest.rows[i] = execute_point(specs[i], i, cfg.output_dir);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ofstream out(cfg.output_dir / "manifest.csv");
  if (!out) throw IoError("cannot write manifest.csv");
  write_manifest(out, manifest);
  if (!out) throw IoError("cannot write manifest.csv");
  return manifest;
}

void write_manifest(std::ostream& out, const RunManifest& manifest) {
  out << "run,alpha,init_scale,truncation,file,verdict,T_est,thm1,thm2,wall_seconds\n";
  for (const auto& r : manifest.rows) {
    out << r.index << ',' << format_double(r.alpha) << ',' << format_double(r.init_scale) << ','
        << (r.truncation ? std::to_string(*r.truncation) : std::string("NA")) << ',' << r.file << ','
        << to_string(r.verdict) << ',' << (r.T_est ? format_double(*r.T_est) : std::string("NA"))
        << ',' << r.thm1 << ',' << r.thm2 << ',' << format_double(r.wall_seconds) << '\n';
  }
}

}  // namespace graphblow
