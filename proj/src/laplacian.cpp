#include "graphblow/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>

#include "graphblow/errors.hpp"
#include "graphblow/text.hpp"

namespace graphblow {

// ---------------------------------------------------------------------------
// DomainDecomposition

DomainDecomposition DomainDecomposition::from_vertices(const WeightedGraph& g,
                                                       std::vector<VertexId> omega) {
  if (omega.empty()) throw ValidationError("domain Omega is empty");
  for (const auto x : omega) g.check_vertex(x);
  std::sort(omega.begin(), omega.end());
  omega.erase(std::unique(omega.begin(), omega.end()), omega.end());

  std::vector<char> in_omega(g.num_vertices(), 0);
  for (const auto x : omega) in_omega[x] = 1;

  DomainDecomposition dom;
  dom.omega_ = std::move(omega);
  dom.index_.assign(g.num_vertices(), -1);
  for (const auto x : dom.omega_) {
    bool on_boundary = g.is_truncation_cut(x);
    for (const auto& nb : g.neighbors(x)) {
      if (!in_omega[nb.vertex]) {
        on_boundary = true;
        break;
      }
    }
    if (on_boundary) {
      dom.boundary_.push_back(x);
    } else {
      dom.index_[x] = static_cast<std::ptrdiff_t>(dom.interior_.size());
      dom.interior_.push_back(x);
    }
  }
  if (dom.interior_.empty()) throw ValidationError("domain interior is empty");

  // Induced connectivity of the interior.
  std::vector<char> seen(g.num_vertices(), 0);
  std::queue<VertexId> frontier;
  frontier.push(dom.interior_.front());
  seen[dom.interior_.front()] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto x = frontier.front();
    frontier.pop();
    for (const auto& nb : g.neighbors(x)) {
      if (dom.index_[nb.vertex] >= 0 && !seen[nb.vertex]) {
        seen[nb.vertex] = 1;
        ++reached;
        frontier.push(nb.vertex);
      }
    }
  }
  if (reached != dom.interior_.size()) {
    throw ValidationError("domain interior is not connected");
  }
  return dom;
}

DomainDecomposition DomainDecomposition::from_ball(const WeightedGraph& g, VertexId center,
                                                   double radius) {
  return from_vertices(g, ball(g, center, radius));
}

DomainDecomposition DomainDecomposition::whole(const WeightedGraph& g) {
  std::vector<VertexId> all(g.num_vertices());
  for (VertexId x = 0; x < all.size(); ++x) all[x] = x;
  return from_vertices(g, std::move(all));
}

Eigen::VectorXd DomainDecomposition::restrict(std::span<const double> full) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(interior_.size()));
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = full[interior_[i]];
  }
  return out;
}

std::vector<double> DomainDecomposition::extend(const Eigen::VectorXd& compact) const {
  std::vector<double> out(index_.size(), 0.0);
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    out[interior_[i]] = compact[static_cast<Eigen::Index>(i)];
  }
  return out;
}

void DomainDecomposition::check_graph(const WeightedGraph& g) const {
  if (g.num_vertices() != index_.size()) {
    throw ValidationError("domain was built for a different graph");
  }
}

// ---------------------------------------------------------------------------
// GraphFunction

GraphFunction::GraphFunction(std::vector<double> values) : values_(std::move(values)) {}

GraphFunction::GraphFunction(const DomainDecomposition& dom, std::vector<double> full_values)
    : values_(std::move(full_values)) {
  if (values_.size() != dom.graph_size()) {
    throw ValidationError("function length does not match the graph");
  }
  auto mask = std::make_shared<std::vector<char>>(values_.size(), 0);
  for (const auto x : dom.interior()) (*mask)[x] = 1;
  for (std::size_t x = 0; x < values_.size(); ++x) {
    if (!(*mask)[x]) values_[x] = 0.0;
  }
  mask_ = std::move(mask);
}

GraphFunction GraphFunction::from_compact(const DomainDecomposition& dom,
                                          const Eigen::VectorXd& compact) {
  return GraphFunction(dom, dom.extend(compact));
}

GraphFunction GraphFunction::constant(std::size_t n, double c) {
  return GraphFunction(std::vector<double>(n, c));
}

double GraphFunction::sup_norm() const {
  double best = 0.0;
  for (const double v : values_) best = std::max(best, std::abs(v));
  return best;
}

// ---------------------------------------------------------------------------
// Pointwise operators

double apply_laplacian(const WeightedGraph& g, const GraphFunction& h, VertexId x) {
  g.check_vertex(x);
  if (h.size() != g.num_vertices() || !h.supported_everywhere()) {
    throw ValidationError("Laplacian input must be a function on all vertices");
  }
  double acc = 0.0;
  for (const auto& nb : g.neighbors(x)) acc += nb.weight * (h(nb.vertex) - h(x));
  return acc / g.mu(x);
}

double apply_dirichlet_laplacian(const WeightedGraph& g, const DomainDecomposition& dom,
                                 const GraphFunction& h, VertexId x) {
  dom.check_graph(g);
  g.check_vertex(x);
  if (!dom.is_interior(x)) throw ValidationError("vertex is not in the domain interior");
  if (h.size() != g.num_vertices()) throw ValidationError("function length does not match the graph");
  const auto value = [&](VertexId y) { return dom.is_interior(y) ? h(y) : 0.0; };
  double acc = 0.0;
  for (const auto& nb : g.neighbors(x)) acc += nb.weight * (value(nb.vertex) - value(x));
  return acc / g.mu(x);
}

std::vector<double> laplacian(const WeightedGraph& g, std::span<const double> h) {
  if (h.size() != g.num_vertices()) throw ValidationError("function length does not match the graph");
  std::vector<double> out(h.size());
  for (VertexId x = 0; x < h.size(); ++x) {
    double acc = 0.0;
    for (const auto& nb : g.neighbors(x)) acc += nb.weight * (h[nb.vertex] - h[x]);
    out[x] = acc / g.mu(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LaplacianOperator

LaplacianOperator LaplacianOperator::full(const WeightedGraph& g) {
  LaplacianOperator op;
  const auto n = g.num_vertices();
  op.mu_.assign(g.measures().begin(), g.measures().end());
  op.degree_.resize(n);
  op.offsets_.assign(n + 1, 0);
  for (VertexId x = 0; x < n; ++x) {
    op.degree_[x] = g.degree(x);
    for (const auto& nb : g.neighbors(x)) op.entries_.push_back({nb.vertex, nb.weight});
    op.offsets_[x + 1] = op.entries_.size();
    op.diag_bound_ = std::max(op.diag_bound_, op.degree_[x] / op.mu_[x]);
  }
  return op;
}

LaplacianOperator LaplacianOperator::dirichlet(const WeightedGraph& g,
                                               const DomainDecomposition& dom) {
  dom.check_graph(g);
  LaplacianOperator op;
  const auto n = dom.interior_size();
  op.mu_.resize(n);
  op.degree_.resize(n);
  op.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = dom.interior()[i];
    op.mu_[i] = g.mu(x);
    op.degree_[i] = g.degree(x);
    for (const auto& nb : g.neighbors(x)) {
      if (dom.is_interior(nb.vertex)) {
        op.entries_.push_back({dom.interior_index(nb.vertex), nb.weight});
      }
    }
    op.offsets_[i + 1] = op.entries_.size();
    op.diag_bound_ = std::max(op.diag_bound_, op.degree_[i] / op.mu_[i]);
  }
  return op;
}

void LaplacianOperator::apply(std::span<const double> in, std::span<double> out) const {
  const auto n = mu_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = -degree_[i] * in[i];
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      acc += entries_[k].weight * in[entries_[k].col];
    }
    out[i] = acc / mu_[i];
  }
}

Eigen::VectorXd LaplacianOperator::apply(const Eigen::VectorXd& in) const {
  Eigen::VectorXd out(in.size());
  apply(std::span<const double>(in.data(), static_cast<std::size_t>(in.size())),
        std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Eigen::MatrixXd assemble_dirichlet_matrix(const WeightedGraph& g, const DomainDecomposition& dom) {
  dom.check_graph(g);
  const auto n = dom.interior_size();
  if (n > kDenseCap) {
    throw ValidationError("interior of size " + std::to_string(n) +
                          " exceeds the dense assembly cap");
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = dom.interior()[i];
    const auto row = static_cast<Eigen::Index>(i);
    L(row, row) = g.degree(x) / g.mu(x);
    for (const auto& nb : g.neighbors(x)) {
      if (dom.is_interior(nb.vertex)) {
        L(row, static_cast<Eigen::Index>(dom.interior_index(nb.vertex))) = -nb.weight / g.mu(x);
      }
    }
  }
  return L;
}

Eigen::MatrixXd assemble_laplacian_matrix(const WeightedGraph& g) {
  const auto n = g.num_vertices();
  if (n > kDenseCap) throw ValidationError("graph exceeds the dense assembly cap");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (VertexId x = 0; x < n; ++x) {
    const auto row = static_cast<Eigen::Index>(x);
    L(row, row) = g.degree(x) / g.mu(x);
    for (const auto& nb : g.neighbors(x)) {
      L(row, static_cast<Eigen::Index>(nb.vertex)) = -nb.weight / g.mu(x);
    }
  }
  return L;
}

// ---------------------------------------------------------------------------
// Function files

GraphFunction parse_function(std::istream& in, const WeightedGraph& g) {
  std::vector<double> values(g.num_vertices(), 0.0);
  std::vector<char> seen(g.num_vertices(), 0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tok = split_whitespace(body);
    const auto where = "function file line " + std::to_string(lineno) + ": ";
    if (tok.size() != 3 || tok[0] != "a") throw ValidationError(where + "expected 'a <vertex-id> <value>'");
    const auto id = parse_int(tok[1], "vertex id");
    const auto x = g.find_label(id);
    if (!x) throw ValidationError(where + "unknown vertex " + std::string(tok[1]));
    if (seen[*x]) throw ValidationError(where + "duplicate vertex " + std::string(tok[1]));
    seen[*x] = 1;
    values[*x] = parse_double(tok[2], "function value");
  }
  return GraphFunction(std::move(values));
}

GraphFunction read_function_file(const std::string& path, const WeightedGraph& g) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open function file '" + path + "'");
  return parse_function(in, g);
}

void write_function(std::ostream& out, const WeightedGraph& g, const GraphFunction& f) {
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (f.in_support(x)) out << "a " << g.label(x) << ' ' << format_double(f(x)) << '\n';
  }
}

void write_function_file(const std::string& path, const WeightedGraph& g, const GraphFunction& f) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write function file '" + path + "'");
  write_function(out, g, f);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace graphblow
