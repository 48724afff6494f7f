#include "graphblow/spectral.hpp"

#include <cmath>
#include <random>

#include "graphblow/errors.hpp"

namespace graphblow {

namespace {

// M^{1/2} (-Delta_Omega) M^{-1/2}: symmetric, same spectrum.
Eigen::MatrixXd symmetrized_dirichlet(const WeightedGraph& g, const DomainDecomposition& dom) {
  const auto n = static_cast<Eigen::Index>(dom.interior_size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = dom.interior()[static_cast<std::size_t>(i)];
    S(i, i) = g.degree(x) / g.mu(x);
    for (const auto& nb : g.neighbors(x)) {
      if (dom.is_interior(nb.vertex)) {
        const auto j = static_cast<Eigen::Index>(dom.interior_index(nb.vertex));
        S(i, j) = -nb.weight / std::sqrt(g.mu(x) * g.mu(nb.vertex));
      }
    }
  }
  return S;
}

Eigen::VectorXd interior_measure(const WeightedGraph& g, const DomainDecomposition& dom) {
  Eigen::VectorXd mu(static_cast<Eigen::Index>(dom.interior_size()));
  for (std::size_t i = 0; i < dom.interior_size(); ++i) {
    mu[static_cast<Eigen::Index>(i)] = g.mu(dom.interior()[i]);
  }
  return mu;
}

double weighted_residual(const LaplacianOperator& op, const Eigen::VectorXd& mu, double lambda,
                         const Eigen::VectorXd& phi) {
  const Eigen::VectorXd r = -op.apply(phi) - lambda * phi;
  return std::sqrt((mu.array() * r.array().square()).sum());
}

// Sign-fix, normalize and package an eigenvector given in the mu-inner
// product coordinates (phi, not M^{1/2} phi).
EigenPair finish(const DomainDecomposition& dom, const LaplacianOperator& op,
                 const Eigen::VectorXd& mu, double lambda, Eigen::VectorXd phi,
                 std::size_t iterations) {
  double mass = mu.dot(phi);
  if (mass < 0.0) {
    phi = -phi;
    mass = -mass;
  }
  if (!(mass > 0.0)) throw SolverError("first eigenvector has zero mass");
  phi /= mass;
  if (phi.minCoeff() <= 0.0) {
    throw SolverError("first eigenvector is not strictly positive");
  }
  if (!(lambda > 0.0)) throw SolverError("first Dirichlet eigenvalue is not positive");

  EigenPair pair;
  pair.lambda1 = lambda;
  pair.residual = weighted_residual(op, mu, lambda, phi);
  pair.phi1_compact = phi;
  pair.phi1 = GraphFunction::from_compact(dom, phi);
  pair.iterations = iterations;
  return pair;
}

EigenPair dense_eigenpair(const WeightedGraph& g, const DomainDecomposition& dom) {
  const auto op = LaplacianOperator::dirichlet(g, dom);
  const Eigen::VectorXd mu = interior_measure(g, dom);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized_dirichlet(g, dom));
  if (solver.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
  const double lambda = solver.eigenvalues()[0];
  Eigen::VectorXd phi = solver.eigenvectors().col(0).array() / mu.array().sqrt();
  return finish(dom, op, mu, lambda, phi, 1);
}

// Solves S x = b for the symmetrized operator with conjugate gradients.
// S is applied as M^{1/2} L M^{-1/2} through the matrix-free operator.
Eigen::VectorXd cg_solve(const LaplacianOperator& op, const Eigen::VectorXd& sqrt_mu,
                         const Eigen::VectorXd& b, const Eigen::VectorXd& guess) {
  const auto apply_s = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const Eigen::VectorXd w = v.array() / sqrt_mu.array();
    return (-op.apply(w)).array() * sqrt_mu.array();
  };
  Eigen::VectorXd x = guess;
  Eigen::VectorXd r = b - apply_s(x);
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const double stop = 1e-30 * std::max(1.0, b.squaredNorm());
  const auto cap = 20 * static_cast<std::size_t>(b.size()) + 100;
  for (std::size_t it = 0; it < cap && rr > stop; ++it) {
    const Eigen::VectorXd Sp = apply_s(p);
    const double alpha = rr / p.dot(Sp);
    x += alpha * p;
    r -= alpha * Sp;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return x;
}

EigenPair iterative_eigenpair(const WeightedGraph& g, const DomainDecomposition& dom,
                              const SpectralOptions& options) {
  const auto op = LaplacianOperator::dirichlet(g, dom);
  const Eigen::VectorXd mu = interior_measure(g, dom);
  const Eigen::VectorXd sqrt_mu = mu.array().sqrt();
  const auto n = static_cast<Eigen::Index>(dom.interior_size());

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uni(rng);
  v.normalize();

  const auto rayleigh = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd phi = w.array() / sqrt_mu.array();
    return (mu.array() * phi.array() * (-op.apply(phi)).array()).sum() / w.squaredNorm();
  };

  double lambda = rayleigh(v);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd next = cg_solve(op, sqrt_mu, v, v / std::max(lambda, 1e-300));
    next.normalize();
    const double lambda_next = rayleigh(next);
    const double change = std::abs(lambda_next - lambda);
    v = next;
    lambda = lambda_next;
    const Eigen::VectorXd phi = v.array() / sqrt_mu.array();
    if (change <= options.tolerance * std::abs(lambda)) {
      // Eigenvalue settles quadratically faster than the vector; also
      // demand a small residual before stopping.
      const double scale = std::abs(mu.dot(phi));
      if (scale > 0.0 && weighted_residual(op, mu, lambda, phi / scale) <= 1e-11 * lambda) {
        return finish(dom, op, mu, lambda, phi, it);
      }
    }
  }
  throw SolverError("inverse iteration did not converge within " +
                    std::to_string(options.max_iterations) + " iterations");
}

}  // namespace

EigenPair first_eigenpair(const WeightedGraph& g, const DomainDecomposition& dom,
                          const SpectralOptions& options) {
  dom.check_graph(g);
  const bool dense = options.method == EigenMethod::dense ||
                     (options.method == EigenMethod::automatic && dom.interior_size() <= kDenseCap);
  if (dense && dom.interior_size() > kDenseCap) {
    throw ValidationError("interior exceeds the dense solver cap");
  }
  return dense ? dense_eigenpair(g, dom) : iterative_eigenpair(g, dom, options);
}

std::vector<double> full_spectrum(const WeightedGraph& g, const DomainDecomposition& dom) {
  dom.check_graph(g);
  if (dom.interior_size() > kDenseCap) {
    throw ValidationError("interior of size " + std::to_string(dom.interior_size()) +
                          " exceeds the dense solver cap");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized_dirichlet(g, dom),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  if (out.front() <= 0.0) throw SolverError("Dirichlet spectrum is not positive");
  return out;
}

double rayleigh_quotient(const WeightedGraph& g, const DomainDecomposition& dom,
                         const Eigen::VectorXd& h) {
  const auto op = LaplacianOperator::dirichlet(g, dom);
  const Eigen::VectorXd mu = interior_measure(g, dom);
  const Eigen::VectorXd Lh = -op.apply(h);
  return (mu.array() * h.array() * Lh.array()).sum() / (mu.array() * h.array().square()).sum();
}

}  // namespace graphblow
