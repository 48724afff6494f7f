#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "graphblow/graph.hpp"
#include "graphblow/laplacian.hpp"

namespace graphblow {

/// First Dirichlet eigenpair of -Delta_Omega.
///
/// phi1 is strictly positive on the interior and normalized so that
/// sum_x mu(x) phi1(x) = 1. `residual` is the mu-weighted l2 norm of
/// (-Delta_Omega phi1 - lambda1 phi1).
struct EigenPair {
  double lambda1 = 0.0;
  GraphFunction phi1;
  Eigen::VectorXd phi1_compact;  // interior() order
  double residual = 0.0;
  std::size_t iterations = 0;
};

enum class EigenMethod { automatic, dense, iterative };

struct SpectralOptions {
  EigenMethod method = EigenMethod::automatic;
  /// Start vector seed for the iterative solver.
  std::uint64_t seed = 20240601;
  std::size_t max_iterations = 10000;
  /// Relative eigenvalue change that ends the iterative solve.
  double tolerance = 1e-12;
};

/// Dense below kDenseCap interior vertices, inverse iteration with a
/// matrix-free conjugate-gradient inner solve above it (or when forced).
/// Throws SolverError if the iteration does not converge within the cap.
EigenPair first_eigenpair(const WeightedGraph& g, const DomainDecomposition& dom,
                          const SpectralOptions& options = {});

/// All eigenvalues of -Delta_Omega, ascending. One per interior vertex.
std::vector<double> full_spectrum(const WeightedGraph& g, const DomainDecomposition& dom);

/// <h, -Delta_Omega h>_mu / <h, h>_mu for an interior-indexed h.
double rayleigh_quotient(const WeightedGraph& g, const DomainDecomposition& dom,
                         const Eigen::VectorXd& h);

}  // namespace graphblow
