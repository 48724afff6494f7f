#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphblow/graph.hpp"
#include "graphblow/laplacian.hpp"
#include "graphblow/nonlinearity.hpp"
#include "graphblow/spectral.hpp"

namespace graphblow {

// --- Osgood integral F(r) = integral_r^inf dtau / f(tau) ---

enum class OsgoodMethod { closed_form, quadrature };

struct OsgoodValue {
  double value = 0.0;  // +inf when the integral diverges
  bool finite = false;
  OsgoodMethod method = OsgoodMethod::closed_form;
  std::optional<double> error;  // quadrature error estimate
};

/// Closed form when the nonlinearity provides one, quadrature otherwise.
/// Throws ValidationError if f is not positive on a probe grid of [r, inf).
double osgood_F(const Nonlinearity& nl, double r);
OsgoodValue osgood_evaluate(const Nonlinearity& nl, double r);

/// Always by quadrature, on tau = r + s / (1 - s), s in [0, 1). Divergence
/// is declared when the per-decade increments of the tail stop shrinking
/// geometrically (ratio above 0.95 over the last decades).
OsgoodValue osgood_quadrature(const Nonlinearity& nl, double r);

struct OsgoodReport {
  bool finite = false;
  OsgoodMethod method = OsgoodMethod::closed_form;
  std::vector<std::pair<double, double>> F_at;  // (r, F(r))
  std::optional<double> quadrature_error;
  /// Largest relative gap between closed form and quadrature at the samples
  /// (only when a closed form exists).
  std::optional<double> cross_check;
};

OsgoodReport osgood_report(const Nonlinearity& nl, std::span<const double> radii);

// --- hypothesis probes ---

struct HypothesisReport {
  HypothesisFlags flags;
  /// Upper end of the probe grid actually used (below 1e6 when f overflows
  /// double range earlier).
  double probe_limit = 0.0;
  /// Probes are evidence, not proofs.
  bool probed = true;
};

/// H1: f finite and without jumps on a grid of [0, 1e6].
/// H2: f(0) >= 0 and f > 0 on the grid's positive points.
/// H3: midpoint convexity on seeded random pairs.
/// H4: osgood_F(nl, 1) finite.
/// Throws ValidationError if f returns NaN on the grid.
HypothesisReport check_hypotheses(const Nonlinearity& nl);

// --- sufficient blow-up criteria ---

enum class Criterion { thm1, thm2, cor1, rmk2 };
enum class Holds { yes, no, inconclusive };

const char* to_string(Criterion c);
const char* to_string(Holds h);

/// Outcome of a sufficient-condition check. `no` means the condition could
/// not be established; it never asserts global existence.
struct CriterionVerdict {
  Criterion criterion = Criterion::thm1;
  Holds holds = Holds::inconclusive;
  std::vector<std::pair<std::string, std::string>> witness;

  std::string witness_value(const std::string& key) const;
};

/// n points geometrically spaced on [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

/// Default grid for the large-t condition: 1e2 .. 1e10.
std::vector<double> default_t_grid();

/// Volume-growth criterion for the Cauchy problem: some theta in (0, 1)
/// with F(1/t) <= t^(theta/m) for large t. theta is searched on
/// {0.05, ..., 0.95}; "large t" is the upper half of t_grid. Power
/// nonlinearities use the closed-form equivalence m * alpha < 1.
CriterionVerdict check_thm1(const Nonlinearity& nl, double m_degree,
                            std::span<const double> t_grid);
CriterionVerdict check_thm1(const Nonlinearity& nl, double m_degree);
/// Forces the theta grid search even for power nonlinearities.
CriterionVerdict check_thm1_grid(const Nonlinearity& nl, double m_degree,
                                 std::span<const double> t_grid);

/// Dirichlet criterion: kappa = sum mu a phi1 and f(tau) - lambda1 tau > 0
/// for tau > kappa. For power(alpha) this is kappa >= lambda1^(1/alpha); the
/// equality (equilibrium) case is reported inconclusive.
CriterionVerdict check_thm2(const WeightedGraph& g, const DomainDecomposition& dom,
                            const EigenPair& eig, const Nonlinearity& nl, const GraphFunction& a,
                            double tau_grid_max);

/// kappa = sum over the interior of mu a phi1.
double initial_mass(const WeightedGraph& g, const DomainDecomposition& dom, const EigenPair& eig,
                    const GraphFunction& a);

}  // namespace graphblow
