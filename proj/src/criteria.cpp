#include "graphblow/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "graphblow/errors.hpp"
#include "graphblow/text.hpp"

namespace graphblow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

void probe_positive_tail(const Nonlinearity& nl, double r) {
  for (double tau = r; tau < 1e300; tau *= 1.7782794100389228) {  // 10^(1/4)
    const double v = nl(tau);
    if (std::isnan(v)) throw ValidationError("f is NaN at " + format_double(tau));
    if (!(v > 0.0)) {
      throw ValidationError("f is not positive on [r, inf): f(" + format_double(tau) +
                            ") = " + format_double(v));
    }
  }
}

// integral over [lo, lo * 10] of dtau / f, in the variable y = log10(tau / lo).
double decade_increment(const Nonlinearity& nl, double lo, double* error = nullptr) {
  const auto integrand = [&](double y) {
    const double tau = lo * std::pow(10.0, y);
    const double v = nl(tau);
    return std::isinf(v) ? 0.0 : tau * std::log(10.0) / v;
  };
  return Kronrod::integrate(integrand, 0.0, 1.0, 12, 1e-12, error);
}

bool tail_diverges(const Nonlinearity& nl, double r) {
  const double start = std::max(r, 1.0);
  std::vector<double> inc;
  for (double lo = start; lo < 1e280; lo *= 10.0) inc.push_back(decade_increment(nl, lo));
  double worst = 0.0;
  const std::size_t window = std::min<std::size_t>(8, inc.size() - 1);
  for (std::size_t k = inc.size() - window; k < inc.size(); ++k) {
    if (inc[k - 1] <= 0.0) continue;
    worst = std::max(worst, inc[k] / inc[k - 1]);
  }
  return worst > 0.95;
}

}  // namespace

OsgoodValue osgood_quadrature(const Nonlinearity& nl, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("Osgood lower limit must be positive");
  probe_positive_tail(nl, r);
  OsgoodValue out;
  out.method = OsgoodMethod::quadrature;
  if (tail_diverges(nl, r)) {
    out.value = kInf;
    out.finite = false;
    return out;
  }
  double sum = 0.0, error = 0.0, prev = 0.0;
  for (double lo = r; lo < 1e300; lo *= 10.0) {
    double e = 0.0;
    const double inc = decade_increment(nl, lo, &e);
    sum += inc;
    error += e;
    if (prev > 0.0 && inc < prev && inc <= 1e-17 * sum) {
      const double q = inc / prev;
      sum += inc * q / (1.0 - q);
      break;
    }
    prev = inc;
  }
  out.value = sum;
  out.error = error;
  out.finite = std::isfinite(out.value);
  return out;
}

OsgoodValue osgood_evaluate(const Nonlinearity& nl, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("Osgood lower limit must be positive");
  if (const auto closed = nl.osgood_closed_form(r)) {
    probe_positive_tail(nl, r);
    OsgoodValue out;
    out.value = *closed;
    out.finite = std::isfinite(*closed);
    out.method = OsgoodMethod::closed_form;
    return out;
  }
  return osgood_quadrature(nl, r);
}

double osgood_F(const Nonlinearity& nl, double r) { return osgood_evaluate(nl, r).value; }

OsgoodReport osgood_report(const Nonlinearity& nl, std::span<const double> radii) {
  OsgoodReport report;
  report.finite = true;
  for (const double r : radii) {
    const auto v = osgood_evaluate(nl, r);
    report.method = v.method;
    report.finite = report.finite && v.finite;
    report.F_at.emplace_back(r, v.value);
    if (v.error) report.quadrature_error = std::max(report.quadrature_error.value_or(0.0), *v.error);
    if (v.method == OsgoodMethod::closed_form && v.finite) {
      const auto q = osgood_quadrature(nl, r);
      const double gap = std::abs(q.value - v.value) / std::abs(v.value);
      report.cross_check = std::max(report.cross_check.value_or(0.0), gap);
    }
  }
  return report;
}

HypothesisReport check_hypotheses(const Nonlinearity& nl) {
  HypothesisReport report;
  std::vector<double> grid{0.0};
  for (const double tau : geometric_grid(1e-6, 1e6, 601)) grid.push_back(tau);

  std::vector<double> values;
  for (const double tau : grid) {
    const double v = nl(tau);
    if (std::isnan(v) || v == -kInf) {
      throw ValidationError("f is not finite at " + format_double(tau));
    }
    if (v == kInf) break;  // overflow of a growing f: probe up to here
    values.push_back(v);
  }
  grid.resize(values.size());
  if (grid.size() < 2) throw ValidationError("f overflows immediately; cannot probe");
  report.probe_limit = grid.back();

  auto& h = report.flags;
  // A jump keeps |f(x +- delta) - f(x)| from shrinking as delta -> 0.
  h.h1 = true;
  for (std::size_t i = 0; i < grid.size() && h.h1; ++i) {
    const double x = grid[i];
    for (const double side : {-1.0, 1.0}) {
      const auto gap = [&](double rel) {
        const double y = x + side * rel * (1.0 + x);
        return std::abs(nl(y) - values[i]);
      };
      if (side < 0.0 && x - 1e-6 * (1.0 + x) < 0.0) continue;
      const double coarse = gap(1e-6), fine = gap(1e-12);
      if (!std::isfinite(fine) || (fine > 1e-9 * (1.0 + std::abs(values[i])) && fine > 0.1 * coarse)) {
        h.h1 = false;
        break;
      }
    }
  }

  h.h2 = values[0] >= 0.0 &&
         std::all_of(values.begin() + 1, values.end(), [](double v) { return v > 0.0; });

  h.h3 = true;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> expo(-6.0, std::log10(report.probe_limit));
  for (int i = 0; i < 2000 && h.h3; ++i) {
    const double a = i % 10 == 0 ? 0.0 : std::pow(10.0, expo(rng));
    const double b = std::pow(10.0, expo(rng));
    const double fa = nl(a), fb = nl(b), fm = nl(0.5 * (a + b));
    if (fm > 0.5 * (fa + fb) + 1e-12 * (1.0 + std::abs(fa) + std::abs(fb))) h.h3 = false;
  }

  try {
    h.h4 = std::isfinite(osgood_F(nl, 1.0));
  } catch (const ValidationError&) {
    h.h4 = false;
  }
  return report;
}

// ---------------------------------------------------------------------------

const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::thm1:
      return "thm1";
    case Criterion::thm2:
      return "thm2";
    case Criterion::cor1:
      return "cor1";
    case Criterion::rmk2:
      return "rmk2";
  }
  return "unknown";
}

const char* to_string(Holds h) {
  switch (h) {
    case Holds::yes:
      return "yes";
    case Holds::no:
      return "no";
    case Holds::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

std::string CriterionVerdict::witness_value(const std::string& key) const {
  for (const auto& [k, v] : witness) {
    if (k == key) return v;
  }
  return {};
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ValidationError("invalid geometric grid");
  std::vector<double> out(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

std::vector<double> default_t_grid() { return geometric_grid(1e2, 1e10, 81); }

namespace {

void require_thm1_hypotheses(const Nonlinearity& nl, double m_degree,
                             std::span<const double> t_grid) {
  if (!(m_degree > 0.0)) throw ValidationError("volume growth degree m must be positive");
  if (nl(0.0) != 0.0) throw ValidationError("volume-growth criterion needs f(0) = 0");
  const auto hyp = check_hypotheses(nl);
  if (!hyp.flags.all()) throw ValidationError("hypotheses H1-H4 are not all satisfied");
  if (t_grid.size() < 4 || !(t_grid.front() > 0.0) ||
      std::log10(t_grid.back() / t_grid.front()) < 4.0) {
    throw ValidationError("t grid must span at least 4 decades");
  }
}

}  // namespace

CriterionVerdict check_thm1_grid(const Nonlinearity& nl, double m_degree,
                                 std::span<const double> t_grid) {
  require_thm1_hypotheses(nl, m_degree, t_grid);
  CriterionVerdict verdict;
  verdict.criterion = Criterion::thm1;
  verdict.witness.emplace_back("m", format_double(m_degree));
  verdict.witness.emplace_back("route", "theta-grid");

  const std::size_t half = t_grid.size() / 2;
  // margin(t) = log F(1/t) - (theta/m) log t; condition holds where margin <= 0.
  std::vector<double> logF(t_grid.size());
  for (std::size_t i = half; i < t_grid.size(); ++i) {
    logF[i] = std::log(osgood_F(nl, 1.0 / t_grid[i]));
  }
  bool all_fail_growing = true;
  for (int k = 1; k <= 19; ++k) {
    const double theta = 0.05 * k;
    bool holds_everywhere = true;
    for (std::size_t i = half; i < t_grid.size(); ++i) {
      if (logF[i] - (theta / m_degree) * std::log(t_grid[i]) > 0.0) {
        holds_everywhere = false;
        break;
      }
    }
    if (holds_everywhere) {
      verdict.holds = Holds::yes;
      verdict.witness.emplace_back("theta", format_double(theta));
      verdict.witness.emplace_back("t_from", format_double(t_grid[half]));
      verdict.witness.emplace_back("t_to", format_double(t_grid.back()));
      return verdict;
    }
    const std::size_t n = t_grid.size();
    double prev = -kInf;
    for (std::size_t i = n - 3; i < n; ++i) {
      const double margin = logF[i] - (theta / m_degree) * std::log(t_grid[i]);
      if (!(margin > 0.0) || !(margin > prev)) all_fail_growing = false;
      prev = margin;
    }
  }
  verdict.holds = all_fail_growing ? Holds::no : Holds::inconclusive;
  return verdict;
}

CriterionVerdict check_thm1(const Nonlinearity& nl, double m_degree,
                            std::span<const double> t_grid) {
  if (nl.kind() != NonlinearityKind::power) return check_thm1_grid(nl, m_degree, t_grid);
  require_thm1_hypotheses(nl, m_degree, t_grid);
  CriterionVerdict verdict;
  verdict.criterion = Criterion::cor1;
  const double alpha = nl.alpha();
  const double m_alpha = m_degree * alpha;
  verdict.witness.emplace_back("m", format_double(m_degree));
  verdict.witness.emplace_back("alpha", format_double(alpha));
  verdict.witness.emplace_back("m_alpha", format_double(m_alpha));
  verdict.witness.emplace_back("route", "closed-form");
  if (m_alpha < 1.0) {
    verdict.holds = Holds::yes;
    // F(1/t) = t^alpha / alpha <= t^(theta/m) for t >= alpha^(m / (m alpha - theta)).
    const double theta = 0.5 * (1.0 + m_alpha);
    const double onset = std::pow(alpha, m_degree / (m_alpha - theta));
    verdict.witness.emplace_back("theta", format_double(theta));
    verdict.witness.emplace_back("t_from", format_double(std::max(onset, 1.0)));
  } else {
    verdict.holds = Holds::no;
  }
  return verdict;
}

CriterionVerdict check_thm1(const Nonlinearity& nl, double m_degree) {
  const auto grid = default_t_grid();
  return check_thm1(nl, m_degree, grid);
}

double initial_mass(const WeightedGraph& g, const DomainDecomposition& dom, const EigenPair& eig,
                    const GraphFunction& a) {
  dom.check_graph(g);
  if (a.size() != g.num_vertices()) throw ValidationError("initial data length does not match the graph");
  double kappa = 0.0;
  for (std::size_t i = 0; i < dom.interior_size(); ++i) {
    const auto x = dom.interior()[i];
    kappa += g.mu(x) * a(x) * eig.phi1_compact[static_cast<Eigen::Index>(i)];
  }
  return kappa;
}

CriterionVerdict check_thm2(const WeightedGraph& g, const DomainDecomposition& dom,
                            const EigenPair& eig, const Nonlinearity& nl, const GraphFunction& a,
                            double tau_grid_max) {
  const double kappa = initial_mass(g, dom, eig, a);
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive (initial data is trivial on the interior)");
  const double lambda = eig.lambda1;

  CriterionVerdict verdict;
  verdict.witness.emplace_back("kappa", format_double(kappa));
  verdict.witness.emplace_back("lambda1", format_double(lambda));

  const double gap_at_kappa = nl(kappa) - lambda * kappa;
  const bool at_equilibrium = std::abs(gap_at_kappa) <= 1e-9 * (1.0 + lambda * kappa);

  if (nl.kind() == NonlinearityKind::power) {
    verdict.criterion = Criterion::rmk2;
    const double threshold = std::pow(lambda, 1.0 / nl.alpha());
    verdict.witness.emplace_back("threshold", format_double(threshold));
    verdict.witness.emplace_back("route", "closed-form");
    if (at_equilibrium || std::abs(kappa - threshold) <= 1e-9 * threshold) {
      verdict.holds = Holds::inconclusive;
    } else {
      verdict.holds = kappa > threshold ? Holds::yes : Holds::no;
    }
    return verdict;
  }

  verdict.criterion = Criterion::thm2;
  if (!(tau_grid_max > kappa)) throw ValidationError("tau grid maximum must exceed kappa");
  verdict.witness.emplace_back("tau_grid_max", format_double(tau_grid_max));
  if (at_equilibrium) {
    verdict.holds = Holds::inconclusive;
    return verdict;
  }
  double min_gap = kInf;
  const std::size_t n = 400;
  const double ratio = std::log(tau_grid_max / kappa) / static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double tau = kappa * std::exp(ratio * static_cast<double>(i));
    min_gap = std::min(min_gap, nl(tau) - lambda * tau);
  }
  verdict.witness.emplace_back("min_gap", format_double(min_gap));
  bool osgood_finite = false;
  try {
    osgood_finite = std::isfinite(osgood_F(nl, kappa));
  } catch (const ValidationError&) {
    osgood_finite = false;
  }
  verdict.witness.emplace_back("osgood_finite", osgood_finite ? "true" : "false");
  verdict.holds = (min_gap > 0.0 && gap_at_kappa >= 0.0 && osgood_finite) ? Holds::yes : Holds::no;
  return verdict;
}

}  // namespace graphblow
