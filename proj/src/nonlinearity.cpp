#include "graphblow/nonlinearity.hpp"

#include <cmath>
#include <limits>

#include "graphblow/errors.hpp"

namespace graphblow {

const char* to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::power:
      return "power";
    case NonlinearityKind::expm1:
      return "expm1";
    case NonlinearityKind::exp:
      return "exp";
    case NonlinearityKind::linear:
      return "linear";
    case NonlinearityKind::custom:
      return "custom";
  }
  return "unknown";
}

Nonlinearity Nonlinearity::power(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("power nonlinearity needs alpha > 0");
  }
  Nonlinearity nl;
  nl.kind_ = NonlinearityKind::power;
  nl.alpha_ = alpha;
  nl.name_ = "power";
  const double p = 1.0 + alpha;
  nl.f_ = [p](double u) { return u > 0.0 ? std::pow(u, p) : 0.0; };
  nl.fprime_ = [p, alpha](double u) { return u > 0.0 ? p * std::pow(u, alpha) : 0.0; };
  nl.osgood_ = [alpha](double r) { return std::pow(r, -alpha) / alpha; };
  nl.flags_ = {true, true, true, true};
  return nl;
}

Nonlinearity Nonlinearity::expm1() {
  Nonlinearity nl;
  nl.kind_ = NonlinearityKind::expm1;
  nl.name_ = "expm1";
  nl.f_ = [](double u) { return std::expm1(u); };
  nl.fprime_ = [](double u) { return std::exp(u); };
  // integral_r^inf dtau / (e^tau - 1) = -log(1 - e^-r)
  nl.osgood_ = [](double r) { return -std::log1p(-std::exp(-r)); };
  nl.flags_ = {true, true, true, true};
  return nl;
}

Nonlinearity Nonlinearity::exp() {
  Nonlinearity nl;
  nl.kind_ = NonlinearityKind::exp;
  nl.name_ = "exp";
  nl.f_ = [](double u) { return std::exp(u); };
  nl.fprime_ = [](double u) { return std::exp(u); };
  nl.osgood_ = [](double r) { return std::exp(-r); };
  nl.flags_ = {true, true, true, true};
  return nl;
}

Nonlinearity Nonlinearity::linear() {
  Nonlinearity nl;
  nl.kind_ = NonlinearityKind::linear;
  nl.name_ = "linear";
  nl.f_ = [](double u) { return u; };
  nl.fprime_ = [](double) { return 1.0; };
  nl.flags_ = {true, true, true, false};
  return nl;
}

Nonlinearity Nonlinearity::custom(std::string name, std::function<double(double)> f,
                                  HypothesisFlags flags, std::function<double(double)> derivative,
                                  std::function<double(double)> osgood) {
  if (!f) throw ValidationError("custom nonlinearity needs a callable");
  Nonlinearity nl;
  nl.kind_ = NonlinearityKind::custom;
  nl.name_ = std::move(name);
  nl.f_ = std::move(f);
  nl.fprime_ = std::move(derivative);
  nl.osgood_ = std::move(osgood);
  nl.flags_ = flags;
  return nl;
}

double Nonlinearity::derivative(double u) const {
  if (!fprime_) throw ValidationError("nonlinearity '" + name_ + "' has no derivative");
  return fprime_(u);
}

std::optional<double> Nonlinearity::osgood_closed_form(double r) const {
  if (kind_ == NonlinearityKind::linear) return std::numeric_limits<double>::infinity();
  if (!osgood_) return std::nullopt;
  return osgood_(r);
}

Nonlinearity make_nonlinearity(std::string_view kind, double alpha) {
  if (kind == "power") return Nonlinearity::power(alpha);
  if (kind == "expm1") return Nonlinearity::expm1();
  if (kind == "exp") return Nonlinearity::exp();
  if (kind == "linear") return Nonlinearity::linear();
  throw ValidationError("unknown nonlinearity '" + std::string(kind) + "'");
}

}  // namespace graphblow
