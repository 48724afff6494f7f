#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace graphblow {

enum class NonlinearityKind { power, expm1, exp, linear, custom };

const char* to_string(NonlinearityKind kind);

/// Structural hypotheses on the reaction term, in order:
/// continuity, non-negativity with f > 0 on (0, inf), convexity, and
/// finiteness of the Osgood integral.
struct HypothesisFlags {
  bool h1 = false;
  bool h2 = false;
  bool h3 = false;
  bool h4 = false;

  bool all() const { return h1 && h2 && h3 && h4; }
  bool operator==(const HypothesisFlags&) const = default;
};

/// Reaction term f of u_t = Delta u + f(u).
///
/// power(alpha) is f(u) = u^(1 + alpha), extended by 0 for u < 0 so it stays
/// C^1 and finite under tiny negative round-off.
class Nonlinearity {
 public:
  static Nonlinearity power(double alpha);
  /// e^u - 1.
  static Nonlinearity expm1();
  /// e^u.
  static Nonlinearity exp();
  /// f(u) = u.
  static Nonlinearity linear();
  /// User-supplied callable. `flags` are the declared hypotheses;
  /// derivative and Osgood closed form are optional.
  static Nonlinearity custom(std::string name, std::function<double(double)> f,
                             HypothesisFlags flags,
                             std::function<double(double)> derivative = {},
                             std::function<double(double)> osgood = {});

  NonlinearityKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const std::string& name() const { return name_; }

  double operator()(double u) const { return f_(u); }
  bool has_derivative() const { return static_cast<bool>(fprime_); }
  double derivative(double u) const;

  /// F(r) = integral_r^inf dtau / f(tau) in closed form, when known.
  bool has_osgood_closed_form() const { return static_cast<bool>(osgood_) || kind_ == NonlinearityKind::linear; }
  std::optional<double> osgood_closed_form(double r) const;

  const HypothesisFlags& declared() const { return flags_; }

 private:
  NonlinearityKind kind_ = NonlinearityKind::custom;
  double alpha_ = 0.0;
  std::string name_;
  std::function<double(double)> f_;
  std::function<double(double)> fprime_;
  std::function<double(double)> osgood_;
  HypothesisFlags flags_;
};

/// Maps a CLI kind name (power, expm1, exp, linear) to a nonlinearity.
Nonlinearity make_nonlinearity(std::string_view kind, double alpha);

}  // namespace graphblow
