#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hardy/certified.hpp"
#include "hardy/tree_model.hpp"

namespace hardy {

class PiecewiseTrig;

struct PowerWeight {
  double c = 1.0;
  double p = 2.0;
  bool operator==(const PowerWeight&) const = default;
};
struct IndicatorWeight {
  double c = 1.0;
  double a = 0.0;
  double b = 1.0;
  bool operator==(const IndicatorWeight&) const = default;
};
struct PiecewiseLinearWeight {
  std::vector<std::pair<double, double>> knots;  // (t, value), t strictly increasing
  bool operator==(const PiecewiseLinearWeight&) const = default;
};
struct ConstantWeight {
  double c = 1.0;
  bool operator==(const ConstantWeight&) const = default;
};

/// Symmetric Hardy weight ψ(|x|) from a small closed family with exact
/// evaluation and exact definite integrals.
///
///   power(c, p)        c (1+t)^(-p)
///   indicator(c, a, b) c on [a, b], 0 elsewhere
///   pwl(knots)         linear interpolation, 0 outside [first, last] knot
///   constant(c)        c
class HardyWeight {
 public:
  using Variant = std::variant<PowerWeight, IndicatorWeight, PiecewiseLinearWeight, ConstantWeight>;

  static HardyWeight power(double c, double p);
  static HardyWeight indicator(double c, double a, double b);
  static HardyWeight piecewise_linear(std::vector<std::pair<double, double>> knots);
  static HardyWeight constant(double c);

  const Variant& variant() const noexcept { return v_; }

  double operator()(double t) const;
  /// ∫_a^b ψ(t) dt.
  double integral(double a, double b) const;
  /// ∫_a^b ψ(t) (1+t)^m dt for m = 0, 1, 2.
  double moment(double a, double b, int m) const;
  /// Points where ψ or its derivative may jump, in increasing order.
  std::vector<double> breakpoints() const;
  /// Upper end of the support; +inf if unbounded.
  double support_end() const;
  bool is_zero() const;
  HardyWeight scaled(double factor) const;

  bool operator==(const HardyWeight&) const = default;

 private:
  explicit HardyWeight(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

std::string to_string(const HardyWeight& w);

/// Outcome of a supremum-of-products criterion.  For the tree Muckenhoupt
/// constant M the sharp Hardy constant C obeys M <= C <= 4M.
struct CriterionReport {
  Certified value = Certified::finite(0.0);
  /// Where the supremum was observed (the last scanned point when the
  /// supremum escapes to infinity).
  double maximizer = 0.0;
  bool escapes_to_infinity = false;

  bool divergent() const { return value.is_divergent(); }
  double lower_constant() const { return value.value_or_inf(); }
  double upper_constant() const { return 4.0 * value.value_or_inf(); }
};

/// M(Γ, ψ) = sup_t (∫_0^t ψ g0)(∫_t^∞ 1/g0).
CriterionReport muckenhoupt_constant(const RegularTree& tree, const HardyWeight& psi,
                                     double tol = 1e-10);

/// Generic sup_{t>0} F(t) for a continuous product profile on (0, ∞): grid
/// scan on [0, 1] and geometric scan beyond, golden-section refinement of
/// local maxima, geometric extrapolation of the tail along t = 2^n.
CriterionReport sup_of_profile(const std::function<double(double)>& profile, double tol = 1e-10);

struct SpectralBracket {
  bool positive_definite = false;
  double lower = 0.0;  // (4 M(Γ,1))^-1
  double upper = 0.0;  // M(Γ,1)^-1
};

/// Bounds on inf spec(-Δ_N) from M(Γ, 1).
SpectralBracket spectral_bottom_bracket(const RegularTree& tree, double tol = 1e-10);

/// sup_{r > start} (1+r)^-1 ∫_start^r ψ(t)(1+t)^2 dt; start = 0 gives the
/// homogeneous-tree admissibility condition.
CriterionReport homo_condition_value(const HardyWeight& psi, double start = 0.0);

/// M'(g0, ψ) = sup_r (∫_0^r ω² ψ g0)(∫_r^∞ 1/(ω² g0)) for the homogeneous
/// ground state ω.  The value carries a certified error bar; if the horizon
/// of `omega` is too short for `tol`, the horizon is doubled (up to
/// max_horizon) and the achieved error is reported.
CriterionReport weighted_muckenhoupt_constant(const PiecewiseTrig& omega, const HardyWeight& psi,
                                              double tol = 1e-6, int max_horizon = 1024);

/// Data on a grid for the one-dimensional Hardy operator inequality
///   ∫ |w(r) ∫_r^L φ|² dr <= S ∫ |v φ|² dr,  T = sup_r ∫_0^r w² ∫_r^L v^-2.
/// w² and v² are taken constant per cell (values given per cell).
struct MuckenhouptCheck {
  double T = 0.0;
  double max_ratio = 0.0;  // observed lower bound for S
  bool holds = true;       // max_ratio <= 4 T (1 + rtol)
  std::vector<double> worst_knots;
};

/// Tests random piecewise-linear φ (knot values uniform in [-1, 1]) against
/// the bound S <= 4T.  `w2` and `v2` have one entry per cell of `nodes`.
MuckenhouptCheck muckenhoupt_inequality_check(std::span<const double> nodes,
                                              std::span<const double> w2,
                                              std::span<const double> v2, int trials,
                                              std::uint64_t seed, double rtol = 1e-9);

/// The discrete Muckenhoupt T for cellwise-constant w², v² on `nodes`.
double discrete_muckenhoupt_T(std::span<const double> nodes, std::span<const double> w2,
                              std::span<const double> v2);

/// Ratio LHS / RHS of the Hardy operator inequality for one φ given by its
/// values at `nodes` (φ(L) is forced to the last entry; φ is linear per cell).
std::pair<double, double> hardy_operator_sides(std::span<const double> nodes,
                                               std::span<const double> w2,
                                               std::span<const double> v2,
                                               std::span<const double> phi);

}  // namespace hardy
