#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace hardy {

struct LoopLayout;

/// h(λ) = cos 2π√λ - (1 - √(1-4λ))/(4√λ) sin 2π√λ for λ in [0, 1/4],
/// with h(0) = 1.  A power series is used below 1e-8.
double h_value(double lambda);
double h_derivative(double lambda);
/// h(λ) - cos 2πα; λ must lie in (0, 1/4].
double h_function(double lambda, double alpha);

/// Representative of α in [0, 1/2] under α -> -α and α -> α + 1.
double reduced_flux(double alpha);

/// λ*(α): the root of h(λ) = cos 2πα in (0, ᾱ²), extended as an even,
/// 1-periodic function (zero at the integers).  Bisection to a relative
/// bracket of 1e-6, then safeguarded Newton down to `tol`.
double lambda_star(double alpha, double tol = 1e-15);

/// Vector potential on the unit circle.
class FluxSpec {
 public:
  /// a(θ) = α.
  static FluxSpec constant(double alpha);
  /// a(θ) = α + amplitude cos θ.
  static FluxSpec cosine(double alpha, double amplitude);
  /// a given at θ_i = 2πi/n, linearly interpolated between samples.
  static FluxSpec sampled(std::vector<double> values);

  double operator()(double theta) const;
  /// ∫_{θ0}^{θ1} a, exact for the representation (0 <= θ0 <= θ1 <= 2π).
  double cell_integral(double theta0, double theta1) const;
  /// (2π)^-1 ∫ a.  For sampled potentials this is the trapezoid sum.
  double alpha() const;
  FluxSpec shifted(double n) const;
  FluxSpec negated() const;

  double base() const noexcept { return base_; }
  double amplitude() const noexcept { return amplitude_; }
  const std::vector<double>& samples() const noexcept { return samples_; }

  bool operator==(const FluxSpec&) const = default;

 private:
  double base_ = 0.0;
  double amplitude_ = 0.0;
  std::vector<double> samples_;
};

/// Ground state of the loop graph at flux α in (0, 1/2]:
///   ω1(θ) = A e^{iθ(α+μ)} + (1-A) e^{iθ(α-μ)},  ω2(r) = r^β,  μ = √λ*.
struct LoopGroundState {
  double alpha = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  std::complex<double> A;
  double beta = 0.0;
  double j = 0.0;  // current
  double B = 0.0;  // constant of the |ω1|² formula
  double matching_residual = 0.0;

  std::complex<double> omega1(double theta) const;
  std::complex<double> omega1_prime(double theta) const;
  double omega2(double r) const;
  double omega2_prime(double r) const;
  /// |ω1(θ)|² from the real formula with B.
  double density(double theta) const;
  /// Re ω̄1 (-i d/dθ - α) ω1 evaluated at θ.
  double current(double theta) const;
};

/// Throws ConvergenceError if ω1'(0) - ω1'(2π) + ω2'(1) exceeds 10 tol.
LoopGroundState loop_ground_state(double alpha, double tol = 1e-12);

/// ∫_0^{2π} dθ/|ω1|² in closed form; α = 1/2 is a domain error.
double inverse_density_integral(const LoopGroundState& gs);
/// The same integral by adaptive Gauss-Kronrod quadrature of 1/density.
double inverse_density_quadrature(const LoopGroundState& gs, double tol = 1e-14);

/// 1 - (|j|/π) ∫ dθ/|ω1|², assembled from its parts.
double hardy_slack_coefficient(double alpha);

/// u = ω v on the loop graph.  v1 lives on [0, 2π] (periodic), v2 on
/// [1, T] with v2(1) = v1(0) and v2(T) = 0.
struct LoopTestFunction {
  std::function<std::complex<double>(double)> v1, dv1;
  std::function<std::complex<double>(double)> v2, dv2;
};

struct GsrLoopResidual {
  double form = 0.0;          // h_α[u] - λ* ∫ψ|u|²
  double representation = 0.0;  // ∫|ω|²|v'|² + 2j Im ∫ v̄1 v1'
  double absolute() const;
  double relative() const;
};

/// Both sides of the loop ground state representation by composite
/// midpoint quadrature with step <= h on the circle and on [1, T].
GsrLoopResidual gsr_loop_residual(const LoopGroundState& gs, const LoopTestFunction& v, double h,
                                  double T);

struct CircleFluxCheck {
  double lhs = 0.0;  // ∫|v'|² w
  double rhs = 0.0;  // 2π (∫1/w)^-1 |Im ∫ v̄ v'|
  bool holds(double rtol) const { return lhs >= rhs * (1.0 - rtol) - rtol; }
};

/// Both sides of the circle inequality for positive w and periodic v,
/// by the periodic trapezoid rule on n points.
CircleFluxCheck circle_flux_inequality(const std::function<double(double)>& w,
                                       const std::function<std::complex<double>(double)>& v,
                                       const std::function<std::complex<double>(double)>& dv,
                                       int n = 4096);

/// Twisted split of a nodal loop function at flux 1/2:
///   u1^s = (u1(θ) + e^{iθ} u1(2π-θ))/2, u2^s = u2,
///   u1^a = (u1(θ) - e^{iθ} u1(2π-θ))/2, u2^a = 0.
struct LoopSplit {
  Eigen::VectorXcd symmetric;
  Eigen::VectorXcd antisymmetric;
};
LoopSplit twisted_split(const LoopLayout& layout, const Eigen::VectorXcd& u);

}  // namespace hardy
