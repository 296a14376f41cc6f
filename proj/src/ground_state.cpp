#include "hardy/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hardy/certified.hpp"

namespace hardy {

double lambda_b(int b) {
  if (b < 2) throw DomainError("lambda_b requires b >= 2");
  const double sb = std::sqrt(static_cast<double>(b));
  const double r = 0.5 * (sb + 1.0 / sb);
  const double a = std::acos(1.0 / r);
  return a * a;
}

PiecewiseTrig::PiecewiseTrig(int branching, double lambda, std::vector<Coefficients> scaled)
    : b_(branching), lambda_(lambda), k_(std::sqrt(lambda)), scaled_(std::move(scaled)) {
  if (b_ < 2) throw DomainError("branching must be >= 2");
  if (!(lambda_ > 0.0)) throw DomainError("spectral parameter must be positive");
  if (scaled_.empty()) throw DomainError("ground state needs at least one edge");
}

PiecewiseTrig::Coefficients PiecewiseTrig::coefficients(int j) const {
  const auto& c = scaled_.at(j);
  const double s = std::pow(static_cast<double>(b_), -0.5 * j);
  return {c.a * s, c.b * s};
}

int PiecewiseTrig::edge_of(double t, Side side) const {
  if (!(t >= 0.0) || t > horizon()) throw DomainError("t outside the ground state horizon");
  int j = static_cast<int>(std::floor(t));
  if (side == Side::left && j > 0 && t == static_cast<double>(j)) --j;
  return std::min(j, horizon() - 1);
}

double PiecewiseTrig::scaled_value(int j, double t) const {
  const auto& c = scaled_.at(j);
  return c.a * std::cos(k_ * t) + c.b * std::sin(k_ * t);
}

double PiecewiseTrig::scaled_derivative(int j, double t) const {
  const auto& c = scaled_.at(j);
  return k_ * (-c.a * std::sin(k_ * t) + c.b * std::cos(k_ * t));
}

double PiecewiseTrig::value(double t) const {
  const int j = edge_of(t, Side::right);
  return std::pow(static_cast<double>(b_), -0.5 * j) * scaled_value(j, t);
}

double PiecewiseTrig::derivative(double t, Side side) const {
  const int j = edge_of(t, side);
  return std::pow(static_cast<double>(b_), -0.5 * j) * scaled_derivative(j, t);
}

PiecewiseTrig propagate_homogeneous(int b, double lambda, int horizon) {
  if (b < 2) throw DomainError("branching must be >= 2");
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  if (!(lambda > 0.0)) throw DomainError("spectral parameter must be positive");
  const double k = std::sqrt(lambda);
  const double sb = std::sqrt(static_cast<double>(b));

  std::vector<PiecewiseTrig::Coefficients> coeffs;
  coeffs.reserve(horizon);
  // (ω, ω') at t = j+, multiplied by b^(j/2)
  double w = 1.0;
  double wp = 0.0;
  for (int j = 0; j < horizon; ++j) {
    const double c = std::cos(k * j);
    const double s = std::sin(k * j);
    const double a = w * c - (wp / k) * s;
    const double bb = w * s + (wp / k) * c;
    coeffs.push_back({a, bb});
    const double c1 = std::cos(k * (j + 1));
    const double s1 = std::sin(k * (j + 1));
    const double w_end = a * c1 + bb * s1;
    const double wp_end = k * (-a * s1 + bb * c1);
    // continuity of ω, ω'(j-) = b ω'(j+), then rescale by √b
    w = sb * w_end;
    wp = wp_end / sb;
  }
  return PiecewiseTrig(b, lambda, std::move(coeffs));
}

PiecewiseTrig ground_state_homogeneous(int b, int horizon) {
  PiecewiseTrig omega = propagate_homogeneous(b, lambda_b(b), horizon);
  for (int j = 0; j < horizon; ++j) {
    if (!(omega.scaled_value(j, j) > 0.0) || !(omega.scaled_value(j, j + 1.0) > 0.0)) {
      throw ConsistencyError("ground state lost positivity at edge " + std::to_string(j));
    }
  }
  return omega;
}

bool stays_positive(int b, double lambda, long horizon) {
  if (!(lambda > 0.0)) return true;
  const double k = std::sqrt(lambda);
  if (k >= std::numbers::pi) return false;
  const double c = std::cos(k);
  const double s = std::sin(k);
  // an arc of length k < π with both endpoints positive stays positive
  double w = 1.0;
  double wp = 0.0;
  for (long j = 0; j < horizon; ++j) {
    const double w_end = w * c + wp * s / k;
    const double wp_end = -w * k * s + wp * c;
    if (!(w_end > 0.0)) return false;
    w = w_end;
    wp = wp_end / b;
    const double norm = std::max(std::abs(w), std::abs(wp));
    w /= norm;
    wp /= norm;
  }
  return true;
}

Envelope efgrowth_envelope(const PiecewiseTrig& omega, int samples_per_edge) {
  if (samples_per_edge < 1) throw DomainError("need at least one sample per edge");
  Envelope env{std::numeric_limits<double>::infinity(), 0.0};
  for (int j = 0; j < omega.horizon(); ++j) {
    for (int i = 0; i <= samples_per_edge; ++i) {
      const double t = j + static_cast<double>(i) / samples_per_edge;
      const double r = omega.scaled_value(j, t) / (1.0 + t);
      env.c1 = std::min(env.c1, r);
      env.c2 = std::max(env.c2, r);
    }
  }
  if (!(env.c1 > 0.0)) throw ConsistencyError("ground state envelope is not positive");
  return env;
}

double GsrResidual::absolute() const { return std::abs(shifted_form - ground_state); }

double GsrResidual::relative() const {
  const double scale = std::max(std::abs(ground_state), std::abs(shifted_form));
  return scale > 0.0 ? absolute() / scale : 0.0;
}

GsrResidual gsr_residual(int b, const SmoothFunction& phi, double T, double h) {
  if (!(T > 0.0) || !(h > 0.0)) throw DomainError("gsr_residual needs T > 0 and h > 0");
  const int edges = static_cast<int>(std::ceil(T));
  const PiecewiseTrig omega = ground_state_homogeneous(b, edges);
  const double lambda = omega.lambda();

  GsrResidual out;
  for (int j = 0; j < edges; ++j) {
    const double a = j;
    const double e = std::min(static_cast<double>(j + 1), T);
    if (!(e > a)) continue;
    const long n = static_cast<long>(std::ceil((e - a) / h));
    const double step = (e - a) / static_cast<double>(n);
    double lhs = 0.0;
    double rhs = 0.0;
    for (long i = 0; i < n; ++i) {
      const double t = a + (static_cast<double>(i) + 0.5) * step;
      // √g0 is constant on the edge, so it can be folded into ω
      const double w = omega.scaled_value(j, t);
      const double wp = omega.scaled_derivative(j, t);
      const double p = phi.value(t);
      const double pp = phi.derivative(t);
      const double fp = wp * p + w * pp;
      lhs += fp * fp - lambda * (w * p) * (w * p);
      rhs += (w * pp) * (w * pp);
    }
    out.shifted_form += lhs * step;
    out.ground_state += rhs * step;
  }
  return out;
}

}  // namespace hardy
