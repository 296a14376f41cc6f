#include "hardy/ab_loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardy/certified.hpp"
#include "hardy/spectral.hpp"

namespace hardy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

// location of the minimum of h on (0, 1/4); h(argmin) < -1
constexpr double kArgminH = 0.21171688176914326;

// Taylor coefficients of h at 0
const double kSeries[4] = {
    1.0,
    -2.0 * kPi * kPi - kPi,
    -kPi + 2.0 * std::pow(kPi, 3) / 3.0 + 2.0 * std::pow(kPi, 4) / 3.0,
    -4.0 * std::pow(kPi, 6) / 45.0 - 2.0 * std::pow(kPi, 5) / 15.0 - 2.0 * kPi +
        2.0 * std::pow(kPi, 3) / 3.0,
};

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || lambda > 0.25) throw DomainError("h is defined for λ in [0, 1/4]");
}

}  // namespace

double h_value(double lambda) {
  check_lambda(lambda);
  if (lambda < 1e-8) {
    return kSeries[0] + lambda * (kSeries[1] + lambda * (kSeries[2] + lambda * kSeries[3]));
  }
  const double k = std::sqrt(lambda);
  const double s = std::sqrt(1.0 - 4.0 * lambda);
  // (1 - s)/(4k) = k/(1 + s) avoids cancellation
  const double c = k / (1.0 + s);
  return std::cos(kTwoPi * k) - c * std::sin(kTwoPi * k);
}

double h_derivative(double lambda) {
  check_lambda(lambda);
  if (lambda < 1e-8) {
    return kSeries[1] + lambda * (2.0 * kSeries[2] + lambda * 3.0 * kSeries[3]);
  }
  if (lambda == 0.25) return std::numeric_limits<double>::infinity();
  const double k = std::sqrt(lambda);
  const double s = std::sqrt(1.0 - 4.0 * lambda);
  const double c = k / (1.0 + s);
  const double dc = ((1.0 + s) / (2.0 * k) + 2.0 * k / s) / ((1.0 + s) * (1.0 + s));
  const double sn = std::sin(kTwoPi * k);
  const double cs = std::cos(kTwoPi * k);
  return -kPi * sn / k - dc * sn - c * kPi * cs / k;
}

double h_function(double lambda, double alpha) {
  if (!(lambda > 0.0) || lambda > 0.25) throw DomainError("h_function needs λ in (0, 1/4]");
  return h_value(lambda) - std::cos(kTwoPi * alpha);
}

double reduced_flux(double alpha) {
  if (!std::isfinite(alpha)) throw DomainError("flux must be finite");
  return std::abs(alpha - std::round(alpha));
}

double lambda_star(double alpha, double tol) {
  const double a = reduced_flux(alpha);
  if (a == 0.0) return 0.0;
  const double target = std::cos(kTwoPi * a);
  auto f = [&](double l) { return h_value(l) - target; };

  // h is convex with h(1/4) = -1 = cos π, so the bracket stops at argmin h
  double lo = 0.0;
  double hi = std::min(a * a, kArgminH);
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    (fx > 0.0 ? lo : hi) = x;
    double next = x - fx / h_derivative(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= tol * std::max(x, 1e-300) || hi - lo <= tol * x) break;
  }
  return x;
}

FluxSpec FluxSpec::constant(double alpha) {
  if (!std::isfinite(alpha)) throw DomainError("flux must be finite");
  FluxSpec f;
  f.base_ = alpha;
  return f;
}

FluxSpec FluxSpec::cosine(double alpha, double amplitude) {
  if (!std::isfinite(alpha) || !std::isfinite(amplitude)) throw DomainError("flux must be finite");
  FluxSpec f;
  f.base_ = alpha;
  f.amplitude_ = amplitude;
  return f;
}

FluxSpec FluxSpec::sampled(std::vector<double> values) {
  if (values.size() < 2) throw DomainError("sampled flux needs at least two samples");
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("flux samples must be finite");
  }
  FluxSpec f;
  f.samples_ = std::move(values);
  return f;
}

double FluxSpec::operator()(double theta) const {
  if (samples_.empty()) return base_ + amplitude_ * std::cos(theta);
  const std::size_t n = samples_.size();
  const double x = std::fmod(std::fmod(theta, kTwoPi) + kTwoPi, kTwoPi) / kTwoPi * n;
  const std::size_t i = std::min(static_cast<std::size_t>(x), n - 1);
  const double s = x - i;
  return base_ + (1.0 - s) * samples_[i] + s * samples_[(i + 1) % n];
}

double FluxSpec::cell_integral(double t0, double t1) const {
  if (samples_.empty()) return base_ * (t1 - t0) + amplitude_ * (std::sin(t1) - std::sin(t0));
  // piecewise linear: integrate exactly between sample knots
  const std::size_t n = samples_.size();
  const double d = kTwoPi / n;
  double s = 0.0;
  double a = t0;
  while (a < t1) {
    double knot = (std::floor(a / d) + 1.0) * d;
    if (!(knot > a)) knot += d;
    const double b = std::min(t1, knot);
    // the interpolant is continuous and linear on [a, b]
    s += 0.5 * (b - a) * ((*this)(a) + (*this)(b));
    a = b;
  }
  return s;
}

double FluxSpec::alpha() const { return cell_integral(0.0, kTwoPi) / kTwoPi; }

FluxSpec FluxSpec::shifted(double n) const {
  FluxSpec f = *this;
  f.base_ += n;
  return f;
}

FluxSpec FluxSpec::negated() const {
  FluxSpec f = *this;
  f.base_ = -f.base_;
  f.amplitude_ = -f.amplitude_;
  for (double& v : f.samples_) v = -v;
  return f;
}

std::complex<double> LoopGroundState::omega1(double theta) const {
  return A * std::exp(kI * theta * (alpha + mu)) + (1.0 - A) * std::exp(kI * theta * (alpha - mu));
}

std::complex<double> LoopGroundState::omega1_prime(double theta) const {
  return kI * (alpha + mu) * A * std::exp(kI * theta * (alpha + mu)) +
         kI * (alpha - mu) * (1.0 - A) * std::exp(kI * theta * (alpha - mu));
}

double LoopGroundState::omega2(double r) const { return std::pow(r, beta); }

double LoopGroundState::omega2_prime(double r) const { return beta * std::pow(r, beta - 1.0); }

double LoopGroundState::density(double theta) const {
  const double sm = std::sin(kPi * (alpha - mu));
  const double sp = std::sin(kPi * (alpha + mu));
  const double s2 = std::sin(kTwoPi * mu);
  return 2.0 * sm * sp / (s2 * s2) * (B - std::cos(2.0 * mu * (theta - kPi)));
}

double LoopGroundState::current(double theta) const {
  const std::complex<double> w = omega1(theta);
  const std::complex<double> dw = omega1_prime(theta);
  return std::real(std::conj(w) * (-kI * dw - alpha * w));
}

LoopGroundState loop_ground_state(double alpha, double tol) {
  if (!(alpha > 0.0) || alpha > 0.5) throw DomainError("loop ground state needs α in (0, 1/2]");
  LoopGroundState gs;
  gs.alpha = alpha;
  gs.lambda = lambda_star(alpha, std::min(tol, 1e-15));
  gs.mu = std::sqrt(gs.lambda);
  const double mu = gs.mu;
  const double s2 = std::sin(kTwoPi * mu);
  gs.A = (std::exp(-kI * kTwoPi * alpha) - std::exp(-kI * kTwoPi * mu)) / (2.0 * kI * s2);
  gs.beta = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * mu * mu));
  gs.j = -mu * std::sin(kTwoPi * alpha) / s2;
  const double sm = std::sin(kPi * (alpha - mu));
  const double sp = std::sin(kPi * (alpha + mu));
  gs.B = (sm * sm + sp * sp) / (2.0 * sm * sp);
  gs.matching_residual =
      std::abs(gs.omega1_prime(0.0) - gs.omega1_prime(kTwoPi) + gs.omega2_prime(1.0));
  if (gs.matching_residual > 10.0 * std::max(tol, 1e-13)) {
    throw ConvergenceError("loop ground state: derivative matching residual too large");
  }
  return gs;
}

double inverse_density_integral(const LoopGroundState& gs) {
  if (gs.alpha >= 0.5) throw DomainError("∫dθ/|ω1|² diverges at α = 1/2");
  return kTwoPi * gs.alpha * std::sin(kTwoPi * gs.mu) / (gs.mu * std::sin(kTwoPi * gs.alpha));
}

double inverse_density_quadrature(const LoopGroundState& gs, double tol) {
  if (gs.alpha >= 0.5) throw DomainError("∫dθ/|ω1|² diverges at α = 1/2");
  auto f = [&](double t) { return 1.0 / gs.density(t); };
  // the integrand peaks at θ = π; split there
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  return GK::integrate(f, 0.0, kPi, 20, tol) + GK::integrate(f, kPi, kTwoPi, 20, tol);
}

double hardy_slack_coefficient(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 0.5)) throw DomainError("slack coefficient needs α in (0, 1/2)");
  const LoopGroundState gs = loop_ground_state(alpha);
  return 1.0 - std::abs(gs.j) / kPi * inverse_density_integral(gs);
}

double GsrLoopResidual::absolute() const { return std::abs(form - representation); }

double GsrLoopResidual::relative() const {
  const double scale = std::max(std::abs(form), std::abs(representation));
  return scale > 0.0 ? absolute() / scale : 0.0;
}

GsrLoopResidual gsr_loop_residual(const LoopGroundState& gs, const LoopTestFunction& v, double h,
                                  double T) {
  if (!(h > 0.0) || !(T > 1.0)) throw DomainError("gsr_loop_residual needs h > 0 and T > 1");
  GsrLoopResidual out;
  const double lambda = gs.lambda;

  const long nc = static_cast<long>(std::ceil(kTwoPi / h));
  const double hc = kTwoPi / static_cast<double>(nc);
  double form = 0.0;
  double rep = 0.0;
  double twist = 0.0;
  for (long i = 0; i < nc; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * hc;
    const auto w = gs.omega1(t);
    const auto dw = gs.omega1_prime(t);
    const auto v1 = v.v1(t);
    const auto dv1 = v.dv1(t);
    const auto u = w * v1;
    const auto du = dw * v1 + w * dv1;
    form += std::norm(-kI * du - gs.alpha * u) - lambda * std::norm(u);
    rep += std::norm(w) * std::norm(dv1);
    twist += std::imag(std::conj(v1) * dv1);
  }
  out.form = form * hc;
  out.representation = (rep + 2.0 * gs.j * twist) * hc;

  const long nl = static_cast<long>(std::ceil((T - 1.0) / h));
  const double hl = (T - 1.0) / static_cast<double>(nl);
  form = 0.0;
  rep = 0.0;
  for (long i = 0; i < nl; ++i) {
    const double r = 1.0 + (static_cast<double>(i) + 0.5) * hl;
    const double w = gs.omega2(r);
    const double dw = gs.omega2_prime(r);
    const auto v2 = v.v2(r);
    const auto dv2 = v.dv2(r);
    const auto du = dw * v2 + w * dv2;
    form += std::norm(du) - lambda * std::norm(w * v2) / (r * r);
    rep += w * w * std::norm(dv2);
  }
  out.form += form * hl;
  out.representation += rep * hl;
  return out;
}

CircleFluxCheck circle_flux_inequality(const std::function<double(double)>& w,
                                       const std::function<std::complex<double>(double)>& v,
                                       const std::function<std::complex<double>(double)>& dv,
                                       int n) {
  if (n < 8) throw DomainError("circle quadrature needs at least 8 points");
  const double h = kTwoPi / n;
  double lhs = 0.0;
  double inv = 0.0;
  double im = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    const double wt = w(t);
    if (!(wt > 0.0)) throw DomainError("circle weight must be positive");
    const auto vt = v(t);
    const auto dvt = dv(t);
    lhs += std::norm(dvt) * wt;
    inv += 1.0 / wt;
    im += std::imag(std::conj(vt) * dvt);
  }
  CircleFluxCheck out;
  out.lhs = lhs * h;
  out.rhs = kTwoPi / (inv * h) * std::abs(im * h);
  return out;
}

LoopSplit twisted_split(const LoopLayout& layout, const Eigen::VectorXcd& u) {
  if (u.size() != layout.size()) throw DomainError("loop vector does not match the layout");
  if (layout.n_circle % 2 != 0) throw DomainError("twisted split needs an even circle mesh");
  LoopSplit out{u, Eigen::VectorXcd::Zero(u.size())};
  const int n = layout.n_circle;
  for (int i = 0; i < n; ++i) {
    const int r = (n - i) % n;
    const auto reflected = std::exp(kI * layout.theta(i)) * u[layout.circle(r)];
    out.symmetric[layout.circle(i)] = 0.5 * (u[layout.circle(i)] + reflected);
    out.antisymmetric[layout.circle(i)] = 0.5 * (u[layout.circle(i)] - reflected);
  }
  return out;
}

}  // namespace hardy
