#include "hardy/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "format.hpp"
#include "hardy/ground_state.hpp"

namespace hardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_nonnegative(double c, const char* what) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw DomainError(std::string(what) + ": weight must be finite and non-negative");
  }
}

/// ∫_a^b (1+t)^e dt, b may be +inf.
double power_primitive(double a, double b, double e) {
  if (!(b > a)) return 0.0;
  const double xa = 1.0 + a;
  if (std::isinf(b)) {
    if (e >= -1.0) return kInf;
    return std::pow(xa, e + 1.0) / -(e + 1.0);
  }
  const double xb = 1.0 + b;
  if (e == -1.0) return std::log(xb / xa);
  return (std::pow(xb, e + 1.0) - std::pow(xa, e + 1.0)) / (e + 1.0);
}

/// ∫_a^b (α + β s) s^m ds over s = 1+t, for a linear piece of a pwl weight.
double linear_moment(double ta, double tb, double va, double vb, int m) {
  if (!(tb > ta)) return 0.0;
  const double sa = 1.0 + ta;
  const double sb = 1.0 + tb;
  const double beta = (vb - va) / (tb - ta);
  const double alpha = va - beta * sa;
  auto prim = [&](double s) {
    return alpha * std::pow(s, m + 1) / (m + 1) + beta * std::pow(s, m + 2) / (m + 2);
  };
  return prim(sb) - prim(sa);
}

/// Roots of a continuous f on [a, b] where f changes sign from + to -,
/// located by a uniform sign scan and bisection.
std::vector<double> descending_roots(const std::function<double(double)>& f, double a, double b,
                                     int samples = 24) {
  std::vector<double> roots;
  if (!(b > a)) return roots;
  double x0 = a;
  double f0 = f(a);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = (i == samples) ? b : a + (b - a) * i / samples;
    const double f1 = f(x1);
    if (f0 > 0.0 && f1 <= 0.0) {
      double lo = x0;
      double hi = x1;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

struct LocalMax {
  double value = -kInf;
  double at = 0.0;
  void offer(double v, double t) {
    if (v > value) {
      value = v;
      at = t;
    }
  }
};

/// Points of [a, b] where ψ may be non-smooth, including a and b.
std::vector<double> split_points(const HardyWeight& psi, double a, double b) {
  std::vector<double> pts{a};
  for (double x : psi.breakpoints()) {
    if (x > a && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  return pts;
}

/// sup of (G_s + g∫_s^t ψ)(H_e + (e - t)/g) over t in [s, e].
LocalMax maximize_tree_piece(const HardyWeight& psi, double s, double e, double g, double G_s,
                             double H_e) {
  LocalMax best;
  const auto pts = split_points(psi, s, e);
  double G_a = G_s;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    auto G = [&](double t) { return G_a + g * psi.integral(a, t); };
    auto H = [&](double t) { return H_e + (e - t) / g; };
    auto F = [&](double t) { return G(t) * H(t); };
    auto dF = [&](double t) { return g * psi(std::clamp(t, a, b)) * H(t) - G(t) / g; };
    // one-sided values of ψ at the sub-interval ends
    auto dF_inner = [&](double t) {
      const double eps = 1e-13 * std::max(1.0, std::abs(t));
      return dF(std::clamp(t, a + eps, b - eps));
    };
    best.offer(F(a), a);
    best.offer(F(b), b);
    for (double r : descending_roots(dF_inner, a, b)) best.offer(F(r), r);
    G_a = G(b);
  }
  return best;
}

double gauss16(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss<double, 16>::integrate(f, a, b);
}

}  // namespace

HardyWeight HardyWeight::power(double c, double p) {
  require_nonnegative(c, "power");
  if (!std::isfinite(p)) throw DomainError("power: exponent must be finite");
  return HardyWeight(PowerWeight{c, p});
}

HardyWeight HardyWeight::indicator(double c, double a, double b) {
  require_nonnegative(c, "indicator");
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) {
    throw DomainError("indicator: need 0 <= a < b < inf");
  }
  return HardyWeight(IndicatorWeight{c, a, b});
}

HardyWeight HardyWeight::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw DomainError("pwl: need at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [t, v] = knots[i];
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("pwl: knots must lie in [0, inf)");
    require_nonnegative(v, "pwl");
    if (i > 0 && !(t > knots[i - 1].first)) {
      throw DomainError("pwl: knot positions must be strictly increasing");
    }
  }
  return HardyWeight(PiecewiseLinearWeight{std::move(knots)});
}

HardyWeight HardyWeight::constant(double c) {
  require_nonnegative(c, "constant");
  return HardyWeight(ConstantWeight{c});
}

double HardyWeight::operator()(double t) const {
  return std::visit(
      overloaded{
          [&](const PowerWeight& w) { return w.c * std::pow(1.0 + t, -w.p); },
          [&](const IndicatorWeight& w) { return (t >= w.a && t <= w.b) ? w.c : 0.0; },
          [&](const PiecewiseLinearWeight& w) {
            const auto& k = w.knots;
            if (t < k.front().first || t > k.back().first) return 0.0;
            auto it = std::upper_bound(k.begin(), k.end(), t,
                                       [](double x, const auto& kn) { return x < kn.first; });
            if (it == k.end()) return k.back().second;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double s = (t - lo.first) / (hi.first - lo.first);
            return lo.second + s * (hi.second - lo.second);
          },
          [&](const ConstantWeight& w) { return w.c; },
      },
      v_);
}

double HardyWeight::integral(double a, double b) const { return moment(a, b, 0); }

double HardyWeight::moment(double a, double b, int m) const {
  if (m < 0 || m > 2) throw DomainError("moment order must be 0, 1 or 2");
  if (!(b > a)) return 0.0;
  return std::visit(
      overloaded{
          [&](const PowerWeight& w) {
            if (w.c == 0.0) return 0.0;
            return w.c * power_primitive(a, b, m - w.p);
          },
          [&](const IndicatorWeight& w) {
            const double lo = std::max(a, w.a);
            const double hi = std::min(b, w.b);
            if (!(hi > lo) || w.c == 0.0) return 0.0;
            return w.c * power_primitive(lo, hi, m);
          },
          [&](const PiecewiseLinearWeight& w) {
            double s = 0.0;
            const auto& k = w.knots;
            for (std::size_t i = 0; i + 1 < k.size(); ++i) {
              const double lo = std::max(a, k[i].first);
              const double hi = std::min(b, k[i + 1].first);
              if (!(hi > lo)) continue;
              const double slope = (k[i + 1].second - k[i].second) / (k[i + 1].first - k[i].first);
              const double vlo = k[i].second + slope * (lo - k[i].first);
              const double vhi = k[i].second + slope * (hi - k[i].first);
              s += linear_moment(lo, hi, vlo, vhi, m);
            }
            return s;
          },
          [&](const ConstantWeight& w) {
            if (w.c == 0.0) return 0.0;
            return w.c * power_primitive(a, b, m);
          },
      },
      v_);
}

std::vector<double> HardyWeight::breakpoints() const {
  return std::visit(overloaded{
                        [](const IndicatorWeight& w) { return std::vector<double>{w.a, w.b}; },
                        [](const PiecewiseLinearWeight& w) {
                          std::vector<double> out;
                          for (const auto& k : w.knots) out.push_back(k.first);
                          return out;
                        },
                        [](const auto&) { return std::vector<double>{}; },
                    },
                    v_);
}

double HardyWeight::support_end() const {
  if (is_zero()) return 0.0;
  return std::visit(overloaded{
                        [](const IndicatorWeight& w) { return w.b; },
                        [](const PiecewiseLinearWeight& w) {
                          // last knot with a non-zero neighbour
                          const auto& k = w.knots;
                          std::size_t last = k.size() - 1;
                          while (last > 0 && k[last].second == 0.0 && k[last - 1].second == 0.0) {
                            --last;
                          }
                          return k[last].first;
                        },
                        [](const auto&) { return kInf; },
                    },
                    v_);
}

bool HardyWeight::is_zero() const {
  return std::visit(overloaded{
                        [](const PowerWeight& w) { return w.c == 0.0; },
                        [](const IndicatorWeight& w) { return w.c == 0.0; },
                        [](const PiecewiseLinearWeight& w) {
                          return std::all_of(w.knots.begin(), w.knots.end(),
                                             [](const auto& k) { return k.second == 0.0; });
                        },
                        [](const ConstantWeight& w) { return w.c == 0.0; },
                    },
                    v_);
}

HardyWeight HardyWeight::scaled(double factor) const {
  require_nonnegative(factor, "scaled");
  return std::visit(overloaded{
                        [&](PowerWeight w) { w.c *= factor; return HardyWeight(w); },
                        [&](IndicatorWeight w) { w.c *= factor; return HardyWeight(w); },
                        [&](PiecewiseLinearWeight w) {
                          for (auto& k : w.knots) k.second *= factor;
                          return HardyWeight(std::move(w));
                        },
                        [&](ConstantWeight w) { w.c *= factor; return HardyWeight(w); },
                    },
                    v_);
}

std::string to_string(const HardyWeight& w) {
  return std::visit(
      overloaded{
          [](const PowerWeight& p) { return "power(" + fmt_full(p.c) + ", " + fmt_full(p.p) + ")"; },
          [](const IndicatorWeight& i) {
            return "indicator(" + fmt_full(i.c) + ", " + fmt_full(i.a) + ", " + fmt_full(i.b) + ")";
          },
          [](const PiecewiseLinearWeight& l) {
            std::string s = "pwl([";
            for (std::size_t i = 0; i < l.knots.size(); ++i) {
              if (i) s += ", ";
              s += "(" + fmt_full(l.knots[i].first) + ", " + fmt_full(l.knots[i].second) + ")";
            }
            return s + "])";
          },
          [](const ConstantWeight& c) { return "constant(" + fmt_full(c.c) + ")"; },
      },
      w.variant());
}

CriterionReport muckenhoupt_constant(const RegularTree& tree, const HardyWeight& psi, double tol) {
  CriterionReport out;
  if (psi.is_zero()) return out;
  if (std::isinf(tree.tail_integral(0))) {
    out.value = Certified::divergent();
    out.escapes_to_infinity = true;
    return out;
  }

  LocalMax best;
  double G = 0.0;  // ∫_0^{start} ψ g0
  std::size_t k = 0;
  auto scan_piece = [&](std::size_t idx) {
    const Piece p = tree.piece(idx);
    const double H_e = tree.tail_integral(idx + 1);
    const LocalMax m = maximize_tree_piece(psi, p.start, p.end, p.g0, G, H_e);
    G += p.g0 * psi.integral(p.start, p.end);
    return std::pair{m, p};
  };

  for (; k < tree.explicit_pieces(); ++k) {
    const auto [m, p] = scan_piece(k);
    best.offer(m.value, m.at);
  }

  const double end = psi.support_end();
  const std::size_t period = tree.tail_period();
  // beyond the support, G is frozen and H decreases, so F decreases
  bool done = tree.vertex(k) >= end;
  double prev = -kInf;
  double prev_inc = 0.0;
  int growing = 0;
  int declining = 0;
  double err = 0.0;
  for (int m = 1; !done && m <= 400; ++m) {
    LocalMax period_max;
    double last_end = 0.0;
    double last_g = 1.0;
    for (std::size_t i = 0; i < period; ++i, ++k) {
      const auto [pm, p] = scan_piece(k);
      period_max.offer(pm.value, pm.at);
      last_end = p.end;
      last_g = p.g0;
    }
    best.offer(period_max.value, period_max.at);
    const double S = period_max.value;
    if (!std::isfinite(S) || S > 1e300) {
      out.value = Certified::divergent();
      out.escapes_to_infinity = true;
      out.maximizer = last_end;
      return out;
    }
    if (last_end >= end) {
      done = true;
      err = 0.0;
      break;
    }
    const double inc = S - prev;
    if (m >= 3) {
      if (inc > 0.0 && prev_inc > 0.0) {
        const double kappa = inc / prev_inc;
        declining = 0;
        if (kappa < 1.0) {
          growing = 0;
          const double rem = inc * kappa / (1.0 - kappa);
          err = rem;
          if (rem <= tol) {
            if (S + rem > best.value) {
              out.escapes_to_infinity = true;
              out.maximizer = last_end;
              out.value = Certified::finite(S + 0.5 * rem, 0.5 * rem + tol);
            } else {
              out.maximizer = best.at;
              out.value = Certified::finite(best.value, rem + tol);
            }
            return out;
          }
        } else if (++growing >= 6) {
          out.value = Certified::divergent();
          out.escapes_to_infinity = true;
          out.maximizer = last_end;
          return out;
        }
      } else if (inc <= 0.0 && S < best.value) {
        growing = 0;
        if (++declining >= 3) {
          done = true;
          err = 0.0;
          break;
        }
      } else {
        growing = 0;
        declining = 0;
        err = std::abs(inc);
      }
    }
    prev = S;
    prev_inc = inc;
    if (last_g > 1e280) break;
  }
  out.maximizer = best.at;
  out.value = Certified::finite(best.value, err + tol);
  return out;
}

CriterionReport sup_of_profile(const std::function<double(double)>& profile, double tol) {
  LocalMax best;
  const auto golden = [&](double a, double b) {
    constexpr double r = 0.6180339887498949;
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = profile(x1);
    double f2 = profile(x2);
    for (int i = 0; i < 200 && b - a > 1e-14 * std::max(1.0, b); ++i) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + r * (b - a);
        f2 = profile(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - r * (b - a);
        f1 = profile(x1);
      }
    }
    best.offer(f1, x1);
    best.offer(f2, x2);
  };

  std::vector<double> ts;
  for (int i = 1; i <= 1000; ++i) ts.push_back(i / 1000.0);
  for (int n = 0; n < 80; ++n) {
    const double base = std::ldexp(1.0, n);
    for (int i = 1; i <= 64; ++i) ts.push_back(base * (1.0 + i / 64.0));
  }
  std::vector<double> fs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    fs[i] = profile(ts[i]);
    best.offer(fs[i], ts[i]);
  }
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    if (fs[i] >= fs[i - 1] && fs[i] >= fs[i + 1]) golden(ts[i - 1], ts[i + 1]);
  }

  CriterionReport out;
  // geometric extrapolation along t = 2^n
  std::vector<double> dyadic;
  for (int n = 60; n < 80; ++n) dyadic.push_back(profile(std::ldexp(1.0, n)));
  const double d1 = dyadic[dyadic.size() - 1] - dyadic[dyadic.size() - 2];
  const double d0 = dyadic[dyadic.size() - 2] - dyadic[dyadic.size() - 3];
  if (!std::isfinite(dyadic.back()) || (d1 > 0.0 && d0 > 0.0 && d1 >= d0)) {
    out.value = Certified::divergent();
    out.escapes_to_infinity = true;
    out.maximizer = std::ldexp(1.0, 79);
    return out;
  }
  double limit = dyadic.back();
  double rem = 0.0;
  if (d1 > 0.0 && d0 > 0.0) {
    const double kappa = d1 / d0;
    rem = d1 * kappa / (1.0 - kappa);
    limit += rem;
  }
  if (limit > best.value + tol) {
    out.escapes_to_infinity = true;
    out.maximizer = std::ldexp(1.0, 79);
    out.value = Certified::finite(limit, rem + tol);
  } else {
    out.maximizer = best.at;
    out.value = Certified::finite(best.value, tol);
    // still rising where double precision saturates
    out.escapes_to_infinity = d1 >= 0.0 && d0 >= 0.0 && dyadic.back() >= dyadic.front() &&
                              dyadic.back() >= best.value - tol;
    if (out.escapes_to_infinity) out.maximizer = std::ldexp(1.0, 79);
  }
  return out;
}

SpectralBracket spectral_bottom_bracket(const RegularTree& tree, double tol) {
  const CriterionReport m = muckenhoupt_constant(tree, HardyWeight::constant(1.0), tol);
  SpectralBracket out;
  if (m.divergent() || !(m.value.value() > 0.0)) return out;
  const double M = m.value.value();
  out.positive_definite = true;
  out.lower = 1.0 / (4.0 * M);
  out.upper = 1.0 / M;
  return out;
}

CriterionReport homo_condition_value(const HardyWeight& psi, double start) {
  CriterionReport out;
  if (!(start >= 0.0)) throw DomainError("start must be non-negative");
  if (psi.is_zero()) return out;
  const double xs = 1.0 + start;
  const double eps = std::numeric_limits<double>::epsilon();

  if (const auto* p = std::get_if<PowerWeight>(&psi.variant())) {
    if (p->p < 2.0) {
      out.value = Certified::divergent();
      out.escapes_to_infinity = true;
      return out;
    }
    if (p->p == 2.0) {
      // c (r - start)/(1 + r) increases to c
      out.value = Certified::finite(p->c, 4 * eps * p->c);
      out.escapes_to_infinity = true;
      return out;
    }
    const double q = 3.0 - p->p;
    double x = 0.0;
    double v = 0.0;
    if (q == 0.0) {
      x = std::numbers::e * xs;
      v = p->c / x;
    } else {
      x = xs * std::pow(p->p - 2.0, 1.0 / (p->p - 3.0));
      v = p->c * (std::pow(x, q) - std::pow(xs, q)) / (q * x);
    }
    out.maximizer = x - 1.0;
    out.value = Certified::finite(v, 16 * eps * v);
    return out;
  }
  if (std::holds_alternative<ConstantWeight>(psi.variant())) {
    out.value = Certified::divergent();
    out.escapes_to_infinity = true;
    return out;
  }

  // compact support: the quotient decreases after the support ends
  LocalMax best;
  const double end = psi.support_end();
  if (!(end > start)) return out;
  const auto pts = split_points(psi, start, end);
  double N = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    auto Nt = [&](double t) { return N + psi.moment(a, t, 2); };
    auto Q = [&](double t) { return Nt(t) / (1.0 + t); };
    auto dQ = [&](double t) {
      const double e = 1e-13 * std::max(1.0, std::abs(t));
      const double tt = std::clamp(t, a + e, b - e);
      return psi(tt) * std::pow(1.0 + tt, 3) - Nt(tt);
    };
    best.offer(Q(a), a);
    best.offer(Q(b), b);
    for (double r : descending_roots(dQ, a, b)) best.offer(Q(r), r);
    N = Nt(b);
  }
  out.maximizer = best.at;
  out.value = Certified::finite(best.value, 1e-12 * std::max(1.0, best.value));
  return out;
}

CriterionReport weighted_muckenhoupt_constant(const PiecewiseTrig& omega_in, const HardyWeight& psi,
                                              double tol, int max_horizon) {
  CriterionReport out;
  if (psi.is_zero()) return out;
  if (homo_condition_value(psi).divergent()) {
    out.value = Certified::divergent();
    out.escapes_to_infinity = true;
    return out;
  }

  PiecewiseTrig omega = omega_in;
  for (;;) {
    const int J = omega.horizon();
    const double k = omega.frequency();
    // envelope of √g0 ω/(1+t) over the second half of the horizon, where
    // the ratio is already close to its asymptotic periodic regime
    double c1 = std::numeric_limits<double>::infinity();
    double c2 = 0.0;
    for (int j = J / 2; j < J; ++j) {
      for (int i = 0; i <= 64; ++i) {
        const double t = j + i / 64.0;
        const double r = omega.scaled_value(j, t) / (1.0 + t);
        c1 = std::min(c1, r);
        c2 = std::max(c2, r);
      }
    }
    if (!(c1 > 0.0)) throw ConsistencyError("ground state envelope is not positive");
    c1 *= 0.9;
    c2 *= 1.1;

    // X_j = ∫_0^j ŵ²ψ, Y_j = ∫_j^J 1/ŵ²
    std::vector<double> X(J + 1, 0.0);
    std::vector<double> Y(J + 1, 0.0);
    auto weighted_mass = [&](int j, double a, double b) {
      double s = 0.0;
      const auto pts = split_points(psi, a, b);
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        s += gauss16(
            [&](double t) {
              const double w = omega.scaled_value(j, t);
              return w * w * psi(t);
            },
            pts[i], pts[i + 1]);
      }
      return s;
    };
    auto inverse_density = [&](int j, double a, double b) {
      // ŵ = R cos(kt - φ), ∫ dt/ŵ² = tan(kt - φ)/(k R²)
      const auto& c = omega.scaled_coefficients(j);
      const double R2 = c.a * c.a + c.b * c.b;
      const double phi = std::atan2(c.b, c.a);
      return (std::tan(k * b - phi) - std::tan(k * a - phi)) / (k * R2);
    };
    for (int j = 0; j < J; ++j) X[j + 1] = X[j] + weighted_mass(j, j, j + 1.0);
    for (int j = J - 1; j >= 0; --j) Y[j] = Y[j + 1] + inverse_density(j, j, j + 1.0);

    const double tail_hi = 1.0 / (c1 * c1 * (1.0 + J));
    const double tail_lo = 1.0 / (c2 * c2 * (1.0 + J));
    LocalMax lo;
    LocalMax hi;
    for (int j = 0; j < J; ++j) {
      auto Xt = [&](double t) { return X[j] + weighted_mass(j, j, t); };
      auto Yt = [&](double t) { return Y[j + 1] + inverse_density(j, t, j + 1.0); };
      for (const double tail : {tail_lo, tail_hi}) {
        LocalMax& m = (tail == tail_lo) ? lo : hi;
        auto F = [&](double t) { return Xt(t) * (Yt(t) + tail); };
        auto dF = [&](double t) {
          const double w2 = std::pow(omega.scaled_value(j, t), 2);
          const double e = 1e-13 * std::max(1.0, t);
          return w2 * psi(std::clamp(t, j + e, j + 1.0 - e)) * (Yt(t) + tail) - Xt(t) / w2;
        };
        m.offer(F(j), j);
        m.offer(F(j + 1.0), j + 1.0);
        for (double r : descending_roots(dF, j, j + 1.0, 12)) m.offer(F(r), r);
      }
    }
    const CriterionReport beyond = homo_condition_value(psi, J);
    const double far = (X[J] / (1.0 + J) + c2 * c2 * beyond.value.value()) / (c1 * c1);
    const bool escapes = far > hi.value;
    const double upper = std::max(hi.value, far);
    const double lower = lo.value;
    const double err = 0.5 * (upper - lower);
    if (err <= tol || 2 * J > max_horizon) {
      out.value = Certified::finite(0.5 * (upper + lower), err);
      out.escapes_to_infinity = escapes;
      out.maximizer = escapes ? static_cast<double>(J) : lo.at;
      return out;
    }
    omega = ground_state_homogeneous(omega.branching(), 2 * J);
  }
}

double discrete_muckenhoupt_T(std::span<const double> nodes, std::span<const double> w2,
                              std::span<const double> v2) {
  const std::size_t n = nodes.size() - 1;
  if (nodes.size() < 2 || w2.size() != n || v2.size() != n) {
    throw DomainError("Muckenhoupt data: need one w² and v² value per cell");
  }
  std::vector<double> W(n + 1, 0.0);
  std::vector<double> V(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v2[i] > 0.0)) throw DomainError("Muckenhoupt data: v² must be positive");
    W[i + 1] = W[i] + w2[i] * (nodes[i + 1] - nodes[i]);
  }
  for (std::size_t i = n; i-- > 0;) V[i] = V[i + 1] + (nodes[i + 1] - nodes[i]) / v2[i];

  double T = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = nodes[i + 1] - nodes[i];
    // (W_i + w² s)(V_{i+1} + (h - s)/v²), s in [0, h]: a concave quadratic
    auto F = [&](double s) { return (W[i] + w2[i] * s) * (V[i + 1] + (h - s) / v2[i]); };
    T = std::max({T, F(0.0), F(h)});
    if (w2[i] > 0.0) {
      const double s = 0.5 * (V[i + 1] * v2[i] + h - W[i] / w2[i]);
      if (s > 0.0 && s < h) T = std::max(T, F(s));
    }
  }
  return T;
}

std::pair<double, double> hardy_operator_sides(std::span<const double> nodes,
                                               std::span<const double> w2,
                                               std::span<const double> v2,
                                               std::span<const double> phi) {
  const std::size_t n = nodes.size() - 1;
  if (phi.size() != nodes.size() || w2.size() != n || v2.size() != n) {
    throw DomainError("Hardy operator data: sizes do not match the grid");
  }
  // Φ(r) = ∫_r^L φ
  std::vector<double> Phi(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    Phi[i] = Phi[i + 1] + 0.5 * (nodes[i + 1] - nodes[i]) * (phi[i] + phi[i + 1]);
  }
  // Φ is quadratic per cell, so 3-point Gauss is exact for Φ²
  static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = nodes[i + 1] - nodes[i];
    const double slope = (phi[i + 1] - phi[i]) / h;
    double cell = 0.0;
    for (int q = 0; q < 3; ++q) {
      const double s = 0.5 * h * (1.0 + gx[q]);  // offset from nodes[i]
      const double rest = h - s;
      // ∫_{x_i+s}^{x_{i+1}} φ = rest φ_{i+1} - slope rest²/2
      const double Pq = Phi[i + 1] + rest * phi[i + 1] - 0.5 * slope * rest * rest;
      cell += gw[q] * Pq * Pq;
    }
    lhs += w2[i] * 0.5 * h * cell;
    rhs += v2[i] * h * (phi[i] * phi[i] + phi[i] * phi[i + 1] + phi[i + 1] * phi[i + 1]) / 3.0;
  }
  return {lhs, rhs};
}

MuckenhouptCheck muckenhoupt_inequality_check(std::span<const double> nodes,
                                              std::span<const double> w2,
                                              std::span<const double> v2, int trials,
                                              std::uint64_t seed, double rtol) {
  MuckenhouptCheck out;
  out.T = discrete_muckenhoupt_T(nodes, w2, v2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> phi(nodes.size());
  for (int trial = 0; trial < trials; ++trial) {
    for (double& x : phi) x = unif(rng);
    const auto [lhs, rhs] = hardy_operator_sides(nodes, w2, v2, phi);
    if (!(rhs > 0.0)) continue;
    const double ratio = lhs / rhs;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.worst_knots = phi;
    }
  }
  out.holds = out.max_ratio <= 4.0 * out.T * (1.0 + rtol);
  return out;
}

}  // namespace hardy
