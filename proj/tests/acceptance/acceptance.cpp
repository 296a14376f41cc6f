// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "format.hpp"
#include "hardy/ab_loop.hpp"
#include "hardy/cli.hpp"
#include "hardy/ground_state.hpp"
#include "hardy/spectral.hpp"
#include "hardy/weights.hpp"
#include "oracles.hpp"

using namespace hardy;
using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;
const cd I{0.0, 1.0};

/// Collects sub-checks of one criterion; the first failure is reported.
struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  std::string first_failure;

  void require(bool ok, const std::string& what) {
    notes.push_back(what);
    if (!ok && pass) {
      pass = false;
      first_failure = what;
    }
  }
};

std::string g(double v, int digits = 6) { return fmt_sig(v, digits); }

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str() + err.str()};
}

RegularTree binary_tree() { return RegularTree::homogeneous(2, 1.0); }
RegularTree periodic_tree() { return RegularTree({{1.0, 2}, {0.5, 3}}, TailRule::periodic(2)); }

Outcome c1_lambda_star_half() {
  Outcome o;
  const CliRun r = cli({"loop", "lambda-star", "--alpha", "0.5"});
  o.require(r.code == kExitPass, "exit code " + std::to_string(r.code));
  const double v = std::stod(r.out);
  o.require(std::abs(v - 0.1735) <= 5e-5, "lambda*(1/2) printed as " + r.out.substr(0, r.out.find('\n')));
  o.require(std::abs(lambda_star(0.5) - oracle::lambda_star(0.5)) < 1e-12,
            "library vs TOMS 748 oracle: " + g(std::abs(lambda_star(0.5) - oracle::lambda_star(0.5)), 2));
  return o;
}

Outcome c2_figure1() {
  Outcome o;
  const CliRun r = cli({"loop", "figure1"});
  o.require(r.code == kExitPass, "exit code " + std::to_string(r.code));
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  o.require(line == "alpha,lambda_star", "CSV header '" + line + "'");
  std::vector<double> a, l;
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    a.push_back(std::stod(line.substr(0, comma)));
    l.push_back(std::stod(line.substr(comma + 1)));
  }
  o.require(a.size() == 301, std::to_string(a.size()) + " rows");
  bool increasing = true, even = true, periodic = true, zeros = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0 && a[i - 1] >= 0.0 && a[i] <= 0.5) increasing = increasing && l[i] > l[i - 1];
    even = even && l[i] == l[a.size() - 1 - i];
    if (a[i] == std::round(a[i])) zeros = zeros && l[i] == 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (std::abs(a[j] - a[i] - 1.0) < 1e-12) periodic = periodic && std::abs(l[j] - l[i]) <= 1e-14;
    }
  }
  o.require(increasing, "strictly increasing on (0, 1/2]");
  o.require(even, "even");
  o.require(periodic, "1-periodic");
  o.require(zeros, "zero at integers");
  bool below = true;
  for (int i = 1; i <= 100; ++i) {
    const double al = 0.5 * i / 100.0;
    below = below && lambda_star(al) < al * al;
  }
  o.require(below, "lambda*(alpha) < alpha^2 at 100 samples");
  return o;
}

Outcome c3_muckenhoupt_fixture() {
  Outcome o;
  const CriterionReport m = muckenhoupt_constant(binary_tree(), HardyWeight::constant(1.0));
  o.require(m.value.is_finite(), "M finite");
  const double M = m.value.value();
  // t = k + s: (∫_0^t g0)(∫_t^∞ 1/g0) = (1+s)(2-s) - (2-s) 2^-k
  double formula = 0.0;
  for (int k = 0; k <= 60; ++k) {
    for (int i = 0; i <= 100000; ++i) {
      const double s = i * 1e-5;
      formula = std::max(formula, (1 + s) * (2 - s) - (2 - s) * std::ldexp(1.0, -k));
    }
  }
  const double scan = oracle::TreeProfile(binary_tree(), 80).dense_sup([](double) { return 1.0; }, 1e-4, 60.0);
  o.require(std::abs(M - 2.25) <= 1e-6, "M = " + g(M, 12));
  o.require(std::abs(M - formula) <= 1e-6, "piecewise formula " + g(formula, 12));
  o.require(std::abs(M - scan) <= 1e-6, "dense scan " + g(scan, 12));
  return o;
}

Outcome c4_bracket() {
  Outcome o;
  const double l2 = lambda_b(2);
  o.require(std::abs(l2 - std::pow(std::acos(2 * std::sqrt(2.0) / 3), 2)) < 1e-15, "lambda_2 = " + g(l2, 8));
  const SpectralBracket s = spectral_bottom_bracket(binary_tree());
  o.require(std::abs(s.lower - 1.0 / 9) < 1e-6 && std::abs(s.upper - 4.0 / 9) < 1e-6,
            "bracket [" + g(s.lower) + ", " + g(s.upper) + "]");
  o.require(s.lower <= l2 && l2 <= s.upper, "lambda_2 inside the bracket");
  const HardyEstimate e = hardy_constant_estimate(binary_tree(), HardyWeight::constant(1.0), 40.0, 1e-2);
  const double rel = std::abs(1.0 / e.C_T - l2) / l2;
  o.require(rel <= 0.01, "1/C_T(T=40, h=1e-2) = " + g(1.0 / e.C_T) + ", " + g(100 * rel, 3) + "% from lambda_2");
  return o;
}

Outcome c5_hardy_bracket() {
  Outcome o;
  const std::vector<std::pair<std::string, RegularTree>> trees = {{"binary", binary_tree()},
                                                                  {"periodic", periodic_tree()}};
  for (const auto& [name, tree] : trees) {
    for (const HardyWeight& psi : {HardyWeight::power(1, 2), HardyWeight::indicator(1, 0, 5)}) {
      for (double T : {10.0, 20.0, 40.0}) {
        const HardyEstimate e = hardy_constant_estimate(tree, psi, T, 1e-2);
        const double M = e.M.value.value();
        const std::string tag = name + " " + to_string(psi) + " T=" + g(T, 3);
        o.require(e.C_T <= 4 * M + 1e-6, tag + ": C_T = " + g(e.C_T) + " <= 4M = " + g(4 * M));
        if (T == 40.0) o.require(e.C_T >= M - 1e-6, tag + ": C_T >= M = " + g(M));
      }
    }
  }
  return o;
}

Outcome c6_recurrent() {
  Outcome o;
  const RegularTree ray = RegularTree::ray();
  const HardyEstimate a = hardy_constant_estimate(ray, HardyWeight::constant(1.0), 20.0, 1e-2);
  const HardyEstimate b = hardy_constant_estimate(ray, HardyWeight::constant(1.0), 40.0, 1e-2);
  o.require(b.M.divergent(), "M divergent on g0 = 1");
  o.require(b.C_T >= 2 * a.C_T, "C_40 / C_20 = " + g(b.C_T / a.C_T));
  return o;
}

Outcome c7_ground_state() {
  Outcome o;
  double worst = 0.0;
  for (int b : {2, 3, 4}) {
    const PiecewiseTrig w = ground_state_homogeneous(b, 51);
    const double k = w.frequency();
    for (int j = 1; j <= 50; ++j) {
      const auto l = w.coefficients(j - 1);
      const auto r = w.coefficients(j);
      const double vl = l.a * std::cos(k * j) + l.b * std::sin(k * j);
      const double vr = r.a * std::cos(k * j) + r.b * std::sin(k * j);
      const double dl = k * (-l.a * std::sin(k * j) + l.b * std::cos(k * j));
      const double dr = k * (-r.a * std::sin(k * j) + r.b * std::cos(k * j));
      const double scale = std::abs(vl) + std::abs(dl);
      worst = std::max({worst, std::abs(vl - vr) / scale, std::abs(dl - b * dr) / scale});
    }
  }
  o.require(worst < 1e-12, "matching residual " + g(worst, 2));
  const double R2 = 3.0 / (2.0 * std::sqrt(2.0));
  const double w1 = ground_state_homogeneous(2, 4).value(1.0);
  o.require(std::abs(w1 - 1.0 / R2) < 1e-12, "omega(1) - 1/R_2 = " + g(w1 - 1.0 / R2, 2));
  for (int b : {2, 3, 4}) {
    const double d = std::abs(oracle::lambda_b_by_positivity(b) - lambda_b(b));
    o.require(d < 1e-6, "positivity bisection b=" + std::to_string(b) + ": " + g(d, 2));
  }
  const Envelope e50 = efgrowth_envelope(ground_state_homogeneous(2, 50), 64);
  const Envelope e100 = efgrowth_envelope(ground_state_homogeneous(2, 100), 64);
  const double drift = std::max(std::abs(e50.c1 - e100.c1), std::abs(e50.c2 - e100.c2));
  o.require(drift <= 1e-3, "envelope C1 = " + g(e50.c1) + " (J=50), " + g(e100.c1) + " (J=100), C2 = " +
                               g(e100.c2) + "; drift " + g(drift, 3));
  return o;
}

Outcome c8_representation() {
  Outcome o;
  const SmoothFunction phi{
      [](double t) { return std::cos(0.7 * t) * (10.0 - t) * (10.0 - t) / 100.0 + 0.3 * std::sin(t) * (10.0 - t) / 10.0; },
      [](double t) {
        return -0.7 * std::sin(0.7 * t) * (10.0 - t) * (10.0 - t) / 100.0 -
               std::cos(0.7 * t) * 2.0 * (10.0 - t) / 100.0 + 0.3 * std::cos(t) * (10.0 - t) / 10.0 -
               0.3 * std::sin(t) / 10.0;
      }};
  const double t1 = gsr_residual(2, phi, 10.0, 2e-3).relative();
  const double t2 = gsr_residual(2, phi, 10.0, 1e-3).relative();
  o.require(t2 < 1e-5, "tree residual " + g(t2, 3) + " at h=1e-3");
  o.require(std::abs(t1 / t2 - 4.0) < 0.4, "tree refinement ratio " + g(t1 / t2, 3));

  const double T = 6.0;
  const LoopTestFunction v{
      [](double t) { return cd(1.0 + 0.3 * std::cos(t), 0.5 * std::sin(2 * t)); },
      [](double t) { return cd(-0.3 * std::sin(t), std::cos(2 * t)); },
      [&](double r) { return cd(1.3 * (T - r) * (T - r) / ((T - 1) * (T - 1)), 0.0); },
      [&](double r) { return cd(-2.6 * (T - r) / ((T - 1) * (T - 1)), 0.0); }};
  const LoopGroundState gs = loop_ground_state(0.3);
  const double l1 = gsr_loop_residual(gs, v, 2e-3, T).relative();
  const double l2 = gsr_loop_residual(gs, v, 1e-3, T).relative();
  o.require(l2 < 1e-5, "loop residual alpha=0.3: " + g(l2, 3));
  o.require(std::abs(l1 / l2 - 4.0) < 0.6, "loop refinement ratio " + g(l1 / l2, 3));

  const LoopTestFunction w{
      [](double t) { return cd(std::cos(t / 2) * std::cos(t / 2), 0.2 * std::sin(t)); },
      [](double t) { return cd(-0.5 * std::sin(t), 0.2 * std::cos(t)); },
      [&](double r) { return cd((T - r) / (T - 1), 0.0); },
      [&](double) { return cd(-1.0 / (T - 1), 0.0); }};
  const LoopGroundState half = loop_ground_state(0.5);
  const double h1 = gsr_loop_residual(half, w, 2e-3, T).relative();
  const double h2 = gsr_loop_residual(half, w, 1e-3, T).relative();
  o.require(h2 < 1e-5, "loop residual alpha=1/2, u1(pi)=0: " + g(h2, 3));
  o.require(std::abs(h1 / h2 - 4.0) < 0.6, "loop refinement ratio " + g(h1 / h2, 3));
  return o;
}

Outcome c9_identities() {
  Outcome o;
  double spread = 0.0, quad = 0.0, slack = 0.0;
  for (double a : {0.1, 0.3, 0.45, 0.49}) {
    const LoopGroundState gs = loop_ground_state(a);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 2000; ++i) {
      const double c = gs.current(2 * pi * i / 2000.0);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    spread = std::max(spread, hi - lo);
    quad = std::max(quad, std::abs(inverse_density_integral(gs) - inverse_density_quadrature(gs)));
    slack = std::max(slack, std::abs(std::abs(gs.j) / pi * inverse_density_integral(gs) - 2 * a));
  }
  o.require(spread < 1e-9, "current spread " + g(spread, 2));
  o.require(quad < 1e-8, "closed form vs quadrature " + g(quad, 2));
  o.require(slack < 1e-8, "slack identity " + g(slack, 2));
  return o;
}

Outcome c10_loop_sharpness() {
  Outcome o;
  for (double a : {0.3, 0.5}) {
    const double ls = lambda_star(a);
    for (double T : {25.0, 50.0, 100.0, 200.0}) {
      const double l = loop_hardy_estimate(a, T, 1e-2, 1e-2);
      o.require(l >= ls - 1e-4, "alpha=" + g(a, 2) + " T=" + g(T, 3) + " h=1e-2: " + g(l));
    }
    const double l = loop_hardy_estimate(a, 200.0, 1e-3, 1e-3);
    o.require(l >= ls - 1e-4, "alpha=" + g(a, 2) + " T=200 h=1e-3: lower bound");
    const double rel = (l - ls) / ls;
    o.require(rel >= 0.0 && rel <= 0.02, "alpha=" + g(a, 2) + " T=200 h=1e-3: lambda_min = " + g(l) +
                                             ", lambda* = " + g(ls) + ", +" + g(100 * rel, 3) + "%");
  }
  return o;
}

Outcome c11_gauge() {
  Outcome o;
  const GaugeReport r = gauge_invariance_check(FluxSpec::cosine(0.3, 1.0), 200.0, 1e-2, 1e-2, 5);
  auto diff = [&](const std::vector<double>& x) {
    double d = 0.0;
    for (std::size_t i = 0; i < 5; ++i) d = std::max(d, std::abs(x[i] - r.reference[i]) / r.reference[i]);
    return d;
  };
  o.require(diff(r.potential) <= 1e-3, "0.3 + cos(theta) vs 0.3: " + g(diff(r.potential), 2));
  o.require(diff(r.shifted) <= 1e-3, "integer shift: " + g(diff(r.shifted), 2));
  o.require(diff(r.conjugate) <= 1e-3, "sign flip: " + g(diff(r.conjugate), 2));
  return o;
}

Outcome c12_decomposition() {
  Outcome o;
  const DecompositionReport r = decomposition_check(2, 3, 1e-2, 10);
  o.require(r.tree.size() == 10 && r.orthogonal_sum.size() == 10, "10 eigenvalues on both sides");
  o.require(r.max_relative_difference <= 1e-3, "max relative difference " + g(r.max_relative_difference, 2));
  o.require(r.multiplicity == std::vector<long>{1, 1, 2}, "multiplicities 1, 1, 2");
  o.require(r.tree_dofs == r.sum_dofs, "dofs " + std::to_string(r.tree_dofs) + " = " + std::to_string(r.sum_dofs));
  return o;
}

Outcome c13_circle_inequality() {
  Outcome o;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int failures = 0;
  double tightest = 1e300;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> wc(4), wp(4);
    for (int m = 0; m < 4; ++m) {
      wc[m] = 0.2 * std::abs(U(rng));
      wp[m] = pi * U(rng);
    }
    auto w = [=](double t) {
      double s = 1.0;
      for (int m = 0; m < 4; ++m) s += wc[m] * std::cos((m + 1) * t + wp[m]);
      return s;
    };
    std::vector<cd> c;
    for (int m = -4; m <= 4; ++m) c.emplace_back(U(rng), U(rng));
    auto v = [=](double t) {
      cd s = 0.0;
      for (int m = -4; m <= 4; ++m) s += c[m + 4] * std::exp(I * double(m) * t);
      return s;
    };
    auto dv = [=](double t) {
      cd s = 0.0;
      for (int m = -4; m <= 4; ++m) s += I * double(m) * c[m + 4] * std::exp(I * double(m) * t);
      return s;
    };
    const CircleFluxCheck r = circle_flux_inequality(w, v, dv, 1024);
    failures += !r.holds(1e-12);
    tightest = std::min(tightest, r.lhs / std::max(r.rhs, 1e-300));
  }
  o.require(failures == 0, "500 random pairs, min lhs/rhs " + g(tightest, 4));
  const CircleFluxCheck eq = circle_flux_inequality(
      [](double) { return 1.0; }, [](double t) { return std::exp(I * t); },
      [](double t) { return I * std::exp(I * t); });
  o.require(std::abs(eq.lhs - eq.rhs) <= 1e-6 * eq.lhs, "equality case lhs " + g(eq.lhs, 10) + ", rhs " + g(eq.rhs, 10));
  return o;
}

Outcome c14_twisted_split() {
  Outcome o;
  const LoopPencil p = assemble_loop(FluxSpec::constant(0.5), 20.0, 1e-2, 1e-2);
  std::mt19937_64 rng(14);
  std::normal_distribution<double> N;
  double form_err = 0.0, mass_err = 0.0, worst_ratio = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXcd u(p.layout.size());
    for (auto& x : u) x = cd(N(rng), N(rng));
    const LoopSplit s = twisted_split(p.layout, u);
    const double f = loop_form(p, u);
    const double m = loop_mass(p, u);
    form_err = std::max(form_err, std::abs(loop_form(p, s.symmetric) + loop_form(p, s.antisymmetric) - f) / f);
    mass_err = std::max(mass_err, std::abs(loop_mass(p, s.symmetric) + loop_mass(p, s.antisymmetric) - m) / m);
    worst_ratio = std::min(worst_ratio, antisymmetric_bound_check(p, s.antisymmetric).ratio);
  }
  o.require(form_err < 1e-10, "form additivity " + g(form_err, 2));
  o.require(mass_err < 1e-10, "norm additivity " + g(mass_err, 2));
  o.require(worst_ratio >= 0.25 - 1e-9, "antisymmetric Rayleigh quotient >= " + g(worst_ratio, 4));

  // the extremal antisymmetric function e^{iθ/2} sin(θ/2)
  const LoopPencil fine = assemble_loop(FluxSpec::constant(0.5), 5.0, 1e-3, 0.1);
  Eigen::VectorXcd ua = Eigen::VectorXcd::Zero(fine.layout.size());
  for (int i = 1; i < fine.layout.n_circle; ++i) {
    const double t = fine.layout.theta(i);
    ua[fine.layout.circle(i)] = std::polar(std::sin(t / 2), t / 2);
  }
  const AntisymmetricBound b = antisymmetric_bound_check(fine, ua);
  o.require(b.holds && std::abs(b.ratio - 0.25) < 1e-5, "extremal quotient " + g(b.ratio, 8));
  o.require(0.25 > lambda_star(0.5), "1/4 > lambda*(1/2) = " + g(lambda_star(0.5)));
  return o;
}

struct Criterion {
  int id;
  std::string title;
  double budget_s;  // 0: no runtime requirement
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "lambda*(1/2) = 0.1735 via CLI", 0.1, c1_lambda_star_half},
      {2, "lambda*(alpha) curve via CLI", 1.0, c2_figure1},
      {3, "Muckenhoupt constant M = 9/4 on the binary tree", 1.0, c3_muckenhoupt_fixture},
      {4, "bracket containment and 1/C_T -> lambda_2", 10.0, c4_bracket},
      {5, "M <= C <= 4M on transient fixtures", 30.0, c5_hardy_bracket},
      {6, "recurrent tree: M divergent, C_T doubles", 0.0, c6_recurrent},
      {7, "homogeneous ground state", 5.0, c7_ground_state},
      {8, "ground state representations", 0.0, c8_representation},
      {9, "loop ground state identities", 0.0, c9_identities},
      {10, "loop Hardy constant is sharp", 60.0, c10_loop_sharpness},
      {11, "gauge invariance", 0.0, c11_gauge},
      {12, "tree spectrum = orthogonal sum", 60.0, c12_decomposition},
      {13, "circle flux inequality", 0.0, c13_circle_inequality},
      {14, "twisted split at flux 1/2", 0.0, c14_twisted_split},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0) o.require(secs < c.budget_s, "runtime " + g(secs, 3) + " s < " + g(c.budget_s, 3) + " s");
    failed += !o.pass;
    std::printf("%s %2d  %s  [%.3f s]%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                o.pass ? "" : "  -- ", o.first_failure.c_str());
    for (const std::string& n : o.notes) std::printf("         %s\n", n.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
