#include <doctest.h>

#include <cmath>
#include <vector>

#include "hardy/ground_state.hpp"
#include "hardy/weights.hpp"
#include "oracles.hpp"

using namespace hardy;

namespace {

RegularTree periodic_tree() { return RegularTree({{1.0, 2}, {0.5, 3}}, TailRule::periodic(2)); }

double b2_constant_oracle() {
  double best = 0.0;
  for (int j = 0; j <= 60; ++j) {
    for (int i = 0; i <= 10000; ++i) {
      const double s = i * 1e-4;
      best = std::max(best, (1 + s) * (2 - s) - (2 - s) * std::ldexp(1.0, -j));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("weight evaluation and exact integrals") {
  const HardyWeight p = HardyWeight::power(2.0, 3.0);
  CHECK(p(1.0) == doctest::Approx(0.25));
  CHECK(p.integral(0.0, 1.0) == doctest::Approx(2.0 * (1.0 - 0.25) / 2.0));
  CHECK(p.moment(0.0, 2.0, 2) == doctest::Approx(2.0 * std::log(3.0)));
  const HardyWeight ind = HardyWeight::indicator(1.5, 1.0, 3.0);
  CHECK(ind(0.5) == 0.0);
  CHECK(ind(2.0) == 1.5);
  CHECK(ind.integral(0.0, 10.0) == doctest::Approx(3.0));
  const HardyWeight pwl = HardyWeight::piecewise_linear({{0.0, 0.0}, {1.0, 2.0}, {3.0, 0.0}});
  CHECK(pwl(0.5) == doctest::Approx(1.0));
  CHECK(pwl(4.0) == 0.0);
  CHECK(pwl.integral(0.0, 3.0) == doctest::Approx(3.0));
  CHECK(pwl.support_end() == 3.0);
  CHECK(HardyWeight::constant(0.0).is_zero());
  CHECK_THROWS_AS(HardyWeight::power(-1.0, 2.0), DomainError);
  CHECK_THROWS_AS(HardyWeight::piecewise_linear({{0.0, 1.0}}), DomainError);
  CHECK(to_string(HardyWeight::power(1, 2)) == "power(1, 2)");
}

TEST_CASE("Muckenhoupt constant of the binary tree with psi = 1") {
  const CriterionReport m = muckenhoupt_constant(RegularTree::homogeneous(2, 1.0),
                                                 HardyWeight::constant(1.0));
  REQUIRE(m.value.is_finite());
  CHECK(std::abs(m.value.value() - 2.25) < 1e-6);
  CHECK(std::abs(m.value.value() - b2_constant_oracle()) < 1e-6);
  CHECK(m.escapes_to_infinity);
  CHECK(m.upper_constant() == doctest::Approx(4.0 * m.lower_constant()));
}

TEST_CASE("Muckenhoupt constant against a dense scan") {
  const oracle::TreeProfile b2(RegularTree::homogeneous(2, 1.0), 80);
  const oracle::TreeProfile per(periodic_tree(), 120);
  struct Case {
    RegularTree tree;
    const oracle::TreeProfile* prof;
    HardyWeight psi;
  };
  const std::vector<Case> cases = {
      {RegularTree::homogeneous(2, 1.0), &b2, HardyWeight::power(1, 2)},
      {RegularTree::homogeneous(2, 1.0), &b2, HardyWeight::indicator(1, 0, 5)},
      {periodic_tree(), &per, HardyWeight::power(1, 2)},
      {periodic_tree(), &per, HardyWeight::indicator(1, 0, 5)},
      {periodic_tree(), &per, HardyWeight::piecewise_linear({{0, 1}, {2, 3}, {6, 0}})},
  };
  for (const Case& c : cases) {
    const CriterionReport m = muckenhoupt_constant(c.tree, c.psi);
    const double scan = c.prof->dense_sup([&](double t) { return c.psi(t); }, 1e-4, 40.0);
    CAPTURE(to_string(c.psi));
    REQUIRE(m.value.is_finite());
    CHECK(m.value.value() >= scan - 1e-6);
    CHECK(m.value.value() == doctest::Approx(scan).epsilon(1e-5));
  }
  // closed form for b = 2, power(1, 2): sup of t/(1+t)·(2 - t) on the first edge
  const double x = std::sqrt(3.0) - 1.0;
  const CriterionReport m = muckenhoupt_constant(RegularTree::homogeneous(2, 1.0), HardyWeight::power(1, 2));
  CHECK(m.value.value() == doctest::Approx(x / (1 + x) * (2 - x)).epsilon(1e-10));
  CHECK(m.maximizer == doctest::Approx(x).epsilon(1e-6));
}

TEST_CASE("homogeneity and monotonicity in the weight") {
  const RegularTree t = periodic_tree();
  const HardyWeight psi = HardyWeight::power(1, 2);
  const double m1 = muckenhoupt_constant(t, psi).value.value();
  CHECK(muckenhoupt_constant(t, psi.scaled(3.5)).value.value() == doctest::Approx(3.5 * m1));
  CHECK(muckenhoupt_constant(t, HardyWeight::power(1, 3)).value.value() <= m1);
  CHECK(muckenhoupt_constant(t, HardyWeight::indicator(1, 0, 2)).value.value() <=
        muckenhoupt_constant(t, HardyWeight::indicator(1, 0, 5)).value.value());
}

TEST_CASE("recurrent trees admit no Hardy weight") {
  for (const HardyWeight& psi : {HardyWeight::constant(1), HardyWeight::power(1, 2),
                                 HardyWeight::indicator(1, 0, 1)}) {
    CHECK(muckenhoupt_constant(RegularTree::ray(), psi).divergent());
    CHECK(muckenhoupt_constant(RegularTree({{1.0, 2}}, TailRule::none()), psi).divergent());
  }
  CHECK(muckenhoupt_constant(RegularTree::ray(), HardyWeight::constant(0)).value.value() == 0.0);
  // transient tree, weight too heavy at infinity
  const RegularTree geo({{1.0, 4}}, TailRule::scaled(1, 2.0));
  CHECK(muckenhoupt_constant(geo, HardyWeight::power(1, 1)).divergent());
  CHECK(muckenhoupt_constant(geo, HardyWeight::power(1, 2)).value.is_finite());
}

TEST_CASE("spectral bottom bracket") {
  const SpectralBracket s = spectral_bottom_bracket(RegularTree::homogeneous(2, 1.0));
  CHECK(s.positive_definite);
  CHECK(s.lower == doctest::Approx(1.0 / 9.0).epsilon(1e-6));
  CHECK(s.upper == doctest::Approx(4.0 / 9.0).epsilon(1e-6));
  CHECK(s.lower < lambda_b(2));
  CHECK(lambda_b(2) < s.upper);
  CHECK_FALSE(spectral_bottom_bracket(RegularTree::ray()).positive_definite);
}

TEST_CASE("condition for homogeneous trees") {
  CHECK(homo_condition_value(HardyWeight::power(1, 2)).value.value() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(homo_condition_value(HardyWeight::power(1, 1)).divergent());
  CHECK(homo_condition_value(HardyWeight::power(1, 1.5)).divergent());
  CHECK(homo_condition_value(HardyWeight::constant(0)).value.value() == 0.0);
  CHECK(homo_condition_value(HardyWeight::power(1, 3)).value.value() ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  // indicator(1, 0, 2): sup of ((1+r)^3 - 1)/(3(1+r)) ∧ 26/(3(1+r)) is at r = 2
  CHECK(homo_condition_value(HardyWeight::indicator(1, 0, 2)).value.value() ==
        doctest::Approx(26.0 / 9.0).epsilon(1e-8));
}

TEST_CASE("sup of a profile approached at infinity") {
  const CriterionReport r = sup_of_profile([](double t) { return t / (1 + t); });
  CHECK(r.value.value() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.escapes_to_infinity);
  const CriterionReport peak = sup_of_profile([](double t) { return t * std::exp(-t); });
  CHECK(peak.value.value() == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(peak.maximizer == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("weighted constant M' is finite exactly when the homogeneous condition is") {
  const PiecewiseTrig omega = ground_state_homogeneous(2, 64);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const HardyWeight psi = HardyWeight::power(1, p);
    CAPTURE(p);
    CHECK(weighted_muckenhoupt_constant(omega, psi).divergent() ==
          homo_condition_value(psi).divergent());
  }
  CHECK(weighted_muckenhoupt_constant(omega, HardyWeight::constant(0)).value.value() == 0.0);
  const CriterionReport m3 = weighted_muckenhoupt_constant(omega, HardyWeight::power(1, 3));
  REQUIRE(m3.value.is_finite());
  CHECK(m3.value.error() < 0.01 * m3.value.value());
}

TEST_CASE("Hardy operator inequality on random test functions") {
  std::vector<double> nodes;
  for (int i = 0; i <= 200; ++i) nodes.push_back(i / 200.0);
  const std::vector<double> ones(200, 1.0);
  const MuckenhouptCheck flat = muckenhoupt_inequality_check(nodes, ones, ones, 300, 7);
  CHECK(flat.holds);
  CHECK(flat.T == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(flat.max_ratio <= 4 * flat.T);

  const std::vector<double> zero_phi(nodes.size(), 0.0);
  const auto [lhs, rhs] = hardy_operator_sides(nodes, ones, ones, zero_phi);
  CHECK(lhs == 0.0);
  CHECK(rhs == 0.0);

  // w² = ψ g0 and v² = g0 of the binary tree on [0, 12]
  const RegularTree tree = RegularTree::homogeneous(2, 1.0);
  const HardyWeight psi = HardyWeight::power(1, 2);
  std::vector<double> tn, w2, v2;
  for (int i = 0; i <= 1200; ++i) tn.push_back(i / 100.0);
  for (int i = 0; i < 1200; ++i) {
    const double mid = (i + 0.5) / 100.0;
    w2.push_back(psi(mid) * tree.g0(mid));
    v2.push_back(tree.g0(mid));
  }
  const MuckenhouptCheck c = muckenhoupt_inequality_check(tn, w2, v2, 300, 11);
  CHECK(c.holds);
  CHECK(c.max_ratio <= 4 * muckenhoupt_constant(tree, psi).value.value());
}
