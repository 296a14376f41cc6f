#include "hardy/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "format.hpp"

namespace hardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_generation(const Generation& g, std::size_t k) {
  if (!(g.length > 0.0) || !std::isfinite(g.length)) {
    throw DomainError("generation " + std::to_string(k) + ": edge length must be positive");
  }
  if (g.branching < 2) {
    throw DomainError("generation " + std::to_string(k) +
                      ": branching must be >= 2 (b(x) > 1 at every vertex other than the root)");
  }
}

}  // namespace

RegularTree::RegularTree(std::vector<Generation> generations, TailRule tail)
    : explicit_(std::move(generations)), tail_(tail) {
  for (std::size_t k = 0; k < explicit_.size(); ++k) validate_generation(explicit_[k], k + 1);

  const std::size_t n = explicit_.size();
  switch (tail_.kind) {
    case TailRule::Kind::none:
      break;
    case TailRule::Kind::homogeneous:
      validate_generation({tail_.length, tail_.branching}, n + 1);
      block_ = {{tail_.length, tail_.branching}};
      break;
    case TailRule::Kind::periodic:
    case TailRule::Kind::scaled:
      if (tail_.period < 1 || static_cast<std::size_t>(tail_.period) > n) {
        throw DomainError("tail period must be between 1 and the number of listed generations");
      }
      if (tail_.kind == TailRule::Kind::periodic) tail_.scale = 1.0;
      if (!(tail_.scale >= 1.0) || !std::isfinite(tail_.scale)) {
        throw DomainError("scaled tail requires a finite length factor >= 1");
      }
      block_.assign(explicit_.end() - tail_.period, explicit_.end());
      scale_ = tail_.scale;
      break;
  }

  vertex_.assign(n + 1, 0.0);
  product_.assign(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) {
    vertex_[k] = vertex_[k - 1] + explicit_[k - 1].length;
    product_[k] = product_[k - 1] * explicit_[k - 1].branching;
  }

  block_offset_.assign(block_.size() + 1, 0.0);
  block_product_.assign(block_.size() + 1, 1.0);
  for (std::size_t i = 0; i < block_.size(); ++i) {
    block_offset_[i + 1] = block_offset_[i] + block_[i].length;
    block_product_[i + 1] = block_product_[i] * block_[i].branching;
  }
  block_length_ = block_offset_.back();
  period_product_ = block_product_.back();
}

RegularTree RegularTree::homogeneous(int b, double length) {
  return RegularTree({}, TailRule::homogeneous(b, length));
}

RegularTree RegularTree::ray() { return RegularTree({}, TailRule::none()); }

std::size_t RegularTree::vertex_count() const noexcept {
  return finitely_listed() ? explicit_.size() : std::numeric_limits<std::size_t>::max();
}

RegularTree::TailPosition RegularTree::tail_position(std::size_t k) const {
  const std::size_t q = k - explicit_.size();
  const std::size_t p = block_.size();
  return {q / p + 1, q % p};
}

double RegularTree::period_start(std::size_t m) const {
  const double base = vertex_.back();
  if (m <= 1) return base;
  if (scale_ == 1.0) return base + block_length_ * static_cast<double>(m - 1);
  // L (r + r^2 + ... + r^(m-1))
  return base + block_length_ * scale_ * (std::pow(scale_, static_cast<double>(m - 1)) - 1.0) /
                    (scale_ - 1.0);
}

Generation RegularTree::generation(std::size_t k) const {
  if (k == 0) throw std::out_of_range("generation index starts at 1");
  if (k <= explicit_.size()) return explicit_[k - 1];
  if (finitely_listed()) throw std::out_of_range("generation beyond a finite listing");
  const auto [m, i] = tail_position(k - 1);
  return {block_[i].length * std::pow(scale_, static_cast<double>(m)), block_[i].branching};
}

double RegularTree::vertex(std::size_t k) const {
  if (k < vertex_.size()) return vertex_[k];
  if (finitely_listed()) throw std::out_of_range("vertex beyond a finite listing");
  const auto [m, i] = tail_position(k);
  return period_start(m) + std::pow(scale_, static_cast<double>(m)) * block_offset_[i];
}

int RegularTree::branching(std::size_t k) const {
  if (k == 0) return 1;
  return generation(k).branching;
}

double RegularTree::branching_product(std::size_t k) const {
  if (k < product_.size()) return product_[k];
  if (finitely_listed()) throw std::out_of_range("vertex beyond a finite listing");
  const auto [m, i] = tail_position(k);
  return product_.back() * std::pow(period_product_, static_cast<double>(m - 1)) *
         block_product_[i];
}

Piece RegularTree::piece(std::size_t k) const {
  if (finitely_listed()) {
    if (k > explicit_.size()) throw std::out_of_range("piece beyond a finite listing");
    if (k == explicit_.size()) return {k, vertex_.back(), kInf, product_.back()};
  }
  return {k, vertex(k), vertex(k + 1), branching_product(k)};
}

std::size_t RegularTree::piece_index(double t) const {
  if (!(t > 0.0)) return 0;
  const std::size_t n = explicit_.size();
  if (t <= vertex_.back()) {
    // first k with t_k >= t; t lies in (t_{k-1}, t_k]
    auto it = std::lower_bound(vertex_.begin(), vertex_.end(), t);
    return static_cast<std::size_t>(it - vertex_.begin()) - 1;
  }
  if (finitely_listed()) return n;

  std::size_t m = 1;
  if (scale_ == 1.0) {
    m = static_cast<std::size_t>(std::floor((t - vertex_.back()) / block_length_)) + 1;
    while (m > 1 && period_start(m) >= t) --m;
    while (period_start(m + 1) < t) ++m;
  } else {
    while (period_start(m + 1) < t) ++m;
  }
  const double start = period_start(m);
  const double r_m = std::pow(scale_, static_cast<double>(m));
  std::size_t i = 0;
  while (i + 1 < block_.size() && start + r_m * block_offset_[i + 1] < t) ++i;
  return n + (m - 1) * block_.size() + i;
}

double RegularTree::g0(double t) const {
  if (!(t > 0.0)) return 1.0;
  return piece(piece_index(t)).g0;
}

double RegularTree::branching_value(std::size_t k, double t) const {
  if (k == 0) return g0(t);
  if (finitely_listed() && k > explicit_.size()) {
    throw std::out_of_range("g_k requested for a vertex beyond the finite listing");
  }
  const double tk = vertex(k);
  if (t < tk) return 0.0;
  std::size_t n = piece_index(t);
  const Piece p = piece(n);
  if (t == p.end) ++n;  // g_k pieces close on the left
  if (n < k) n = k;
  return branching_product(n) / branching_product(k);
}

double RegularTree::tail_integral(std::size_t k) const {
  if (finitely_listed()) return kInf;
  const double rho = scale_ / period_product_;
  if (!(rho < 1.0)) return kInf;

  const std::size_t n = explicit_.size();
  const std::size_t p = block_.size();
  auto block_sum_from = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = i; j < p; ++j) s += block_[j].length / block_product_[j];
    return s;
  };
  const double full = block_sum_from(0);
  // pieces from (m, i) on, each scaled by Π ρ^m / (b_0...b_K)
  auto tail_from = [&](std::size_t m, std::size_t i) {
    const double factor =
        period_product_ * std::pow(rho, static_cast<double>(m)) / product_.back();
    return factor * (block_sum_from(i) + full * rho / (1.0 - rho));
  };

  if (k >= n) {
    const auto [m, i] = tail_position(k);
    return tail_from(m, i);
  }
  double s = 0.0;
  for (std::size_t j = k; j < n; ++j) s += explicit_[j].length / product_[j];
  return s + tail_from(1, 0);
}

double RegularTree::tail_integral_from(double t) const {
  const std::size_t k = piece_index(t);
  const Piece p = piece(k);
  if (std::isinf(p.end)) return kInf;
  const double rest = tail_integral(k + 1);
  return (p.end - std::max(t, p.start)) / p.g0 + rest;
}

std::vector<Piece> RegularTree::pieces_until(double horizon) const {
  std::vector<Piece> out;
  for (std::size_t k = 0;; ++k) {
    if (finitely_listed() && k > explicit_.size()) break;
    Piece p = piece(k);
    if (!(p.start < horizon)) break;
    out.push_back(p);
    if (std::isinf(p.end)) break;
  }
  return out;
}

RegularTree RegularTree::scaled_lengths(double c) const {
  if (!(c > 0.0)) throw DomainError("length scale must be positive");
  auto gens = explicit_;
  for (auto& g : gens) g.length *= c;
  TailRule t = tail_;
  if (t.kind == TailRule::Kind::homogeneous) t.length *= c;
  return RegularTree(std::move(gens), t);
}

Certified reduced_height(const RegularTree& tree, double /*tol*/) {
  const double v = tree.tail_integral(0);
  if (std::isinf(v)) return Certified::divergent();
  // closed form; the error is floating-point rounding only
  return Certified::finite(v, 64.0 * std::numeric_limits<double>::epsilon() * v);
}

DimensionBounds global_dimension_bounds(const RegularTree& tree, double d, double horizon) {
  if (!(d >= 1.0)) throw DomainError("global dimension must be >= 1");
  DimensionBounds out{1.0, 1.0};
  if (!(horizon > 0.0)) return out;
  const double e = d - 1.0;
  for (const Piece& p : tree.pieces_until(horizon)) {
    const double right = std::min(p.end, horizon);
    // the ratio is non-increasing on a constant piece of g0
    out.sup_ratio = std::max(out.sup_ratio, p.g0 / std::pow(1.0 + p.start, e));
    out.inf_ratio = std::min(out.inf_ratio, p.g0 / std::pow(1.0 + right, e));
  }
  return out;
}

std::string to_string(const TailRule& tail) {
  switch (tail.kind) {
    case TailRule::Kind::none:
      return "none";
    case TailRule::Kind::periodic:
      return "periodic(" + std::to_string(tail.period) + ")";
    case TailRule::Kind::homogeneous:
      return "homogeneous(" + std::to_string(tail.branching) + ", " + fmt_full(tail.length) + ")";
    case TailRule::Kind::scaled:
      return "scaled(" + std::to_string(tail.period) + ", " + fmt_full(tail.scale) + ")";
  }
  return "none";
}

}  // namespace hardy
