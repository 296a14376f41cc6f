#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hardy/certified.hpp"

namespace hardy {

/// One generation of a regular rooted metric tree: the edge ending at the
/// vertex t_k has length `length`, and that vertex has `branching` children.
struct Generation {
  double length = 1.0;
  int branching = 2;

  bool operator==(const Generation&) const = default;
};

/// How the generation list continues beyond the explicit listing.
struct TailRule {
  enum class Kind { none, periodic, homogeneous, scaled };

  Kind kind = Kind::none;
  int period = 0;       // periodic, scaled
  int branching = 0;    // homogeneous
  double length = 0.0;  // homogeneous
  double scale = 1.0;   // scaled: edge lengths grow by this factor per period

  static TailRule none() { return {}; }
  static TailRule periodic(int p) { return {Kind::periodic, p, 0, 0.0, 1.0}; }
  static TailRule homogeneous(int b, double len) { return {Kind::homogeneous, 0, b, len, 1.0}; }
  static TailRule scaled(int p, double r) { return {Kind::scaled, p, 0, 0.0, r}; }

  bool operator==(const TailRule&) const = default;
};

/// The maximal interval (start, end] on which g0 is constant.
struct Piece {
  std::size_t index = 0;
  double start = 0.0;
  double end = 0.0;  // +inf for the last edge of a finitely listed tree
  double g0 = 1.0;
};

/// Rooted regular metric tree determined by (t_k, b_k) with t_0 = 0, b_0 = 1.
///
/// Conventions: g0 is constant on (t_k, t_{k+1}] with value b_0 b_1 ... b_k
/// (and g0(0) = 1); for k >= 1, g_k vanishes on [0, t_k) and equals
/// b_{k+1} ... b_n on [t_n, t_{n+1}).  A finitely listed tree (tail `none`)
/// ends in one edge of infinite length, so it is recurrent.
class RegularTree {
 public:
  RegularTree(std::vector<Generation> generations, TailRule tail);

  static RegularTree homogeneous(int b, double length = 1.0);
  /// The half-line: g0 = 1 everywhere.
  static RegularTree ray();

  const std::vector<Generation>& generations() const noexcept { return explicit_; }
  const TailRule& tail() const noexcept { return tail_; }
  bool finitely_listed() const noexcept { return tail_.kind == TailRule::Kind::none; }
  /// Number of vertices t_1, ..., t_K that exist (K for finite listings, SIZE_MAX otherwise).
  std::size_t vertex_count() const noexcept;

  /// Generation k >= 1 (edge length ending at t_k, branching b_k).
  Generation generation(std::size_t k) const;
  /// t_k; t_0 = 0.
  double vertex(std::size_t k) const;
  /// b_k; b_0 = 1.
  int branching(std::size_t k) const;
  /// b_0 b_1 ... b_k as a double.
  double branching_product(std::size_t k) const;

  Piece piece(std::size_t k) const;
  /// Index of the piece (t_k, t_{k+1}] containing t; t = 0 maps to piece 0.
  std::size_t piece_index(double t) const;

  double g0(double t) const;
  /// g_k(t), k >= 0.  Throws std::out_of_range when vertex t_k does not exist.
  double branching_value(std::size_t k, double t) const;

  /// ∫_{t_k}^∞ dt / g0(t), closed form; +inf for recurrent trees.
  double tail_integral(std::size_t k) const;
  /// ∫_t^∞ ds / g0(s) for arbitrary t >= 0.
  double tail_integral_from(double t) const;
  /// Pieces meeting [0, horizon).
  std::vector<Piece> pieces_until(double horizon) const;

  /// Number of explicit pieces before the tail rule takes over.
  std::size_t explicit_pieces() const noexcept { return explicit_.size(); }
  /// Generations per tail period (0 for finite listings).
  std::size_t tail_period() const noexcept { return block_.size(); }

  /// Same tree with every edge length multiplied by c > 0.
  RegularTree scaled_lengths(double c) const;

  bool operator==(const RegularTree& o) const {
    return explicit_ == o.explicit_ && tail_ == o.tail_;
  }

 private:
  struct TailPosition {
    std::size_t period;  // m >= 1
    std::size_t offset;  // i in [0, P)
  };
  TailPosition tail_position(std::size_t k) const;
  double period_start(std::size_t m) const;  // vertex t_{K + (m-1)P}

  std::vector<Generation> explicit_;
  TailRule tail_;
  std::vector<Generation> block_;       // generations repeated by the tail
  std::vector<double> vertex_;          // t_0 .. t_K
  std::vector<double> product_;         // b_0 .. b_k products, k = 0..K
  std::vector<double> block_offset_;    // cumulative block lengths
  std::vector<double> block_product_;   // cumulative block branching products
  double block_length_ = 0.0;
  double period_product_ = 1.0;
  double scale_ = 1.0;
};

/// ∫_0^∞ dt / g0(t): exact sum over explicit pieces plus the closed-form
/// geometric tail; DIVERGENT for recurrent trees.
Certified reduced_height(const RegularTree& tree, double tol = 1e-12);

struct DimensionBounds {
  double inf_ratio = 0.0;
  double sup_ratio = 0.0;
};

/// inf and sup of g0(t) / (1+t)^(d-1) over [0, horizon].
DimensionBounds global_dimension_bounds(const RegularTree& tree, double d, double horizon);

std::string to_string(const TailRule& tail);

}  // namespace hardy
