#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace hardy {

/// λ_b = (arccos 1/R_b)², R_b = (√b + 1/√b)/2: bottom of the spectrum of the
/// Neumann Laplacian on the homogeneous tree with unit edges.
double lambda_b(int b);

/// Positive solution ω of -(g0 ω')' = λ g0 ω on a homogeneous tree with
/// unit edges, ω(0) = 1, ω'(0) = 0, continuity and ω'(j-) = b ω'(j+).
///
/// On edge j, ω(t) = A_j cos(√λ t) + B_j sin(√λ t).  Coefficients are kept
/// multiplied by b^(j/2) so that √g0 ω is representable for long horizons.
class PiecewiseTrig {
 public:
  struct Coefficients {
    double a = 0.0;
    double b = 0.0;
  };
  enum class Side { left, right };

  PiecewiseTrig(int branching, double lambda, std::vector<Coefficients> scaled);

  int branching() const noexcept { return b_; }
  double lambda() const noexcept { return lambda_; }
  double frequency() const noexcept { return k_; }
  /// Number of unit edges represented, i.e. ω is known on [0, horizon].
  int horizon() const noexcept { return static_cast<int>(scaled_.size()); }

  /// (A_j, B_j) such that ω = A_j cos + B_j sin on edge j.
  Coefficients coefficients(int j) const;
  /// b^(j/2) (A_j, B_j): √g0 ω on the edge (j, j+1].
  const Coefficients& scaled_coefficients(int j) const { return scaled_.at(j); }

  double value(double t) const;
  /// ω'(t); at an integer vertex `side` selects the one-sided limit.
  double derivative(double t, Side side = Side::right) const;
  /// √g0 ω on the closed edge [j, j+1] with g0 = b^j (right limit at t = j).
  double scaled_value(int j, double t) const;
  double scaled_derivative(int j, double t) const;

 private:
  int edge_of(double t, Side side) const;

  int b_;
  double lambda_;
  double k_;
  std::vector<Coefficients> scaled_;
};

/// Propagates (ω, ω') by 2x2 transfer matrices: free evolution at energy λ
/// on each unit edge, then ω' scaled by 1/b at each vertex.  Throws
/// ConsistencyError if ω fails to stay positive on [0, horizon] at λ = λ_b.
PiecewiseTrig ground_state_homogeneous(int b, int horizon);

/// Same propagation at an arbitrary λ in (0, (π/2)²); no positivity check.
PiecewiseTrig propagate_homogeneous(int b, double lambda, int horizon);

/// True if the Neumann solution at energy λ stays positive on [0, horizon].
/// Renormalises every step, so horizons of 10^5 and more are fine.
bool stays_positive(int b, double lambda, long horizon);

struct Envelope {
  double c1 = 0.0;  // inf √g0 ω / (1+t)
  double c2 = 0.0;  // sup √g0 ω / (1+t)
};

/// Sampled inf and sup of √g0(t) ω(t) / (1+t) over [0, horizon]; both
/// one-sided limits are sampled at every vertex.
Envelope efgrowth_envelope(const PiecewiseTrig& omega, int samples_per_edge);

/// A smooth test function and its derivative.
struct SmoothFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

struct GsrResidual {
  double shifted_form = 0.0;   // ∫(|f'|² - λ_b|f|²) g0, f = ωφ
  double ground_state = 0.0;   // ∫ |ω φ'|² g0
  double absolute() const;
  double relative() const;
};

/// Both sides of the ground state representation on [0, T] by composite
/// midpoint quadrature with step <= h that never straddles a vertex.
/// φ must vanish at T.
GsrResidual gsr_residual(int b, const SmoothFunction& phi, double T, double h);

}  // namespace hardy
