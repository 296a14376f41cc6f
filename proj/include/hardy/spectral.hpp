#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hardy/ab_loop.hpp"
#include "hardy/eigensolver.hpp"
#include "hardy/tree_model.hpp"
#include "hardy/weights.hpp"

namespace hardy {

enum class Boundary { neumann, dirichlet };

/// Piecewise constant function on [0, ∞): values[i] on (breaks[i], breaks[i+1]],
/// the last value extends to infinity.  breaks[0] is the left end of the domain.
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;

  static PiecewiseConstant constant(double c, double start = 0.0);
  /// g0 of the tree, listed up to `horizon`.
  static PiecewiseConstant branching(const RegularTree& tree, double horizon);
  /// g_k of the tree on [t_k, horizon]; k = 0 gives g0.
  static PiecewiseConstant branching(const RegularTree& tree, std::size_t k, double horizon);

  double operator()(double t) const;
  /// The value on the open cell (a, b); AssemblyError if a break lies inside.
  double on_cell(double a, double b) const;
};

/// Nodes of a one-dimensional mesh.
struct Grid {
  std::vector<double> nodes;

  static Grid uniform(double a, double b, double h);
  /// Uniform within each segment between consecutive breakpoints in (a, b);
  /// every breakpoint becomes a node and no cell exceeds h.
  static Grid aligned(double a, double b, double h, const std::vector<double>& breaks);

  std::size_t cells() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// P1 discretization of ∫|f'|² g versus ∫|f|² ψ g on a grid.
struct HalflinePencil {
  RealPencil pencil;
  Grid grid;
  Boundary left = Boundary::neumann;
  Boundary right = Boundary::dirichlet;
  std::vector<long> dof;  // per node, -1 when eliminated by a Dirichlet condition
  std::string provenance;
};

/// g must be constant on every cell (breakpoints aligned with nodes).
HalflinePencil assemble_halfline(const Grid& grid, const PiecewiseConstant& g,
                                 const HardyWeight& psi, Boundary left,
                                 Boundary right = Boundary::dirichlet);

struct HardyEstimate {
  double T = 0.0;
  double h = 0.0;
  double lambda_min = 0.0;  // smallest eigenvalue of the truncated pencil
  double C_T = 0.0;         // 1/lambda_min
  CriterionReport M;        // Muckenhoupt constant of (tree, ψ)
};

/// C_T for (tree, ψ): Neumann at the root, Dirichlet at T.
HardyEstimate hardy_constant_estimate(const RegularTree& tree, const HardyWeight& psi, double T,
                                      double h, double rtol = 1e-10);

struct HomoCheck {
  double lambda_b = 0.0;
  /// min of (∫|f'|² g0 - λ_b∫|f|² g0) / ∫|f|² g0; positive on truncations.
  double shifted_bottom = 0.0;
  /// min of (∫|f'|² g0 - λ_b∫|f|² g0) / ∫|f|² ψ g0; +inf for ψ = 0.
  double hardy_eigenvalue = 0.0;
  CriterionReport M_prime;
};

HomoCheck homo_hardy_check(int b, const HardyWeight& psi, double T, double h,
                           double rtol = 1e-10);

/// Finite metric tree mesh: edges carry their own node lists, vertices are
/// shared degrees of freedom.
struct TreeMesh {
  struct Edge {
    std::size_t generation = 0;  // 1-based
    long parent = -1;            // index of the parent edge
    double start = 0.0;
    double end = 0.0;
    std::vector<double> nodes;   // positions (distance from the root)
    std::vector<long> dof;       // per node, -1 for Dirichlet leaves
  };
  std::vector<Edge> edges;
  long dof_count = 0;
};

struct TreeAssembly {
  TreeMesh mesh;
  RealPencil pencil;
};

/// ∫_Γ|u'|² versus ∫_Γ|u|² on the tree truncated at generation `depth`;
/// Neumann at the root, Dirichlet at the leaves.
TreeAssembly assemble_tree(const RegularTree& tree, std::size_t depth, double h);

/// Max over generations of the spread of a nodal vector across sibling
/// edges, relative to its max modulus.
double sibling_spread(const TreeMesh& mesh, const Eigen::VectorXd& x);

struct DecompositionReport {
  std::vector<double> tree;           // lowest eigenvalues of the full tree
  std::vector<double> orthogonal_sum; // merged spectra of the A_k
  std::vector<std::size_t> source;    // k of the component each merged value came from
  std::vector<long> multiplicity;     // per k: b_1 ... b_{k-1}(b_k - 1)
  long tree_dofs = 0;
  long sum_dofs = 0;                  // Σ multiplicity × dofs(A_k)
  double max_relative_difference = 0.0;
};

DecompositionReport decomposition_check(int b, std::size_t depth, double h, int n_eigs,
                                        double rtol = 1e-11);

/// Degrees of freedom of the loop graph mesh.
///   index 0            the vertex (θ = 0 = 2π, r = 1)
///   1 .. N-1           circle nodes θ_i = 2πi/N
///   N .. N+M-2         half-line nodes r_k = 1 + k h, k = 1 .. M-1
/// and r = T is eliminated by the Dirichlet condition.
struct LoopLayout {
  int n_circle = 0;
  int n_line = 0;  // half-line cells
  double h_circle = 0.0;
  double h_line = 0.0;
  double T = 0.0;

  Eigen::Index size() const { return n_circle + n_line - 1; }
  Eigen::Index circle(int i) const { return i % n_circle; }
  Eigen::Index line(int k) const { return k == 0 ? 0 : n_circle + k - 1; }
  double theta(int i) const;
  double radius(int k) const { return 1.0 + k * h_line; }
};

struct LoopPencil {
  ComplexPencil pencil;  // (form h_a, mass with ψ = 1 on the circle, r^-2 on the line)
  LoopLayout layout;
};

/// Magnetic P1 elements on the circle (link phase = exact cell integral of
/// a, mass of the gauge-transformed linear interpolant) and P1 elements on
/// [1, T].  The circle mesh has an even number of cells.
LoopPencil assemble_loop(const FluxSpec& a, double T, double h_circle, double h_line);

/// u* K u and u* M u for a nodal loop vector.
double loop_form(const LoopPencil& p, const Eigen::VectorXcd& u);
double loop_mass(const LoopPencil& p, const Eigen::VectorXcd& u);

/// λ_min of the truncated loop pencil at constant flux α.
double loop_hardy_estimate(double alpha, double T, double h_circle, double h_line,
                           double rtol = 1e-9);

struct GaugeReport {
  std::vector<double> reference;  // a ≡ α
  std::vector<double> potential;  // the given a
  std::vector<double> shifted;    // a ≡ α + 1
  std::vector<double> conjugate;  // a ≡ -α
  double max_relative_difference = 0.0;
};

GaugeReport gauge_invariance_check(const FluxSpec& a, double T, double h_circle, double h_line,
                                   int n_eigs, double rtol = 1e-10);

struct AntisymmetricBound {
  double ratio = 0.0;  // magnetic form / L² norm at flux 1/2
  bool holds = false;  // ratio >= 1/4 - tol and >= λ*(1/2)
};

/// `p` must be assembled at flux 1/2; `ua` must vanish at the vertex and on the line.
AntisymmetricBound antisymmetric_bound_check(const LoopPencil& p, const Eigen::VectorXcd& ua,
                                             double tol = 1e-9);

}  // namespace hardy
