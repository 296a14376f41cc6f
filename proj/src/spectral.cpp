#include "hardy/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "hardy/certified.hpp"
#include "hardy/ground_state.hpp"

namespace hardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool near(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); }

/// ∫_a^b ψ φ_i φ_j for the two hat functions of the cell [a, b].
std::array<double, 3> cell_mass(const HardyWeight& psi, double a, double b) {
  const double h = b - a;
  std::array<double, 3> m{0.0, 0.0, 0.0};  // (00, 01, 11)
  std::vector<double> pts{a};
  for (double x : psi.breakpoints()) {
    if (x > a && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  using G = boost::math::quadrature::gauss<double, 8>;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const double lo = pts[s];
    const double hi = pts[s + 1];
    // evaluate ψ strictly inside the piece so indicator ends do not leak
    m[0] += G::integrate([&](double t) { return psi(t) * std::pow((b - t) / h, 2); }, lo, hi);
    m[1] += G::integrate([&](double t) { return psi(t) * (b - t) * (t - a) / (h * h); }, lo, hi);
    m[2] += G::integrate([&](double t) { return psi(t) * std::pow((t - a) / h, 2); }, lo, hi);
  }
  return m;
}

template <class Scalar>
struct Triplets {
  std::vector<Eigen::Triplet<Scalar>> k, m;
  /// Adds to K and M at the same position so both share one pattern.
  void add(long i, long j, Scalar kv, Scalar mv) {
    if (i < 0 || j < 0) return;
    k.emplace_back(i, j, kv);
    m.emplace_back(i, j, mv);
  }
  Pencil<Scalar> build(long n) const {
    Pencil<Scalar> p;
    p.K.resize(n, n);
    p.M.resize(n, n);
    p.K.setFromTriplets(k.begin(), k.end());
    p.M.setFromTriplets(m.begin(), m.end());
    p.K.makeCompressed();
    p.M.makeCompressed();
    return p;
  }
};

RealPencil shifted_pencil(const RealPencil& a, double lambda, const RealPencil& b) {
  RealPencil out;
  out.K = a.K - lambda * a.M;
  out.M = b.M;
  return out;
}

}  // namespace

PiecewiseConstant PiecewiseConstant::constant(double c, double start) {
  return {{start}, {c}};
}

PiecewiseConstant PiecewiseConstant::branching(const RegularTree& tree, double horizon) {
  return branching(tree, 0, horizon);
}

PiecewiseConstant PiecewiseConstant::branching(const RegularTree& tree, std::size_t k,
                                               double horizon) {
  PiecewiseConstant out;
  const double base = tree.branching_product(k);
  for (std::size_t n = k;; ++n) {
    const Piece p = tree.piece(n);
    out.breaks.push_back(p.start);
    out.values.push_back(k == 0 ? p.g0 : p.g0 / base);
    if (!(p.end < horizon)) break;
  }
  return out;
}

double PiecewiseConstant::operator()(double t) const {
  std::size_t i = 0;
  while (i + 1 < breaks.size() && breaks[i + 1] < t) ++i;
  return values[i];
}

double PiecewiseConstant::on_cell(double a, double b) const {
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double x = breaks[i];
    if (x > a && x < b && !near(x, a) && !near(x, b)) {
      throw AssemblyError("weight breakpoint " + std::to_string(x) + " is not a grid node");
    }
  }
  return (*this)(0.5 * (a + b));
}

Grid Grid::uniform(double a, double b, double h) { return aligned(a, b, h, {}); }

Grid Grid::aligned(double a, double b, double h, const std::vector<double>& breaks) {
  if (!(b > a) || !(h > 0.0)) throw DomainError("grid needs a < b and h > 0");
  std::vector<double> pts{a};
  for (double x : breaks) {
    if (x > a && x < b && !near(x, pts.back()) && !near(x, b)) pts.push_back(x);
  }
  pts.push_back(b);
  Grid g;
  g.nodes.push_back(a);
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const double p = pts[s];
    const double q = pts[s + 1];
    const long n = std::max(1L, static_cast<long>(std::ceil((q - p) / h - 1e-9)));
    for (long i = 1; i < n; ++i) g.nodes.push_back(p + (q - p) * static_cast<double>(i) / n);
    g.nodes.push_back(q);
  }
  return g;
}

HalflinePencil assemble_halfline(const Grid& grid, const PiecewiseConstant& g,
                                 const HardyWeight& psi, Boundary left, Boundary right) {
  const std::size_t n = grid.cells();
  if (n < 1) throw AssemblyError("grid has no cells");
  HalflinePencil out;
  out.grid = grid;
  out.left = left;
  out.right = right;
  out.dof.assign(n + 1, -1);
  long next = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    if (i == 0 && left == Boundary::dirichlet) continue;
    if (i == n && right == Boundary::dirichlet) continue;
    out.dof[i] = next++;
  }
  if (next == 0) throw AssemblyError("no free degrees of freedom");

  Triplets<double> tr;
  for (std::size_t c = 0; c < n; ++c) {
    const double a = grid.nodes[c];
    const double b = grid.nodes[c + 1];
    const double h = b - a;
    const double gc = g.on_cell(a, b);
    const auto m = cell_mass(psi, a, b);
    const long i = out.dof[c];
    const long j = out.dof[c + 1];
    tr.add(i, i, gc / h, gc * m[0]);
    tr.add(j, j, gc / h, gc * m[2]);
    tr.add(i, j, -gc / h, gc * m[1]);
    tr.add(j, i, -gc / h, gc * m[1]);
  }
  out.pencil = tr.build(next);
  out.provenance = "P1 on [" + std::to_string(grid.nodes.front()) + ", " +
                   std::to_string(grid.nodes.back()) + "], weight " + to_string(psi);
  return out;
}

HardyEstimate hardy_constant_estimate(const RegularTree& tree, const HardyWeight& psi, double T,
                                      double h, double rtol) {
  HardyEstimate out;
  out.T = T;
  out.h = h;
  const PiecewiseConstant g = PiecewiseConstant::branching(tree, T);
  const Grid grid = Grid::aligned(0.0, T, h, g.breaks);
  const HalflinePencil hp = assemble_halfline(grid, g, psi, Boundary::neumann);
  out.lambda_min = smallest_eigenpair(hp.pencil, rtol).value;
  out.C_T = 1.0 / out.lambda_min;
  out.M = muckenhoupt_constant(tree, psi);
  return out;
}

HomoCheck homo_hardy_check(int b, const HardyWeight& psi, double T, double h, double rtol) {
  HomoCheck out;
  out.lambda_b = lambda_b(b);
  const RegularTree tree = RegularTree::homogeneous(b, 1.0);
  const PiecewiseConstant g = PiecewiseConstant::branching(tree, T);
  const Grid grid = Grid::aligned(0.0, T, h, g.breaks);
  const HalflinePencil plain = assemble_halfline(grid, g, HardyWeight::constant(1.0),
                                                 Boundary::neumann);
  out.shifted_bottom = smallest_eigenpair(plain.pencil, rtol).value - out.lambda_b;
  if (psi.is_zero()) {
    out.hardy_eigenvalue = kInf;
  } else {
    const HalflinePencil weighted = assemble_halfline(grid, g, psi, Boundary::neumann);
    const RealPencil p = shifted_pencil(plain.pencil, out.lambda_b, weighted.pencil);
    out.hardy_eigenvalue = smallest_eigenpair(p, rtol).value;
  }
  const int horizon = std::max(64, static_cast<int>(std::ceil(T)));
  out.M_prime = weighted_muckenhoupt_constant(ground_state_homogeneous(b, horizon), psi);
  return out;
}

TreeAssembly assemble_tree(const RegularTree& tree, std::size_t depth, double h) {
  if (depth < 1) throw DomainError("tree depth must be >= 1");
  if (!(h > 0.0)) throw DomainError("mesh step must be positive");
  if (tree.finitely_listed() && depth > tree.generations().size()) {
    throw DomainError("tree depth exceeds the listed generations");
  }
  TreeAssembly out;
  TreeMesh& mesh = out.mesh;
  long next = 0;

  // breadth first; the first node of a child edge is the end vertex of its parent
  std::vector<long> frontier{-1};
  for (std::size_t k = 1; k <= depth; ++k) {
    const Generation gen = tree.generation(k);
    const double start = tree.vertex(k - 1);
    const double end = tree.vertex(k);
    const long cells = std::max(1L, static_cast<long>(std::ceil(gen.length / h - 1e-9)));
    const int children = tree.branching(k - 1);
    std::vector<long> next_frontier;
    for (long parent : frontier) {
      for (int c = 0; c < children; ++c) {
        TreeMesh::Edge e;
        e.generation = k;
        e.parent = parent;
        e.start = start;
        e.end = end;
        for (long i = 0; i <= cells; ++i) {
          e.nodes.push_back(start + gen.length * static_cast<double>(i) / cells);
        }
        e.dof.assign(cells + 1, -1);
        e.dof[0] = parent < 0 ? next++ : mesh.edges[parent].dof.back();
        for (long i = 1; i < cells; ++i) e.dof[i] = next++;
        e.dof[cells] = k == depth ? -1 : next++;
        mesh.edges.push_back(std::move(e));
        next_frontier.push_back(static_cast<long>(mesh.edges.size()) - 1);
      }
    }
    frontier = std::move(next_frontier);
  }
  mesh.dof_count = next;

  Triplets<double> tr;
  for (const auto& e : mesh.edges) {
    for (std::size_t c = 0; c + 1 < e.nodes.size(); ++c) {
      const double len = e.nodes[c + 1] - e.nodes[c];
      const long i = e.dof[c];
      const long j = e.dof[c + 1];
      tr.add(i, i, 1.0 / len, len / 3.0);
      tr.add(j, j, 1.0 / len, len / 3.0);
      tr.add(i, j, -1.0 / len, len / 6.0);
      tr.add(j, i, -1.0 / len, len / 6.0);
    }
  }
  out.pencil = tr.build(next);
  return out;
}

double sibling_spread(const TreeMesh& mesh, const Eigen::VectorXd& x) {
  const double scale = x.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return 0.0;
  auto value = [&](long d) { return d < 0 ? 0.0 : x[d]; };
  double spread = 0.0;
  std::size_t i = 0;
  while (i < mesh.edges.size()) {
    std::size_t j = i;
    while (j < mesh.edges.size() && mesh.edges[j].generation == mesh.edges[i].generation) ++j;
    for (std::size_t node = 0; node < mesh.edges[i].dof.size(); ++node) {
      double lo = kInf;
      double hi = -kInf;
      for (std::size_t e = i; e < j; ++e) {
        const double v = value(mesh.edges[e].dof[node]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      spread = std::max(spread, hi - lo);
    }
    i = j;
  }
  return spread / scale;
}

DecompositionReport decomposition_check(int b, std::size_t depth, double h, int n_eigs,
                                        double rtol) {
  if (b < 2) throw DomainError("branching must be >= 2");
  if (n_eigs < 1) throw DomainError("need at least one eigenvalue");
  DecompositionReport out;
  const RegularTree tree = RegularTree::homogeneous(b, 1.0);
  const double L = static_cast<double>(depth);

  const TreeAssembly full = assemble_tree(tree, depth, h);
  out.tree_dofs = full.mesh.dof_count;
  out.tree = lowest_eigenvalues(full.pencil, n_eigs, rtol);

  std::vector<std::pair<double, std::size_t>> merged;
  for (std::size_t k = 0; k < depth; ++k) {
    const long mult = k == 0 ? 1 : static_cast<long>(std::pow(b, k - 1)) * (b - 1);
    out.multiplicity.push_back(mult);
    const PiecewiseConstant g = PiecewiseConstant::branching(tree, k, L);
    const Grid grid = Grid::aligned(static_cast<double>(k), L, h, g.breaks);
    const HalflinePencil hp = assemble_halfline(
        grid, g, HardyWeight::constant(1.0), k == 0 ? Boundary::neumann : Boundary::dirichlet);
    out.sum_dofs += mult * static_cast<long>(hp.pencil.size());
    const int want = std::min<long>(n_eigs, hp.pencil.size());
    for (double v : lowest_eigenvalues(hp.pencil, want, rtol)) {
      for (long m = 0; m < mult; ++m) merged.emplace_back(v, k);
    }
  }
  std::sort(merged.begin(), merged.end());
  merged.resize(std::min<std::size_t>(merged.size(), n_eigs));
  for (const auto& [v, k] : merged) {
    out.orthogonal_sum.push_back(v);
    out.source.push_back(k);
  }
  const std::size_t n = std::min(out.tree.size(), out.orthogonal_sum.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.max_relative_difference =
        std::max(out.max_relative_difference,
                 std::abs(out.tree[i] - out.orthogonal_sum[i]) / std::abs(out.tree[i]));
  }
  if (out.tree.size() != out.orthogonal_sum.size()) out.max_relative_difference = kInf;
  return out;
}

double LoopLayout::theta(int i) const { return kTwoPi * static_cast<double>(i) / n_circle; }

LoopPencil assemble_loop(const FluxSpec& a, double T, double h_circle, double h_line) {
  if (!(T > 1.0)) throw DomainError("loop truncation needs T > 1");
  if (!(h_circle > 0.0) || !(h_line > 0.0)) throw DomainError("mesh steps must be positive");
  LoopPencil out;
  LoopLayout& L = out.layout;
  L.n_circle = 2 * std::max(2, static_cast<int>(std::ceil(std::numbers::pi / h_circle - 1e-9)));
  L.n_line = std::max(1, static_cast<int>(std::ceil((T - 1.0) / h_line - 1e-9)));
  L.h_circle = kTwoPi / L.n_circle;
  L.h_line = (T - 1.0) / L.n_line;
  L.T = T;

  using C = std::complex<double>;
  Triplets<C> tr;
  const double hc = L.h_circle;
  for (int i = 0; i < L.n_circle; ++i) {
    const long p = L.circle(i);
    const long q = L.circle(i + 1);
    const double t0 = L.theta(i);
    const double t1 = i + 1 == L.n_circle ? kTwoPi : L.theta(i + 1);
    // u = e^{i∫a} × linear: |u_q - e^{iφ} u_p|²/h and the mass of the linear part
    const C link = std::polar(1.0, -a.cell_integral(t0, t1));
    tr.add(p, p, 1.0 / hc, hc / 3.0);
    tr.add(q, q, 1.0 / hc, hc / 3.0);
    tr.add(p, q, -link / hc, link * (hc / 6.0));
    tr.add(q, p, -std::conj(link) / hc, std::conj(link) * (hc / 6.0));
  }
  // half-line: P1 with ψ = r^-2, 4-point Gauss per cell
  using G = boost::math::quadrature::gauss<double, 4>;
  const double hl = L.h_line;
  for (int k = 0; k < L.n_line; ++k) {
    const double r0 = L.radius(k);
    const double r1 = k + 1 == L.n_line ? T : L.radius(k + 1);
    const long p = L.line(k);
    const long q = k + 1 == L.n_line ? -1 : L.line(k + 1);
    const double m00 = G::integrate([&](double r) { return std::pow((r1 - r) / hl, 2) / (r * r); }, r0, r1);
    const double m01 = G::integrate([&](double r) { return (r1 - r) * (r - r0) / (hl * hl * r * r); }, r0, r1);
    const double m11 = G::integrate([&](double r) { return std::pow((r - r0) / hl, 2) / (r * r); }, r0, r1);
    tr.add(p, p, 1.0 / hl, m00);
    tr.add(q, q, 1.0 / hl, m11);
    tr.add(p, q, -1.0 / hl, m01);
    tr.add(q, p, -1.0 / hl, m01);
  }
  out.pencil = tr.build(L.size());
  return out;
}

double loop_form(const LoopPencil& p, const Eigen::VectorXcd& u) {
  return std::real(u.dot(p.pencil.K * u));
}

double loop_mass(const LoopPencil& p, const Eigen::VectorXcd& u) {
  return std::real(u.dot(p.pencil.M * u));
}

double loop_hardy_estimate(double alpha, double T, double h_circle, double h_line, double rtol) {
  const LoopPencil p = assemble_loop(FluxSpec::constant(alpha), T, h_circle, h_line);
  return smallest_eigenpair(p.pencil, rtol, 0.5 * lambda_star(alpha)).value;
}

GaugeReport gauge_invariance_check(const FluxSpec& a, double T, double h_circle, double h_line,
                                   int n_eigs, double rtol) {
  GaugeReport out;
  const double alpha = a.alpha();
  auto spectrum = [&](const FluxSpec& f) {
    return lowest_eigenvalues(assemble_loop(f, T, h_circle, h_line).pencil, n_eigs, rtol);
  };
  out.reference = spectrum(FluxSpec::constant(alpha));
  out.potential = spectrum(a);
  out.shifted = spectrum(FluxSpec::constant(alpha + 1.0));
  out.conjugate = spectrum(FluxSpec::constant(-alpha));
  for (const auto* other : {&out.potential, &out.shifted, &out.conjugate}) {
    for (int i = 0; i < n_eigs; ++i) {
      out.max_relative_difference =
          std::max(out.max_relative_difference,
                   std::abs((*other)[i] - out.reference[i]) / std::abs(out.reference[i]));
    }
  }
  return out;
}

AntisymmetricBound antisymmetric_bound_check(const LoopPencil& p, const Eigen::VectorXcd& ua,
                                             double tol) {
  const LoopLayout& L = p.layout;
  if (ua.size() != L.size()) throw DomainError("loop vector does not match the layout");
  const double scale = ua.cwiseAbs().maxCoeff();
  bool on_circle = std::abs(ua[0]) <= 1e-12 * scale;
  for (int k = 1; k < L.n_line; ++k) on_circle = on_circle && std::abs(ua[L.line(k)]) <= 1e-12 * scale;
  if (!on_circle) throw DomainError("antisymmetric part must vanish at the vertex and on the line");
  AntisymmetricBound out;
  if (!(scale > 0.0)) {
    out.ratio = kInf;
    out.holds = true;
    return out;
  }
  out.ratio = loop_form(p, ua) / loop_mass(p, ua);
  out.holds = out.ratio >= 0.25 - tol && out.ratio >= lambda_star(0.5) - tol;
  return out;
}

}  // namespace hardy
