#include "hardy/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>

#include <Eigen/SparseCholesky>

#include "hardy/certified.hpp"

namespace hardy {

namespace {

/// Inertia counts of K - σM with one symbolic analysis reused across shifts.
template <class Scalar>
class ShiftedFactor {
 public:
  using Matrix = typename Pencil<Scalar>::Matrix;

  explicit ShiftedFactor(const Pencil<Scalar>& p) : p_(p) {
    if (p.K.rows() != p.M.rows() || p.K.cols() != p.M.cols() || p.K.rows() != p.K.cols()) {
      throw AssemblyError("pencil matrices must be square and of equal size");
    }
    shifted_ = p.K - 0.0 * p.M;
    ldlt_.analyzePattern(shifted_);
  }

  /// Factorizes at σ; returns false on a zero pivot.
  bool factor(double sigma) {
    shifted_ = p_.K - Scalar(sigma) * p_.M;
    ldlt_.factorize(shifted_);
    if (ldlt_.info() != Eigen::Success) return false;
    const auto& d = ldlt_.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (std::real(d[i]) == 0.0) return false;
    }
    return true;
  }

  long negatives() const {
    long n = 0;
    const auto& d = ldlt_.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) n += std::real(d[i]) < 0.0;
    return n;
  }

  long count(double sigma) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      if (factor(sigma)) return negatives();
      sigma += (std::abs(sigma) + 1e-300) * 1e-13 * (attempt + 1);
    }
    throw ConvergenceError("shifted pencil stayed singular under perturbation");
  }

  typename Pencil<Scalar>::Vector solve(const typename Pencil<Scalar>::Vector& b) const {
    return ldlt_.solve(b);
  }

 private:
  const Pencil<Scalar>& p_;
  Matrix shifted_;
  Eigen::SimplicialLDLT<Matrix, Eigen::Lower> ldlt_;
};

/// Bisection on a monotone counting function.  Returns the n lowest
/// eigenvalues given count(lower) == 0.
std::vector<double> bisect_lowest(const std::function<long(double)>& count, int n, double rtol,
                                  double lower) {
  if (n <= 0) return {};
  std::map<double, long> samples;
  auto sample = [&](double s) {
    auto it = samples.find(s);
    if (it != samples.end()) return it->second;
    const long c = count(s);
    samples.emplace(s, c);
    return c;
  };

  double lo = lower;
  for (int i = 0; sample(lo) > 0; ++i) {
    if (i > 60) throw ConvergenceError("no lower bound for the spectrum");
    lo = lo - std::max(1.0, std::abs(lo));
  }
  double hi = std::max(1.0, 2.0 * std::abs(lo));
  for (int i = 0; sample(hi) < n; ++i) {
    if (i > 200) throw ConvergenceError("fewer eigenvalues than requested");
    hi *= 2.0;
  }

  std::vector<double> out;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) {
    // tightest bracket from cached samples
    double a = lo;
    double b = hi;
    for (const auto& [s, c] : samples) {
      if (c < k) a = std::max(a, s);
      if (c >= k) b = std::min(b, s);
    }
    while (b - a > rtol * std::max(std::abs(a), std::abs(b)) &&
           b - a > std::numeric_limits<double>::min()) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (sample(mid) < k ? a : b) = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

}  // namespace

template <class Scalar>
long inertia_count(const Pencil<Scalar>& p, double sigma) {
  ShiftedFactor<Scalar> f(p);
  return f.count(sigma);
}

template <class Scalar>
std::vector<double> lowest_eigenvalues(const Pencil<Scalar>& p, int n, double rtol, double lower) {
  if (n > p.size()) throw DomainError("more eigenvalues requested than the pencil has");
  ShiftedFactor<Scalar> f(p);
  return bisect_lowest([&](double s) { return f.count(s); }, n, rtol, lower);
}

template <class Scalar>
double rayleigh_quotient(const Pencil<Scalar>& p, const typename Pencil<Scalar>::Vector& x) {
  const double num = std::real(x.dot(p.K * x));
  const double den = std::real(x.dot(p.M * x));
  return num / den;
}

template <class Scalar>
EigenPair<Scalar> smallest_eigenpair(const Pencil<Scalar>& p, double rtol, double lower,
                                     std::uint64_t seed) {
  using Vector = typename Pencil<Scalar>::Vector;
  ShiftedFactor<Scalar> f(p);
  auto count = [&](double s) { return f.count(s); };

  // coarse bracket [a, b] around λ_min with count(a) = 0
  double a = lower;
  for (int i = 0; count(a) > 0; ++i) {
    if (i > 60) throw ConvergenceError("no lower bound for the spectrum");
    a -= std::max(1.0, std::abs(a));
  }
  double b = std::max(1.0, 2.0 * std::abs(a));
  for (int i = 0; count(b) < 1; ++i) {
    if (i > 200) throw ConvergenceError("pencil has no finite eigenvalue");
    b *= 2.0;
  }
  while (b - a > 1e-3 * std::max(std::abs(a), std::abs(b))) {
    const double mid = 0.5 * (a + b);
    (count(mid) < 1 ? a : b) = mid;
  }
  // the shift sits just below λ_min, so K - σM is positive definite
  const double sigma = a - 1e-3 * (b - a);
  if (!f.factor(sigma) || f.negatives() != 0) {
    throw ConvergenceError("shifted factorization is not positive definite");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector x(p.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = Scalar(unif(rng));

  EigenPair<Scalar> out;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 2000; ++it) {
    Vector y = f.solve(p.M * x);
    const double nrm = std::sqrt(std::real(y.dot(p.M * y)));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ConvergenceError("inverse iteration broke down");
    x = y / nrm;
    const double rq = rayleigh_quotient(p, x);
    if (it >= 3 && std::abs(rq - prev) <= rtol * std::abs(rq)) {
      out.value = rq;
      out.vector = x;
      out.iterations = it;
      return out;
    }
    prev = rq;
  }
  throw ConvergenceError("inverse iteration did not converge");
}

template long inertia_count(const RealPencil&, double);
template long inertia_count(const ComplexPencil&, double);
template std::vector<double> lowest_eigenvalues(const RealPencil&, int, double, double);
template std::vector<double> lowest_eigenvalues(const ComplexPencil&, int, double, double);
template EigenPair<double> smallest_eigenpair(const RealPencil&, double, double, std::uint64_t);
template EigenPair<std::complex<double>> smallest_eigenpair(const ComplexPencil&, double, double,
                                                           std::uint64_t);
template double rayleigh_quotient(const RealPencil&, const RealPencil::Vector&);
template double rayleigh_quotient(const ComplexPencil&, const ComplexPencil::Vector&);

Tridiagonal to_tridiagonal(const RealPencil& p) {
  const Eigen::Index n = p.size();
  Tridiagonal t;
  t.k_diag.assign(n, 0.0);
  t.m_diag.assign(n, 0.0);
  t.k_off.assign(n > 0 ? n - 1 : 0, 0.0);
  t.m_off.assign(n > 0 ? n - 1 : 0, 0.0);
  auto load = [&](const Eigen::SparseMatrix<double>& A, std::vector<double>& d,
                  std::vector<double>& o) {
    for (Eigen::Index c = 0; c < A.outerSize(); ++c) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) {
        const Eigen::Index r = it.row();
        const Eigen::Index col = it.col();
        if (r == col) {
          d[r] = it.value();
        } else if (r + 1 == col) {
          o[r] = it.value();
        } else if (col + 1 != r && it.value() != 0.0) {
          throw AssemblyError("pencil is not tridiagonal");
        }
      }
    }
  };
  load(p.K, t.k_diag, t.k_off);
  load(p.M, t.m_diag, t.m_off);
  return t;
}

long sturm_count(const Tridiagonal& t, double sigma) {
  const std::size_t n = t.size();
  long neg = 0;
  double d = 0.0;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = t.k_diag[i] - sigma * t.m_diag[i];
    if (i == 0) {
      d = a;
    } else {
      const double e = t.k_off[i - 1] - sigma * t.m_off[i - 1];
      d = a - e * e / d;
    }
    if (std::abs(d) < tiny) d = -tiny;
    neg += d < 0.0;
  }
  return neg;
}

std::vector<double> sturm_eigenvalues(const Tridiagonal& t, int n, double rtol, double lower) {
  if (n > static_cast<int>(t.size())) throw DomainError("more eigenvalues requested than size");
  return bisect_lowest([&](double s) { return sturm_count(t, s); }, n, rtol, lower);
}

}  // namespace hardy
