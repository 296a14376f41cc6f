#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace hardy {

/// Generalized Hermitian pencil K x = λ M x with K positive semidefinite and
/// M positive semidefinite.  K and M share one sparsity pattern.
template <class Scalar>
struct Pencil {
  using Matrix = Eigen::SparseMatrix<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Matrix K;
  Matrix M;
  Eigen::Index size() const { return K.rows(); }
};

using RealPencil = Pencil<double>;
using ComplexPencil = Pencil<std::complex<double>>;

/// Number of eigenvalues below σ, from the inertia of K - σM (sparse LDLᵀ).
template <class Scalar>
long inertia_count(const Pencil<Scalar>& p, double sigma);

/// The n lowest eigenvalues (with multiplicity) by bisection on inertia
/// counts, each to relative width rtol.  `lower` must be a lower bound for
/// the spectrum.
template <class Scalar>
std::vector<double> lowest_eigenvalues(const Pencil<Scalar>& p, int n, double rtol = 1e-10,
                                       double lower = 0.0);

template <class Scalar>
struct EigenPair {
  double value = 0.0;
  typename Pencil<Scalar>::Vector vector;  // M-normalized
  int iterations = 0;
};

/// Smallest eigenpair: a coarse inertia bracket supplies a shift just below
/// λ_min, then shifted inverse iteration converges the Rayleigh quotient to
/// relative accuracy rtol.
template <class Scalar>
EigenPair<Scalar> smallest_eigenpair(const Pencil<Scalar>& p, double rtol = 1e-10,
                                     double lower = 0.0, std::uint64_t seed = 1);

template <class Scalar>
double rayleigh_quotient(const Pencil<Scalar>& p, const typename Pencil<Scalar>::Vector& x);

/// Real symmetric tridiagonal pencil (diagonals and first superdiagonals).
struct Tridiagonal {
  std::vector<double> k_diag, k_off, m_diag, m_off;
  std::size_t size() const { return k_diag.size(); }
};

/// Throws AssemblyError if the pencil has entries outside the tridiagonal band.
Tridiagonal to_tridiagonal(const RealPencil& p);

/// Sturm count: number of eigenvalues below σ from the LDLᵀ recurrence of
/// the tridiagonal K - σM.
long sturm_count(const Tridiagonal& t, double sigma);

/// The n lowest eigenvalues of a tridiagonal pencil by Sturm bisection.
std::vector<double> sturm_eigenvalues(const Tridiagonal& t, int n, double rtol = 1e-10,
                                      double lower = 0.0);

}  // namespace hardy
