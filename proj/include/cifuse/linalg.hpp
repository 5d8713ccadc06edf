#pragma once

#include <utility>

#include <Eigen/Dense>

#include "cifuse/error.hpp"

namespace cifuse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultPsdTol = 1e-9;
/// Relative threshold below which eigenvalues count as zero in pseudo-inverses.
inline constexpr double kPinvRelTol = 1e-12;

/// Dense symmetric matrix. Symmetrized as (A + A^T) / 2 on construction.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& mat() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  /// max(1, largest |eigenvalue|)
  double scale() const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);

 private:
  Matrix m_;
};

/// Spectrum of a symmetric matrix, eigenvalues ascending.
struct Spectrum {
  Vector values;
  Matrix vectors;

  double min() const { return values(0); }
  double max() const { return values(values.size() - 1); }
  double max_abs() const;
};

/// The one eigen-solver used by every PSD decision in the library.
Spectrum eigensystem(const SymMatrix& a);
Vector eigenvalues(const SymMatrix& a);

/// A symmetric matrix whose positive semidefiniteness has been certified.
class PsdMatrix {
 public:
  const SymMatrix& base() const noexcept { return base_; }
  const Matrix& mat() const noexcept { return base_.mat(); }
  Eigen::Index dim() const noexcept { return base_.dim(); }
  double min_eig() const noexcept { return min_eig_; }
  /// min_eig > tol * scale at certification time.
  bool strict() const noexcept { return strict_; }

 private:
  friend PsdMatrix psd_certify(const SymMatrix& a, double tol);
  PsdMatrix(SymMatrix base, double min_eig, bool strict)
      : base_(std::move(base)), min_eig_(min_eig), strict_(strict) {}

  SymMatrix base_;
  double min_eig_;
  bool strict_;
};

/// Throws NotPsdError when the smallest eigenvalue is below -tol * scale.
PsdMatrix psd_certify(const SymMatrix& a, double tol = kDefaultPsdTol);

/// Certifies strict positive definiteness or throws Error(NotPd).
PsdMatrix pd_certify(const SymMatrix& a, double tol = kDefaultPsdTol);

enum class LoewnerRelation {
  StrictlyGreater,
  GreaterEqual,
  Equal,
  LessEqual,
  StrictlyLess,
  Incomparable,
};

const char* to_string(LoewnerRelation r);

/// Classifies A - B in the Loewner order. The tolerance is relative to
/// max(1, |A|_2, |B|_2).
LoewnerRelation loewner_compare(const SymMatrix& a, const SymMatrix& b,
                                double tol = kDefaultPsdTol);

/// A >= B (StrictlyGreater, GreaterEqual or Equal).
bool loewner_geq(const SymMatrix& a, const SymMatrix& b,
                 double tol = kDefaultPsdTol);

SymMatrix sqrt_psd(const PsdMatrix& a);
/// A^{-1/2} for a PD matrix.
SymMatrix inv_sqrt_pd(const PsdMatrix& a);
/// Inverse of a PD matrix through Cholesky; throws Error(NotPd) if it fails.
SymMatrix inverse_pd(const SymMatrix& a);
/// Moore-Penrose pseudo-inverse via the eigendecomposition.
SymMatrix pseudo_inverse(const SymMatrix& a, double rel_tol = kPinvRelTol);

/// Classical adjoint. Cofactor expansion up to dim 4, spectral product formula
/// above that; both stay exact at singular arguments.
SymMatrix adjugate(const SymMatrix& a);

/// Determinant by Laplace expansion for dim <= 4, LU above.
double determinant(const Matrix& a);

/// Decides [Q S; S^T R] >= 0 by the assembled spectrum and by the
/// pseudo-inverse Schur-complement criterion; throws InternalInconsistency
/// if the two disagree beyond tolerance.
struct BlockPsdReport {
  bool psd;
  double direct_min_eig;   // relative to the block scale
  double schur_margin;     // relative to the block scale
};
BlockPsdReport block_psd_report(const SymMatrix& q, const Matrix& s,
                                const SymMatrix& r, double tol = 1e-8);
bool block_psd_check(const SymMatrix& q, const Matrix& s, const SymMatrix& r,
                     double tol = 1e-8);

/// X = P1^{-1/2} P12 P2^{-1/2}. Throws Error(NotPd) if P1 or P2 is singular.
Matrix cross_factor(const SymMatrix& p1, const Matrix& p12, const SymMatrix& p2);
/// Inverse map: P12 = P1^{1/2} X P2^{1/2}.
Matrix cross_from_factor(const SymMatrix& p1, const Matrix& x,
                         const SymMatrix& p2);

Matrix assemble_block(const Matrix& q, const Matrix& s, const Matrix& r);

double sigma_max(const Matrix& a);

/// Numerical rank with threshold rel_tol * sigma_max.
Eigen::Index numerical_rank(const Matrix& a, double rel_tol = 1e-10);

}  // namespace cifuse
