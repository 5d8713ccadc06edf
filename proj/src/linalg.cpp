#include "cifuse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cifuse {

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square");
  }
  if (a.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must have dim >= 1");
  }
  m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim));
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal()));
}

double SymMatrix::scale() const {
  return std::max(1.0, eigensystem(*this).max_abs());
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "sum of unequal dims");
  return SymMatrix(a.m_ + b.m_);
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "difference of unequal dims");
  return SymMatrix(a.m_ - b.m_);
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

double Spectrum::max_abs() const {
  return std::max(std::abs(min()), std::abs(max()));
}

Spectrum eigensystem(const SymMatrix& a) {
  // Householder tridiagonalization followed by implicit symmetric QR.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InternalInconsistency, "symmetric eigensolver did not converge");
  }
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

Vector eigenvalues(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InternalInconsistency, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

PsdMatrix psd_certify(const SymMatrix& a, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "psd tolerance must be positive");
  const Vector ev = eigenvalues(a);
  const double min_eig = ev(0);
  const double scale = std::max({1.0, std::abs(ev(0)), std::abs(ev(ev.size() - 1))});
  if (!(min_eig >= -tol * scale)) throw NotPsdError(min_eig);
  return PsdMatrix(a, min_eig, min_eig > tol * scale);
}

PsdMatrix pd_certify(const SymMatrix& a, double tol) {
  PsdMatrix p = [&] {
    try {
      return psd_certify(a, tol);
    } catch (const NotPsdError& e) {
      throw Error(ErrorCode::NotPd, e.what());
    }
  }();
  if (!p.strict()) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix is singular to tolerance (min eigenvalue " << p.min_eig() << ")";
    throw Error(ErrorCode::NotPd, os.str());
  }
  return p;
}

const char* to_string(LoewnerRelation r) {
  switch (r) {
    case LoewnerRelation::StrictlyGreater: return "StrictlyGreater";
    case LoewnerRelation::GreaterEqual: return "GreaterEqual";
    case LoewnerRelation::Equal: return "Equal";
    case LoewnerRelation::LessEqual: return "LessEqual";
    case LoewnerRelation::StrictlyLess: return "StrictlyLess";
    case LoewnerRelation::Incomparable: return "Incomparable";
  }
  return "Unknown";
}

LoewnerRelation loewner_compare(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "loewner_compare on unequal dims");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const double scale = std::max({1.0, eigensystem(a).max_abs(), eigensystem(b).max_abs()});
  const Vector ev = eigenvalues(a - b);
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  const double eps = tol * scale;
  // Equal is a spectral-norm test so that it implies both >= and <=.
  if (std::max(std::abs(lo), std::abs(hi)) <= eps) return LoewnerRelation::Equal;
  if (lo > eps) return LoewnerRelation::StrictlyGreater;
  if (lo >= -eps) return LoewnerRelation::GreaterEqual;
  if (hi < -eps) return LoewnerRelation::StrictlyLess;
  if (hi <= eps) return LoewnerRelation::LessEqual;
  return LoewnerRelation::Incomparable;
}

bool loewner_geq(const SymMatrix& a, const SymMatrix& b, double tol) {
  switch (loewner_compare(a, b, tol)) {
    case LoewnerRelation::StrictlyGreater:
    case LoewnerRelation::GreaterEqual:
    case LoewnerRelation::Equal:
      return true;
    default:
      return false;
  }
}

SymMatrix sqrt_psd(const PsdMatrix& a) {
  const Spectrum s = eigensystem(a.base());
  const Vector root = s.values.cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(s.vectors * root.asDiagonal() * s.vectors.transpose());
}

SymMatrix inv_sqrt_pd(const PsdMatrix& a) {
  const Spectrum s = eigensystem(a.base());
  if (!(s.min() > 0.0)) throw Error(ErrorCode::NotPd, "inverse square root of a singular matrix");
  const Vector root = s.values.cwiseSqrt().cwiseInverse();
  return SymMatrix(s.vectors * root.asDiagonal() * s.vectors.transpose());
}

SymMatrix inverse_pd(const SymMatrix& a) {
  Eigen::LLT<Matrix> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPd, "Cholesky factorization failed: matrix is not positive definite");
  }
  return SymMatrix(llt.solve(Matrix::Identity(a.dim(), a.dim())));
}

SymMatrix pseudo_inverse(const SymMatrix& a, double rel_tol) {
  const Spectrum s = eigensystem(a);
  const double cutoff = rel_tol * s.max_abs();
  Vector inv(s.values.size());
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    inv(i) = std::abs(s.values(i)) > cutoff ? 1.0 / s.values(i) : 0.0;
  }
  return SymMatrix(s.vectors * inv.asDiagonal() * s.vectors.transpose());
}

namespace {

Matrix minor_of(const Matrix& a, Eigen::Index row, Eigen::Index col) {
  const Eigen::Index n = a.rows();
  Matrix m(n - 1, n - 1);
  for (Eigen::Index i = 0, mi = 0; i < n; ++i) {
    if (i == row) continue;
    for (Eigen::Index j = 0, mj = 0; j < n; ++j) {
      if (j == col) continue;
      m(mi, mj++) = a(i, j);
    }
    ++mi;
  }
  return m;
}

double laplace_det(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  double det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    det += sign * a(0, j) * laplace_det(minor_of(a, 0, j));
  }
  return det;
}

}  // namespace

double determinant(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  if (a.rows() <= 4) return laplace_det(a);
  return a.partialPivLu().determinant();
}

SymMatrix adjugate(const SymMatrix& a) {
  const Eigen::Index n = a.dim();
  if (n == 1) return SymMatrix(Matrix::Ones(1, 1));
  if (n <= 4) {
    Matrix adj(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        adj(i, j) = sign * laplace_det(minor_of(a.mat(), j, i));
      }
    }
    return SymMatrix(adj);
  }
  // adj(V L V^T) = V adj(L) V^T with adj(L)_ii = prod_{j != i} l_j.
  const Spectrum s = eigensystem(a);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double prod = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) prod *= s.values(j);
    }
    d(i) = prod;
  }
  return SymMatrix(s.vectors * d.asDiagonal() * s.vectors.transpose());
}

Matrix assemble_block(const Matrix& q, const Matrix& s, const Matrix& r) {
  if (s.rows() != q.rows() || s.cols() != r.rows() || q.rows() != q.cols() ||
      r.rows() != r.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "incompatible block dimensions");
  }
  const Eigen::Index nq = q.rows();
  const Eigen::Index nr = r.rows();
  Matrix t(nq + nr, nq + nr);
  t.topLeftCorner(nq, nq) = q;
  t.topRightCorner(nq, nr) = s;
  t.bottomLeftCorner(nr, nq) = s.transpose();
  t.bottomRightCorner(nr, nr) = r;
  return t;
}

BlockPsdReport block_psd_report(const SymMatrix& q, const Matrix& s, const SymMatrix& r,
                                double tol) {
  const SymMatrix t(assemble_block(q.mat(), s, r.mat()));
  const Spectrum ts = eigensystem(t);
  const double scale = std::max(1.0, ts.max_abs());
  const double direct = ts.min() / scale;

  // [Q S; S^T R] >= 0  <=>  R >= 0, Q - S R^+ S^T >= 0, S (I - R R^+) = 0.
  const SymMatrix r_pinv = pseudo_inverse(r);
  const Eigen::Index nr = r.dim();
  const Matrix leak = s * (Matrix::Identity(nr, nr) - r.mat() * r_pinv.mat());
  const double r_min = eigenvalues(r)(0) / scale;
  const double schur_min = eigenvalues(SymMatrix(q.mat() - s * r_pinv.mat() * s.transpose()))(0) / scale;
  const double leak_norm = leak.size() == 0 ? 0.0 : sigma_max(leak) / scale;
  const double schur = std::min({r_min, schur_min, -leak_norm});

  const bool direct_psd = direct >= -tol;
  const bool schur_psd = schur >= -tol;
  if (direct_psd != schur_psd) {
    const double dissent = direct_psd ? schur : direct;
    if (dissent < -10.0 * tol) {
      std::ostringstream os;
      os.precision(17);
      os << "block PSD criteria disagree: spectral margin " << direct
         << ", Schur-complement margin " << schur;
      throw Error(ErrorCode::InternalInconsistency, os.str());
    }
  }
  return BlockPsdReport{direct_psd, direct, schur};
}

bool block_psd_check(const SymMatrix& q, const Matrix& s, const SymMatrix& r, double tol) {
  return block_psd_report(q, s, r, tol).psd;
}

Matrix cross_factor(const SymMatrix& p1, const Matrix& p12, const SymMatrix& p2) {
  if (p12.rows() != p1.dim() || p12.cols() != p2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "cross-covariance has wrong shape");
  }
  const SymMatrix a = inv_sqrt_pd(pd_certify(p1));
  const SymMatrix b = inv_sqrt_pd(pd_certify(p2));
  return a.mat() * p12 * b.mat();
}

Matrix cross_from_factor(const SymMatrix& p1, const Matrix& x, const SymMatrix& p2) {
  if (x.rows() != p1.dim() || x.cols() != p2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "factor has wrong shape");
  }
  return sqrt_psd(psd_certify(p1)).mat() * x * sqrt_psd(psd_certify(p2)).mat();
}

double sigma_max(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

Eigen::Index numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  const double cutoff = rel_tol * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace cifuse
