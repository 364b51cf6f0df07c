#include "dsmon/core/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dsmon {

double NumericPolicy::rank_threshold(double sigma_max, Index rows, Index cols) const {
  const double rel = rank_rtol > 0.0
                         ? rank_rtol
                         : static_cast<double>(std::max(rows, cols)) *
                               std::numeric_limits<double>::epsilon();
  return rel * sigma_max;
}

namespace linalg {
namespace {

Index rank_from_singular_values(const Vector& s, Index rows, Index cols,
                                const NumericPolicy& policy, double scale = 0.0) {
  if (s.size() == 0) return 0;
  const double smax = s(0);
  if (smax == 0.0) return 0;
  const double tol = policy.rank_threshold(std::max(smax, scale), rows, cols);
  Index r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  return r;
}

}  // namespace

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

Index rank(const Matrix& m, const NumericPolicy& policy) {
  return rank_from_singular_values(singular_values(m), m.rows(), m.cols(), policy);
}

Matrix orth(const Matrix& m, const NumericPolicy& policy, double scale) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Index r =
      rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), policy, scale);
  return svd.matrixU().leftCols(r);
}

Matrix null_space(const Matrix& m, const NumericPolicy& policy, double scale) {
  const Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Index r =
      rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), policy, scale);
  return svd.matrixV().rightCols(n - r);
}

Matrix left_null_space(const Matrix& m, const NumericPolicy& policy) {
  return null_space(m.transpose(), policy);
}

Matrix complement(const Matrix& basis, Index ambient) {
  if (basis.cols() == 0) return Matrix::Identity(ambient, ambient);
  if (basis.cols() >= ambient) return Matrix(ambient, 0);
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(ambient - basis.cols());
}

Matrix pinv(const Matrix& m, const NumericPolicy& policy) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const Index r = rank_from_singular_values(s, m.rows(), m.cols(), policy);
  Matrix result = Matrix::Zero(m.cols(), m.rows());
  for (Index i = 0; i < r; ++i) {
    result += svd.matrixV().col(i) * (1.0 / s(i)) * svd.matrixU().col(i).transpose();
  }
  return result;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double sigma_ratio(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  // A tall or wide matrix is judged by its smallest of min(rows, cols) values.
  return s(s.size() - 1) / s(0);
}

Index complex_rank(const CMatrix& m, const NumericPolicy& policy) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), policy);
}

Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  const Index r = a.rows();
  const Index s = b.rows();
  if (a.cols() != r || b.cols() != s || c.rows() != r || c.cols() != s) {
    throw DimensionError("solve_sylvester: incompatible dimensions");
  }
  // vec(A X + X B) = (I_s kron A + B^T kron I_r) vec(X)
  Matrix k = Matrix::Zero(r * s, r * s);
  for (Index j = 0; j < s; ++j) {
    k.block(j * r, j * r, r, r) += a;
    for (Index i = 0; i < s; ++i) {
      k.block(j * r, i * r, r, r) += b(i, j) * Matrix::Identity(r, r);
    }
  }
  Eigen::Map<const Vector> rhs(c.data(), r * s);
  Vector x = k.fullPivLu().solve(rhs);
  return Eigen::Map<Matrix>(x.data(), r, s);
}

Matrix psd_sqrt(const Matrix& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  Vector d = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

bool is_psd(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(m - m.transpose()) > tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  return eig.eigenvalues().minCoeff() >= -tol * scale;
}

Matrix select_columns(const Matrix& m, std::span<const Index> cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
  return out;
}

Matrix select_rows(const Matrix& m, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

Matrix select_block(const Matrix& m, std::span<const Index> rows, std::span<const Index> cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return out;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("hstack: row mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("vstack: column mismatch");
  Matrix out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

}  // namespace linalg
}  // namespace dsmon
