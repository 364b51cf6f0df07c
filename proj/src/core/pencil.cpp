#include "dsmon/core/pencil.hpp"

#include "dsmon/core/descriptor_system.hpp"
#include "dsmon/core/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

namespace dsmon {

PencilDecomposition decompose_pencil(const Matrix& e, const Matrix& a,
                                     const NumericPolicy& policy) {
  const Index n = a.rows();
  if (a.cols() != n || e.rows() != n || e.cols() != n) {
    throw DimensionError("decompose_pencil: E and A must be square and equal in size");
  }
  PencilDecomposition pd;
  if (n == 0) {
    pd.left = pd.right = pd.e_t = pd.a_t = Matrix(0, 0);
    return pd;
  }
  Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Index r = 0;
  if (s(0) > 0.0) {
    const double tol = policy.rank_threshold(s(0), n, n);
    while (r < n && s(r) > tol) ++r;
  }
  pd.left = svd.matrixU();
  pd.right = svd.matrixV();
  pd.e_t = Matrix::Zero(n, n);
  for (Index i = 0; i < r; ++i) pd.e_t(i, i) = s(i);
  pd.a_t = pd.left.transpose() * a * pd.right;
  pd.slow_dim = r;
  pd.regular = check_regular(e, a, policy).regular;
  if (r == n) {
    pd.index = 0;
  } else {
    const Matrix a22 = pd.a_t.bottomRightCorner(n - r, n - r);
    pd.index = linalg::rank(a22, policy) == n - r ? 1 : 2;
  }
  return pd;
}

IndexOneRealization realize_index_one(const PencilDecomposition& pd) {
  if (!pd.regular) throw UnsupportedIndexError("pencil is singular");
  if (pd.index > 1) throw UnsupportedIndexError("pencil index exceeds one");
  const Index n = pd.n();
  const Index r = pd.slow_dim;
  const Index k = n - r;
  const Matrix u1t = pd.left.leftCols(r).transpose();
  const Matrix u2t = pd.left.rightCols(k).transpose();
  const Matrix v1 = pd.right.leftCols(r);
  const Matrix v2 = pd.right.rightCols(k);
  const Vector sinv = pd.e_t.diagonal().head(r).cwiseInverse();

  const Matrix a11 = pd.a_t.topLeftCorner(r, r);
  const Matrix a12 = pd.a_t.topRightCorner(r, k);
  const Matrix a21 = pd.a_t.bottomLeftCorner(k, r);
  const Matrix a22 = pd.a_t.bottomRightCorner(k, k);

  IndexOneRealization out;
  out.to_slow = v1.transpose();
  out.constraint = u2t;
  if (k == 0) {
    out.slow = sinv.asDiagonal() * a11;
    out.forcing = sinv.asDiagonal() * u1t;
    out.lift_state = v1;
    out.lift_forcing = Matrix::Zero(n, n);
    return out;
  }
  const Eigen::FullPivLU<Matrix> lu(a22);
  const Matrix a22inv_a21 = lu.solve(a21);
  const Matrix a22inv_u2t = lu.solve(u2t);
  out.slow = sinv.asDiagonal() * (a11 - a12 * a22inv_a21);
  out.forcing = sinv.asDiagonal() * (u1t - a12 * a22inv_u2t);
  out.lift_state = v1 - v2 * a22inv_a21;
  out.lift_forcing = -v2 * a22inv_u2t;
  return out;
}

std::vector<Complex> pencil_eigenvalues(const Matrix& e, const Matrix& a,
                                        const NumericPolicy& policy) {
  const PencilDecomposition pd = decompose_pencil(e, a, policy);
  if (!pd.regular) throw UnsupportedIndexError("pencil is singular");
  if (pd.index <= 1) {
    const IndexOneRealization real = realize_index_one(pd);
    std::vector<Complex> out;
    if (real.slow.size() == 0) return out;
    Eigen::EigenSolver<Matrix> es(real.slow, false);
    for (Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    return out;
  }
  return finite_generalized_eigenvalues(a, e, policy);
}

double spectral_abscissa(const Matrix& e, const Matrix& a, const NumericPolicy& policy) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : pencil_eigenvalues(e, a, policy)) best = std::max(best, z.real());
  return best;
}

bool is_hurwitz(const Matrix& e, const Matrix& a, const NumericPolicy& policy) {
  const PencilDecomposition pd = decompose_pencil(e, a, policy);
  if (!pd.regular || pd.index > 1) return false;
  const IndexOneRealization real = realize_index_one(pd);
  if (real.slow.size() == 0) return true;
  Eigen::EigenSolver<Matrix> es(real.slow, false);
  return es.eigenvalues().real().maxCoeff() < -policy.hurwitz_margin;
}

}  // namespace dsmon
