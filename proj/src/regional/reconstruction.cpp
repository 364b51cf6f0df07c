#include "dsmon/regional/reconstruction.hpp"

#include "dsmon/core/linalg.hpp"
#include "dsmon/geometry/invariant_subspaces.hpp"

#include <string>

namespace dsmon {

void PartitionedModel::validate() const {
  const Index a = n1(), b = n2(), m = inputs(), p = outputs();
  const bool ok = A11.cols() == a && A12.rows() == a && A12.cols() == b && A21.rows() == b &&
                  A21.cols() == a && A22.rows() == b && B1.rows() == a && B2.rows() == b &&
                  B2.cols() == m && C1.cols() == a && C2.rows() == p && C2.cols() == b &&
                  D.rows() == p && D.cols() == m;
  if (!ok) throw DimensionError("partitioned model blocks have inconsistent sizes");
}

namespace {

Matrix pinv_with_scale(const Matrix& m, const NumericPolicy& policy, double scale) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = policy.rank_threshold(std::max(s(0), scale), m.rows(), m.cols());
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixV().leftCols(r) * s.head(r).cwiseInverse().asDiagonal() *
         svd.matrixU().leftCols(r).transpose();
}

}  // namespace

Reconstruction reconstruct_states(const PartitionedModel& model, const Trajectory& y,
                                  const SmoothingDifferentiator& sg, const NumericPolicy& policy) {
  model.validate();
  y.validate();
  if (y.dim() != model.outputs()) throw DimensionError("measurement dimension mismatch");
  const Index n1 = model.n1(), n2 = model.n2(), m = model.inputs(), p = model.outputs();
  const Index q = n2 + p;      // outputs of the associated system
  const Index w = n2 + m;      // inputs of the associated system

  // associated nonsingular system: x1' = A11 x1 + [A12 B1] v, [0; y] = [A21; C1] x1 + Dt v
  const Matrix bt = linalg::hstack(model.A12, model.B1);
  const Matrix ct = linalg::vstack(model.A21, model.C1);
  Matrix dt(q, w);
  dt << model.A22, model.B2, model.C2, model.D;

  Reconstruction out;
  out.V1 = output_nulling_subspace(model.A11, bt, ct, dt, policy);

  // smallest k at which the kernel of N^T O_k shrinks to V1
  Matrix obs, toeplitz, map;
  Index k = 0;
  for (;; ++k) {
    if (k > n1) throw GeometryError("reconstruction order did not settle within n1 + 1 steps");
    const Index rows = (k + 1) * q, cols = (k + 1) * w;
    obs.resize(rows, n1);
    toeplitz = Matrix::Zero(rows, cols);
    Matrix power = Matrix::Identity(n1, n1);
    std::vector<Matrix> markov;  // Ct A^j Bt
    for (Index i = 0; i <= k; ++i) {
      obs.middleRows(i * q, q) = ct * power;
      markov.push_back(ct * power * bt);
      power = model.A11 * power;
    }
    for (Index i = 0; i <= k; ++i) {
      toeplitz.block(i * q, i * w, q, w) = dt;
      for (Index j = 0; j < i; ++j) toeplitz.block(i * q, j * w, q, w) = markov[static_cast<std::size_t>(i - j - 1)];
    }
    const Matrix left = linalg::null_space(toeplitz.transpose(), policy, toeplitz.norm());
    map = left.transpose() * obs;
    const Matrix ker = linalg::null_space(map, policy, obs.norm());
    if (ker.cols() <= out.V1.dim()) {
      map = pinv_with_scale(map, policy, obs.norm()) * left.transpose();
      break;
    }
  }
  out.derivative_order = k;

  // stacked [0; y^(j)] for j = 0..k
  const Index steps = y.size();
  std::vector<Matrix> derivs;
  if (k == 0) {
    derivs.push_back(y.samples);
  } else {
    derivs = smooth_derivatives(y.times, y.samples, k, sg);
  }
  Matrix stacked = Matrix::Zero((k + 1) * q, steps);
  for (Index j = 0; j <= k; ++j) stacked.middleRows(j * q + n2, p) = derivs[static_cast<std::size_t>(j)];

  const Matrix x1 = out.V1.residual_projector() * (map * stacked);
  out.x1 = Trajectory("x1_hat", y.times, x1);

  // x2 from the algebraic rows, modulo A22^-1 Im[A21 V1, B2]
  const Matrix blocked = linalg::hstack(model.A21 * out.V1.basis(), model.B2);
  const Subspace blocked_span = Subspace::span(blocked, policy, blocked.norm());
  out.V2 = preimage(model.A22, blocked_span, policy);
  if (n2 > 0) {
    const Matrix wmat = blocked_span.residual_projector();
    const Matrix x2 = -pinv_with_scale(wmat * model.A22, policy, model.A22.norm()) * wmat *
                      model.A21 * x1;
    out.x2 = Trajectory("x2_hat", y.times, out.V2.residual_projector() * x2);
  } else {
    out.x2 = Trajectory("x2_hat", y.times, Matrix(0, steps));
  }
  return out;
}

PartitionedRealization partition_by_svd(const Matrix& e, const Matrix& a, const Matrix& b,
                                        const Matrix& c, const Matrix& d,
                                        const NumericPolicy& policy) {
  const Index n = a.rows();
  if (e.rows() != n || e.cols() != n || a.cols() != n || b.rows() != n || c.cols() != n ||
      d.rows() != c.rows() || d.cols() != b.cols()) {
    throw DimensionError("partition_by_svd: dimension mismatch");
  }
  Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const Index r = linalg::rank(e, policy);
  const Matrix u1 = svd.matrixU().leftCols(r), u2 = svd.matrixU().rightCols(n - r);
  const Matrix v1 = svd.matrixV().leftCols(r), v2 = svd.matrixV().rightCols(n - r);
  const Vector sinv = s.head(r).cwiseInverse();

  PartitionedRealization out;
  out.V = svd.matrixV();
  PartitionedModel& pm = out.model;
  pm.A11 = sinv.asDiagonal() * (u1.transpose() * a * v1);
  pm.A12 = sinv.asDiagonal() * (u1.transpose() * a * v2);
  pm.A21 = u2.transpose() * a * v1;
  pm.A22 = u2.transpose() * a * v2;
  pm.B1 = sinv.asDiagonal() * (u1.transpose() * b);
  pm.B2 = u2.transpose() * b;
  pm.C1 = c * v1;
  pm.C2 = c * v2;
  pm.D = d;
  return out;
}

}  // namespace dsmon
