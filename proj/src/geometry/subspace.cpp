#include "dsmon/geometry/subspace.hpp"

#include "dsmon/core/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dsmon {

Subspace::Subspace(Index ambient) : basis_(ambient, 0), ambient_(ambient) {}

Subspace Subspace::span(const Matrix& spanning, const NumericPolicy& policy, double scale) {
  Subspace s(spanning.rows());
  s.basis_ = linalg::orth(spanning, policy, scale);
  return s;
}

Subspace Subspace::from_orthonormal(Matrix basis) {
  const Index d = basis.cols();
  if (d > basis.rows()) throw DimensionError("basis has more columns than rows");
  if (d > 0 && linalg::max_abs(basis.transpose() * basis - Matrix::Identity(d, d)) > 1e-10) {
    throw DimensionError("basis is not orthonormal");
  }
  Subspace s(basis.rows());
  s.basis_ = std::move(basis);
  return s;
}

Subspace Subspace::whole(Index ambient) {
  Subspace s(ambient);
  s.basis_ = Matrix::Identity(ambient, ambient);
  return s;
}

Matrix Subspace::projector() const { return basis_ * basis_.transpose(); }

Matrix Subspace::residual_projector() const {
  return Matrix::Identity(ambient_, ambient_) - projector();
}

double Subspace::distance(const Vector& v) const {
  if (v.size() != ambient_) throw DimensionError("vector does not live in the ambient space");
  return (v - basis_ * (basis_.transpose() * v)).norm();
}

Subspace image(const Matrix& m, const NumericPolicy& policy) { return Subspace::span(m, policy); }

Subspace kernel(const Matrix& m, const NumericPolicy& policy) {
  Subspace s(m.cols());
  if (m.cols() == 0) return s;
  return Subspace::from_orthonormal(linalg::null_space(m, policy));
}

Subspace sum(const Subspace& a, const Subspace& b, const NumericPolicy& policy) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("sum: ambient dimensions differ");
  return Subspace::span(linalg::hstack(a.basis(), b.basis()), policy);
}

Subspace orth_complement(const Subspace& s) {
  return Subspace::from_orthonormal(linalg::complement(s.basis(), s.ambient_dim()));
}

Subspace intersect(const Subspace& a, const Subspace& b, const NumericPolicy& policy) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw DimensionError("intersect: ambient dimensions differ");
  }
  return orth_complement(sum(orth_complement(a), orth_complement(b), policy));
}

Subspace preimage(const Matrix& m, const Subspace& s, const NumericPolicy& policy) {
  if (m.rows() != s.ambient_dim()) throw DimensionError("preimage: map does not land in S");
  if (s.is_whole()) return Subspace::whole(m.cols());
  // Ker((I - S S^T) M) via the rows of the complement basis
  const Matrix c = linalg::complement(s.basis(), s.ambient_dim());
  if (m.cols() == 0) return Subspace(0);
  return Subspace::from_orthonormal(linalg::null_space(c.transpose() * m, policy, m.norm()));
}

Subspace map(const Matrix& m, const Subspace& s, const NumericPolicy& policy) {
  if (m.cols() != s.ambient_dim()) throw DimensionError("map: dimension mismatch");
  return Subspace::span(m * s.basis(), policy, m.norm());
}

Subspace product(const Subspace& a, const Subspace& b) {
  Matrix basis = Matrix::Zero(a.ambient_dim() + b.ambient_dim(), a.dim() + b.dim());
  basis.topLeftCorner(a.ambient_dim(), a.dim()) = a.basis();
  basis.bottomRightCorner(b.ambient_dim(), b.dim()) = b.basis();
  return Subspace::from_orthonormal(std::move(basis));
}

std::vector<double> principal_angles(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("principal angles: ambient mismatch");
  std::vector<double> out;
  if (a.dim() == 0 || b.dim() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(a.basis().transpose() * b.basis());
  const Vector& s = svd.singularValues();
  for (Index i = 0; i < s.size(); ++i) out.push_back(std::acos(std::clamp(s(i), -1.0, 1.0)));
  // acos loses accuracy for tiny angles; refine with the sine formulation
  const Subspace& small = a.dim() <= b.dim() ? a : b;
  const Subspace& large = a.dim() <= b.dim() ? b : a;
  const Matrix r = small.basis() - large.basis() * (large.basis().transpose() * small.basis());
  Eigen::JacobiSVD<Matrix> svd2(r);
  const Vector& sn = svd2.singularValues();
  std::vector<double> sines;
  for (Index i = 0; i < sn.size(); ++i) sines.push_back(std::asin(std::clamp(sn(i), 0.0, 1.0)));
  std::sort(sines.begin(), sines.end());
  std::sort(out.begin(), out.end());
  for (std::size_t i = 0; i < out.size() && i < sines.size(); ++i) {
    if (out[i] < 0.1) out[i] = sines[i];
  }
  return out;
}

double largest_principal_angle(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("principal angles: ambient mismatch");
  if (a.dim() != b.dim()) return std::numbers::pi / 2.0;
  if (a.dim() == 0) return 0.0;
  const double gap = containment_gap(a, b);
  return std::asin(std::clamp(gap, 0.0, 1.0));
}

bool approx_equal(const Subspace& a, const Subspace& b, double angle_tol) {
  return a.ambient_dim() == b.ambient_dim() && a.dim() == b.dim() &&
         largest_principal_angle(a, b) <= angle_tol;
}

double containment_gap(const Subspace& inner, const Subspace& outer) {
  if (inner.ambient_dim() != outer.ambient_dim()) throw DimensionError("containment: ambient mismatch");
  if (inner.dim() == 0) return 0.0;
  const Matrix r = inner.basis() - outer.basis() * (outer.basis().transpose() * inner.basis());
  Eigen::JacobiSVD<Matrix> svd(r);
  return svd.singularValues()(0);
}

}  // namespace dsmon
