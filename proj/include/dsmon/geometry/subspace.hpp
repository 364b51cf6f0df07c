#pragma once

#include "dsmon/core/common.hpp"

#include <vector>

namespace dsmon {

/// A linear subspace of R^n stored through an orthonormal basis (n x d).
class Subspace {
 public:
  /// The zero subspace of R^ambient.
  explicit Subspace(Index ambient = 0);

  /// Span of the columns of an arbitrary spanning matrix.
  static Subspace span(const Matrix& spanning, const NumericPolicy& policy = {},
                       double scale = 0.0);
  /// Wraps a basis already known to be orthonormal (checked to 1e-10).
  static Subspace from_orthonormal(Matrix basis);
  static Subspace whole(Index ambient);

  const Matrix& basis() const { return basis_; }
  Index dim() const { return basis_.cols(); }
  Index ambient_dim() const { return ambient_; }
  bool is_zero() const { return dim() == 0; }
  bool is_whole() const { return dim() == ambient_; }

  Matrix projector() const;
  /// I - S S^T
  Matrix residual_projector() const;
  /// Distance of v to the subspace.
  double distance(const Vector& v) const;

 private:
  Matrix basis_;
  Index ambient_ = 0;
};

Subspace image(const Matrix& m, const NumericPolicy& policy = {});
Subspace kernel(const Matrix& m, const NumericPolicy& policy = {});
Subspace sum(const Subspace& a, const Subspace& b, const NumericPolicy& policy = {});
Subspace intersect(const Subspace& a, const Subspace& b, const NumericPolicy& policy = {});
/// {v : M v in S}
Subspace preimage(const Matrix& m, const Subspace& s, const NumericPolicy& policy = {});
/// M S
Subspace map(const Matrix& m, const Subspace& s, const NumericPolicy& policy = {});
Subspace orth_complement(const Subspace& s);
/// S1 x S2 in R^(n1 + n2).
Subspace product(const Subspace& a, const Subspace& b);

/// Principal angles in ascending order (min(dim a, dim b) values).
std::vector<double> principal_angles(const Subspace& a, const Subspace& b);
/// Largest principal angle; pi/2 when dimensions differ.
double largest_principal_angle(const Subspace& a, const Subspace& b);
bool approx_equal(const Subspace& a, const Subspace& b, double angle_tol);
/// || (I - P_outer) * inner basis ||_2; zero iff inner is contained in outer.
double containment_gap(const Subspace& inner, const Subspace& outer);

}  // namespace dsmon
