#include "dsmon/geometry/invariant_subspaces.hpp"

#include "dsmon/core/linalg.hpp"

#include <string>

namespace dsmon {

namespace {

// Block [A B] or [C D].
Matrix join(const Matrix& left, const Matrix& right) { return linalg::hstack(left, right); }

// Basis of (E^-1 S) x R^m inside R^(n+m).
Matrix domain_basis(const DescriptorSystem& sys, const Subspace& s, const NumericPolicy& policy) {
  const Subspace pre = preimage(sys.E(), s, policy);
  return product(pre, Subspace::whole(sys.m())).basis();
}

}  // namespace

Subspace conditioned_step(const DescriptorSystem& sys, const Subspace& s,
                          const NumericPolicy& policy) {
  if (s.ambient_dim() != sys.n()) throw DimensionError("conditioned_step: ambient mismatch");
  const Subspace domain = product(preimage(sys.E(), s, policy), Subspace::whole(sys.m()));
  const Subspace nulling = kernel(join(sys.C(), sys.D()), policy);
  return map(join(sys.A(), sys.B()), intersect(domain, nulling, policy), policy);
}

Subspace conditioned_invariant(const DescriptorSystem& sys, const NumericPolicy& policy,
                               std::vector<Index>* dims) {
  Subspace s(sys.n());
  for (Index iter = 0; iter <= sys.n() + 1; ++iter) {
    Subspace next = conditioned_step(sys, s, policy);
    if (dims) dims->push_back(next.dim());
    if (next.dim() == s.dim() && approx_equal(next, s, policy.angle_tol)) return next;
    if (next.dim() < s.dim()) {
      throw GeometryError("conditioned invariant recursion lost dimension (" +
                          std::to_string(s.dim()) + " -> " + std::to_string(next.dim()) + ")");
    }
    s = std::move(next);
  }
  throw GeometryError("conditioned invariant recursion did not settle within n + 1 steps");
}

Matrix output_injection(const DescriptorSystem& sys, const Subspace& s,
                        const NumericPolicy& policy) {
  const Matrix z = domain_basis(sys, s, policy);
  const Matrix x = join(sys.A(), sys.B()) * z;
  const Matrix y = join(sys.C(), sys.D()) * z;
  const Matrix perp = s.residual_projector();
  const Matrix l = -perp * x * linalg::pinv(y, policy);
  const double res = linalg::max_abs(perp * (x + l * y));
  const double scale = std::max(1.0, linalg::max_abs(x));
  if (res > policy.containment_tol * scale) {
    throw InternalError("output injection infeasible: containment residual " + std::to_string(res));
  }
  return l;
}

double injection_residual(const DescriptorSystem& sys, const Subspace& s, const Matrix& l,
                          const NumericPolicy& policy) {
  const Matrix z = domain_basis(sys, s, policy);
  const Matrix closed = join(sys.A() + l * sys.C(), sys.B() + l * sys.D());
  return linalg::max_abs(s.residual_projector() * closed * z);
}

Subspace controlled_invariant(const Matrix& a, const Matrix& bmap, const Matrix& cker,
                              const NumericPolicy& policy) {
  const Index n = a.rows();
  if (a.cols() != n || bmap.rows() != n || cker.cols() != n) {
    throw DimensionError("controlled_invariant: dimension mismatch");
  }
  const Subspace input = image(bmap, policy);
  Subspace v = kernel(cker, policy);
  for (Index iter = 0; iter <= n + 1; ++iter) {
    Subspace next = intersect(v, preimage(a, sum(v, input, policy), policy), policy);
    if (next.dim() == v.dim() && approx_equal(next, v, policy.angle_tol)) return next;
    v = std::move(next);
  }
  throw GeometryError("controlled invariant recursion did not settle within n + 1 steps");
}

Subspace output_nulling_subspace(const Matrix& a, const Matrix& b, const Matrix& c,
                                 const Matrix& d, const NumericPolicy& policy) {
  const Index n = a.rows();
  const Index m = b.cols();
  const Index p = c.rows();
  if (a.cols() != n || b.rows() != n || c.cols() != n || d.rows() != p || d.cols() != m) {
    throw DimensionError("output_nulling_subspace: dimension mismatch");
  }
  Matrix t(n + p, n + m);
  t.topLeftCorner(n, n) = a;
  t.topRightCorner(n, m) = b;
  t.bottomLeftCorner(p, n) = c;
  t.bottomRightCorner(p, m) = d;
  Subspace v = Subspace::whole(n);
  for (Index iter = 0; iter <= n + 1; ++iter) {
    const Subspace target = product(v, Subspace(p));
    const Subspace pre = preimage(t, target, policy);
    Subspace next = Subspace::span(pre.basis().topRows(n), policy);
    if (next.dim() == v.dim() && approx_equal(next, v, policy.angle_tol)) return next;
    v = std::move(next);
  }
  throw GeometryError("output-nulling recursion did not settle within n + 1 steps");
}

}  // namespace dsmon
