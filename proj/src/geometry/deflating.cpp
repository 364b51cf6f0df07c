#include "dsmon/geometry/deflating.hpp"

#include "dsmon/core/linalg.hpp"

#include <string>

namespace dsmon {

DeflatingResult deflating_transforms(const DescriptorSystem& safe, const Subspace& s,
                                     const Matrix& l, const NumericPolicy& policy) {
  const Index n = safe.n();
  if (s.ambient_dim() != n) throw DimensionError("deflating_transforms: ambient mismatch");
  if (l.rows() != n || l.cols() != safe.p()) throw DimensionError("injection L must be n x p");
  if (!safe.D().isZero(0.0)) {
    throw DimensionError("deflating_transforms expects a system without feedthrough");
  }
  const Subspace pre = preimage(safe.E(), s, policy);
  DeflatingResult out;
  auto& tr = out.transforms;
  tr.split_dim = s.dim();
  tr.split_cols = pre.dim();
  tr.P = linalg::hstack(s.basis(), linalg::complement(s.basis(), n));
  tr.Q = linalg::hstack(pre.basis(), linalg::complement(pre.basis(), n));

  const Index d = tr.split_dim;
  const Index dc = tr.split_cols;
  const Matrix et = tr.P.transpose() * safe.E() * tr.Q;
  const Matrix at = tr.P.transpose() * (safe.A() + l * safe.C()) * tr.Q;
  const Matrix bt = tr.P.transpose() * safe.B();
  const Matrix ct = safe.C() * tr.Q;

  auto& b = out.blocks;
  b.E11 = et.topLeftCorner(d, dc);
  b.E12 = et.topRightCorner(d, n - dc);
  b.E22 = et.bottomRightCorner(n - d, n - dc);
  b.A11 = at.topLeftCorner(d, dc);
  b.A12 = at.topRightCorner(d, n - dc);
  b.A22 = at.bottomRightCorner(n - d, n - dc);
  b.B1 = bt.topRows(d);
  b.C1 = ct.leftCols(dc);
  b.C2 = ct.rightCols(n - dc);
  b.zero_block_e = linalg::max_abs(et.bottomLeftCorner(n - d, dc));
  b.zero_block_a = linalg::max_abs(at.bottomLeftCorner(n - d, dc));
  b.zero_block_b = linalg::max_abs(bt.bottomRows(n - d));

  auto check = [&](double value, const Matrix& whole, const char* name) {
    const double tol = policy.containment_tol * std::max(1.0, linalg::max_abs(whole));
    if (value > tol) {
      throw GeometryError(std::string("deflating transform leaves a nonzero ") + name +
                              " block (max-abs " + std::to_string(value) + ")",
                          value);
    }
  };
  check(b.zero_block_e, et, "E21");
  check(b.zero_block_a, at, "A21");
  check(b.zero_block_b, bt, "B2");
  return out;
}

}  // namespace dsmon
