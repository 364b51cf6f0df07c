#include "dsmon/identification/identification_filter.hpp"

#include "dsmon/core/linalg.hpp"
#include "dsmon/core/pencil.hpp"
#include "dsmon/core/simulate.hpp"
#include "dsmon/detection/detection_filter.hpp"
#include "dsmon/geometry/invariant_subspaces.hpp"

namespace dsmon {

SafeMeasurementForm safe_measurement_form(const Matrix& e, const Matrix& a, const Matrix& c,
                                          const Matrix& b_sig, const Matrix& d_sig,
                                          const NumericPolicy& policy) {
  const Index n = a.rows();
  const Index p = c.rows();
  if (b_sig.rows() != n || d_sig.rows() != p || b_sig.cols() != d_sig.cols()) {
    throw DimensionError("signature (B_K, D_K) has inconsistent dimensions");
  }
  const Index k = b_sig.cols();
  SafeMeasurementForm f;
  f.Bk = b_sig;
  f.Dk = d_sig;
  f.Dk_pinv = linalg::pinv(d_sig, policy);
  f.Ps = Matrix::Identity(p, p) - d_sig * f.Dk_pinv;
  f.feed_y = b_sig * f.Dk_pinv;
  const Matrix as = a - f.feed_y * c;
  const Matrix bbar = b_sig * (Matrix::Identity(k, k) - f.Dk_pinv * d_sig);
  f.system = DescriptorSystem(e, as, bbar, f.Ps * c, Matrix::Zero(p, k));
  return f;
}

DescriptorSystem remove_feedthrough(const DescriptorSystem& sys, const AttackSet& k,
                                    const NumericPolicy& policy) {
  return safe_measurement_form(sys.E(), sys.A(), sys.C(), sys.B_of(k), sys.D_of(k), policy).system;
}

IdentificationFilter build_signature_filter(const Matrix& e, const Matrix& a, const Matrix& c,
                                            const Matrix& b_sig, const Matrix& d_sig,
                                            const Matrix& b_known, const NumericPolicy& policy) {
  const Index n = a.rows();
  const Index p = c.rows();
  if (b_known.rows() != n) throw DimensionError("known-input matrix must have n rows");
  IdentificationFilter f;
  f.safe = safe_measurement_form(e, a, c, b_sig, d_sig, policy);
  const DescriptorSystem& safe = f.safe.system;

  f.S = conditioned_invariant(safe, policy);
  f.L = output_injection(safe, f.S, policy);
  const DeflatingResult dr = deflating_transforms(safe, f.S, f.L, policy);
  f.transforms = dr.transforms;
  f.blocks = dr.blocks;
  const Index rows = f.blocks.E22.rows();
  const Index cols = f.blocks.E22.cols();
  if (rows < cols) {
    throw DesignInfeasibleError("the decoupled (2,2) pencil has more unknowns than equations (" +
                                std::to_string(rows) + "x" + std::to_string(cols) + ")");
  }
  const Matrix& c1 = f.blocks.C1;
  f.Pi = Matrix::Identity(p, p) - c1 * linalg::pinv(c1, policy);
  if (linalg::max_abs(f.Pi * f.Pi - f.Pi) > 1e-10 || linalg::max_abs(f.Pi * c1) > 1e-10) {
    throw InternalError("output projector failed its identities");
  }
  f.J = f.L * f.safe.Ps - f.safe.feed_y;

  const Index d = f.transforms.split_dim;
  const Matrix p2 = f.transforms.P.rightCols(n - d);
  const Index dc = f.transforms.split_cols;
  const Matrix& a22 = f.blocks.A22;

  // split the rows into a square dynamic part and algebraic relations
  const Index extra = rows - cols;
  if (extra == 0) {
    f.W = Matrix::Identity(rows, rows);
    f.Wperp = Matrix(0, rows);
  } else {
    const Matrix left = linalg::left_null_space(f.blocks.E22, policy);
    if (left.cols() < extra) throw InternalError("left kernel of E22 is too small");
    const Matrix proj = left.transpose() * a22;
    Eigen::JacobiSVD<Matrix> svd(proj, Eigen::ComputeFullU);
    f.Wperp = (left * svd.matrixU().leftCols(extra)).transpose();
    f.W = linalg::complement(f.Wperp.transpose(), rows).transpose();
  }
  const Matrix lower_y = -p2.transpose() * f.J;  // forcing of the lower rows per unit y
  const Matrix lower_v = p2.transpose() * b_known;

  f.E22 = f.W * f.blocks.E22;
  const Matrix a_sq = f.W * a22;
  const Matrix cz = linalg::vstack(f.Pi * f.blocks.C2, f.Wperp * a22);
  const Matrix zy = linalg::vstack(f.Pi * f.safe.Ps, -f.Wperp * lower_y);
  const Matrix zv = linalg::vstack(Matrix::Zero(p, b_known.cols()), -f.Wperp * lower_v);
  if (f.E22.rows() > 0) {
    f.G = design_injection(f.E22, a_sq, cz, nullptr, policy);
  } else {
    f.G = Matrix::Zero(0, cz.rows());
  }
  f.F = a_sq + f.G * cz;
  f.By = -f.G * zy + f.W * lower_y;
  f.Bv = -f.G * zv + f.W * lower_v;
  f.H = cz;
  f.Dy = -zy;
  f.Dv = -zv;
  f.X0 = f.transforms.Q.rightCols(n - dc).transpose();
  return f;
}

IdentificationFilter build_identification_filter(const DescriptorSystem& sys, const AttackSet& k,
                                                 const NumericPolicy& policy) {
  k.validate(sys.m());
  IdentificationFilter f = build_signature_filter(sys.E(), sys.A(), sys.C(), sys.B_of(k),
                                                  sys.D_of(k), Matrix(sys.n(), 0), policy);
  f.candidate = k;
  return f;
}

Trajectory run_identification_filter(const IdentificationFilter& filter, const Trajectory& y,
                                     const Vector& x0, const Trajectory* known,
                                     const NumericPolicy& policy) {
  y.validate();
  if (y.dim() != filter.Dy.cols()) throw DimensionError("measurement dimension mismatch");
  if (x0.size() != filter.X0.cols()) throw DimensionError("initial state has wrong dimension");
  Matrix forcing = filter.By * y.samples;
  if (filter.Bv.cols() > 0) {
    if (!known) throw DimensionError("filter expects a known input trajectory");
    if (!same_grid(known->times, y.times) || known->dim() != filter.Bv.cols()) {
      throw DimensionError("known input does not match the measurement grid");
    }
    forcing += filter.Bv * known->samples;
  }
  Matrix r = filter.Dy * y.samples;
  if (filter.Dv.cols() > 0) r += filter.Dv * known->samples;
  if (filter.state_dim() > 0) {
    const DaeIntegrator integ(filter.E22, filter.F, policy);
    const Matrix w = integ.integrate_sampled(y.times, filter.X0 * x0, forcing);
    r += filter.H * w;
  }
  return Trajectory("r", y.times, r);
}

}  // namespace dsmon
