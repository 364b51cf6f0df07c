#pragma once

#include "dsmon/core/descriptor_system.hpp"
#include "dsmon/core/trajectory.hpp"
#include "dsmon/geometry/deflating.hpp"
#include "dsmon/geometry/subspace.hpp"

namespace dsmon {

/// System rewritten so the unknown input no longer reaches the measurements:
///   E x' = (A - B_K D_K^+ C) x + B_K (I - D_K^+ D_K) u + B_K D_K^+ y,
///   P_s y = (I - D_K D_K^+) C x.
struct SafeMeasurementForm {
  DescriptorSystem system;  ///< (E, A_s, B_bar, C_s, 0)
  Matrix Bk, Dk;
  Matrix Dk_pinv;
  Matrix Ps;      ///< I - D_K D_K^+
  Matrix feed_y;  ///< B_K D_K^+
};

SafeMeasurementForm safe_measurement_form(const Matrix& e, const Matrix& a, const Matrix& c,
                                          const Matrix& b_sig, const Matrix& d_sig,
                                          const NumericPolicy& policy = {});

/// Safe-measurement system for the attack set K of an attack-layout system.
DescriptorSystem remove_feedthrough(const DescriptorSystem& sys, const AttackSet& k,
                                    const NumericPolicy& policy = {});

/// Residual generator decoupled from the unknown input with signature (B_sig, D_sig):
///   E22 w' = F w + By y + Bv v,   r = H w + Dy y + Dv v,   w(0) = X0 x(0),
/// with v an optional known input.
///
/// When dim E^-1 S exceeds dim S the lower block of the partitioned system has
/// more rows than columns. Rows taken from the left kernel of that block
/// (`Wperp`) are then algebraic relations that act as extra measurements of
/// x2; the remaining rows (`W`) give the square pencil that is integrated.
/// In the square case W = I, H = Pi C2 and Dy = -Pi Ps.
struct IdentificationFilter {
  AttackSet candidate;
  SafeMeasurementForm safe;
  Subspace S;
  Matrix L;
  DeflatingTransforms transforms;
  PartitionedSystem blocks;
  Matrix Pi;  ///< I - C1 C1^+
  Matrix G;   ///< injection on the (2,2) block
  Matrix J;   ///< L Ps - B_K D_K^+

  Matrix W, Wperp;

  Matrix E22, F, By, Bv, H, Dy, Dv, X0;

  Index state_dim() const { return E22.rows(); }
};

/// Generic construction for an unknown-input signature and an optional known
/// input matrix `b_known` (n x q, may have zero columns).
IdentificationFilter build_signature_filter(const Matrix& e, const Matrix& a, const Matrix& c,
                                            const Matrix& b_sig, const Matrix& d_sig,
                                            const Matrix& b_known,
                                            const NumericPolicy& policy = {});

/// Filter for the attack set K of an attack-layout system.
IdentificationFilter build_identification_filter(const DescriptorSystem& sys, const AttackSet& k,
                                                 const NumericPolicy& policy = {});

/// Simulates the filter from the exact initial state and returns r_K.
Trajectory run_identification_filter(const IdentificationFilter& filter, const Trajectory& y,
                                     const Vector& x0, const Trajectory* known = nullptr,
                                     const NumericPolicy& policy = {});

}  // namespace dsmon
