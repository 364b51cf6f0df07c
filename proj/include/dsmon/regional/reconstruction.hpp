#pragma once

#include "dsmon/core/trajectory.hpp"
#include "dsmon/geometry/subspace.hpp"
#include "dsmon/regional/differentiation.hpp"

namespace dsmon {

/// A descriptor system split into its dynamic and algebraic parts:
///   x1' = A11 x1 + A12 x2 + B1 u
///   0   = A21 x1 + A22 x2 + B2 u
///   y   = C1 x1 + C2 x2 + D u
struct PartitionedModel {
  Matrix A11, A12, A21, A22, B1, B2, C1, C2, D;

  Index n1() const { return A11.rows(); }
  Index n2() const { return A22.cols(); }
  Index inputs() const { return B1.cols(); }
  Index outputs() const { return C1.rows(); }
  void validate() const;
};

/// Result of reconstructing (x1, x2) from y with u unknown.
struct Reconstruction {
  Trajectory x1, x2;  ///< components orthogonal to V1 and V2
  Subspace V1;        ///< what cannot be recovered of x1
  Subspace V2;        ///< what cannot be recovered of x2
  Index derivative_order = 0;
};

/// Algebraic unknown-input reconstruction: stacks y and its first k smoothed
/// derivatives, removes the unknown-input contribution with the left kernel
/// of the block Toeplitz matrix and solves for x1 in the least-squares sense.
/// k is the smallest order at which the recoverable part of x1 is complete.
Reconstruction reconstruct_states(const PartitionedModel& model, const Trajectory& y,
                                  const SmoothingDifferentiator& sg = {},
                                  const NumericPolicy& policy = {});

/// Splits (E, A, B, C, D) with an SVD of E: x = V [x1; x2], rows scaled so
/// that the x1 block has identity in front of x1'.
struct PartitionedRealization {
  PartitionedModel model;
  Matrix V;  ///< orthogonal, x = V [x1; x2]
};

PartitionedRealization partition_by_svd(const Matrix& e, const Matrix& a, const Matrix& b,
                                        const Matrix& c, const Matrix& d,
                                        const NumericPolicy& policy = {});

}  // namespace dsmon
