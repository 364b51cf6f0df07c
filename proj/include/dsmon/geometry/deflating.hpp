#pragma once

#include "dsmon/core/descriptor_system.hpp"
#include "dsmon/geometry/subspace.hpp"

namespace dsmon {

/// P = [Basis(S) Basis(S^perp)],  Q = [Basis(E^-1 S) Basis((E^-1 S)^perp)].
struct DeflatingTransforms {
  Matrix P;
  Matrix Q;
  Index split_dim = 0;   ///< dim S: rows of the (1,1) blocks
  Index split_cols = 0;  ///< dim E^-1 S: columns of the (1,1) blocks
};

/// Blocks of P^T E Q, P^T (A + L C) Q, P^T B and C Q for a safe-measurement system.
struct PartitionedSystem {
  Matrix E11, E12, E22;
  Matrix A11, A12, A22;
  Matrix B1;
  Matrix C1, C2;
  double zero_block_e = 0.0;  ///< max-abs of the lower-left block of P^T E Q
  double zero_block_a = 0.0;  ///< max-abs of the lower-left block of P^T (A + LC) Q
  double zero_block_b = 0.0;  ///< max-abs of the lower block of P^T B

  bool square_22() const { return E22.rows() == E22.cols(); }
};

struct DeflatingResult {
  DeflatingTransforms transforms;
  PartitionedSystem blocks;
};

/// Builds the input-decoupled coordinates for a system with D = 0. Throws
/// GeometryError if any of the three zero blocks exceeds the containment tolerance.
DeflatingResult deflating_transforms(const DescriptorSystem& safe, const Subspace& s,
                                     const Matrix& l, const NumericPolicy& policy = {});

}  // namespace dsmon
