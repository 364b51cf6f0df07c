#pragma once

#include "dsmon/core/common.hpp"

#include <vector>

namespace dsmon {

/// Two-sided orthogonal compression of the pencil (E, A).
///
/// With E = U diag(S, 0) V^T the transformed pair is
///   U^T E V = [S 0; 0 0],   U^T A V = [A11 A12; A21 A22],
/// where S is r x r. The pencil has index 0 when r = n and index 1 when A22
/// is nonsingular; otherwise `index` is reported as 2 ("two or more").
struct PencilDecomposition {
  Matrix left;   ///< U
  Matrix right;  ///< V
  Matrix e_t;    ///< U^T E V
  Matrix a_t;    ///< U^T A V
  Index slow_dim = 0;
  int index = 0;
  bool regular = true;

  Index n() const { return e_t.rows(); }
  Index fast_dim() const { return n() - slow_dim; }
};

PencilDecomposition decompose_pencil(const Matrix& e, const Matrix& a,
                                     const NumericPolicy& policy = {});

/// Slow/fast realization of E x' = A x + f for index <= 1 pencils:
///   z' = M z + N f,   x = X z + Y f.
struct IndexOneRealization {
  Matrix slow;          ///< M
  Matrix forcing;       ///< N
  Matrix lift_state;    ///< X
  Matrix lift_forcing;  ///< Y
  Matrix to_slow;       ///< V1^T, maps a consistent x to z
  Matrix constraint;    ///< U2^T, rows spanning Ker(E^T)
};

IndexOneRealization realize_index_one(const PencilDecomposition& pd);

/// Finite generalized eigenvalues of (E, A).
std::vector<Complex> pencil_eigenvalues(const Matrix& e, const Matrix& a,
                                        const NumericPolicy& policy = {});

/// Largest real part among finite eigenvalues (-inf when there are none).
double spectral_abscissa(const Matrix& e, const Matrix& a, const NumericPolicy& policy = {});

/// Regular, index <= 1 and every finite eigenvalue strictly in the left half plane.
bool is_hurwitz(const Matrix& e, const Matrix& a, const NumericPolicy& policy = {});

}  // namespace dsmon
