#pragma once

#include "dsmon/core/descriptor_system.hpp"
#include "dsmon/geometry/subspace.hpp"

#include <vector>

namespace dsmon {

/// One application of S -> [A B]((E^-1 S x R^m) ∩ Ker[C D]).
Subspace conditioned_step(const DescriptorSystem& sys, const Subspace& s,
                          const NumericPolicy& policy = {});

/// Smallest fixed point of conditioned_step, iterated from {0}.
/// `dims`, when given, receives the dimension after every iteration.
Subspace conditioned_invariant(const DescriptorSystem& sys, const NumericPolicy& policy = {},
                               std::vector<Index>* dims = nullptr);

/// Minimum-norm L with [A + LC, B + LD](E^-1 S x R^m) ⊆ S.
Matrix output_injection(const DescriptorSystem& sys, const Subspace& s,
                        const NumericPolicy& policy = {});

/// max-abs of (I - S S^T)[A + LC, B + LD] applied to a basis of E^-1 S x R^m.
double injection_residual(const DescriptorSystem& sys, const Subspace& s, const Matrix& l,
                          const NumericPolicy& policy = {});

/// Largest V ⊆ Ker(cker) with A V ⊆ V + Im(bmap).
Subspace controlled_invariant(const Matrix& a, const Matrix& bmap, const Matrix& cker,
                              const NumericPolicy& policy = {});

/// Largest V such that every x in V admits u with A x + B u in V and C x + D u = 0
/// (the weakly unobservable subspace of (A, B, C, D)).
Subspace output_nulling_subspace(const Matrix& a, const Matrix& b, const Matrix& c,
                                 const Matrix& d, const NumericPolicy& policy = {});

}  // namespace dsmon
