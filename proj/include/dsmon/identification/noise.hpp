#pragma once

#include "dsmon/identification/identification_filter.hpp"

namespace dsmon {

/// Covariances of the transformed noises
///   eta_hat = P^T (eta + J zeta),   zeta_hat = Pi Ps zeta.
struct NoiseCovariances {
  Matrix process;      ///< E[eta_hat eta_hat^T] (n x n)
  Matrix cross;        ///< E[eta_hat zeta_hat^T] (n x p)
  Matrix measurement;  ///< E[zeta_hat zeta_hat^T] (p x p)

  /// [process cross; cross^T measurement]
  Matrix joint() const;
};

/// Throws DimensionError for non-symmetric or indefinite inputs.
NoiseCovariances map_noise_covariances(const IdentificationFilter& filter, const Matrix& r_eta,
                                       const Matrix& r_zeta);

}  // namespace dsmon
