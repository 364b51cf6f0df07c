#include "dsmon/identification/noise.hpp"

#include "dsmon/core/linalg.hpp"

namespace dsmon {

Matrix NoiseCovariances::joint() const {
  return linalg::vstack(linalg::hstack(process, cross), linalg::hstack(cross.transpose(), measurement));
}

namespace {

void require_covariance(const Matrix& m, Index dim, const char* name) {
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError(std::string(name) + " has the wrong size");
  }
  const double scale = std::max(1.0, linalg::max_abs(m));
  if (linalg::max_abs(m - m.transpose()) > 1e-12 * scale) {
    throw DimensionError(std::string(name) + " is not symmetric");
  }
  if (!linalg::is_psd(m, 1e-12)) throw DimensionError(std::string(name) + " is not positive semidefinite");
}

}  // namespace

NoiseCovariances map_noise_covariances(const IdentificationFilter& filter, const Matrix& r_eta,
                                       const Matrix& r_zeta) {
  const Matrix& p = filter.transforms.P;
  const Index n = p.rows();
  const Index m = filter.Pi.rows();
  require_covariance(r_eta, n, "R_eta");
  require_covariance(r_zeta, m, "R_zeta");
  const Matrix z = filter.Pi * filter.safe.Ps;
  NoiseCovariances out;
  out.process = p.transpose() * (r_eta + filter.J * r_zeta * filter.J.transpose()) * p;
  out.cross = p.transpose() * filter.J * r_zeta * z.transpose();
  out.measurement = z * r_zeta * z.transpose();
  // symmetrize away rounding
  out.process = 0.5 * (out.process + out.process.transpose()).eval();
  out.measurement = 0.5 * (out.measurement + out.measurement.transpose()).eval();
  return out;
}

}  // namespace dsmon
