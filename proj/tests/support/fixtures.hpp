#pragma once

#include "oracles.hpp"

namespace fixture {

using oracle::Mat;

// The 8-node consensus example typed in from the printed matrix display.
inline Mat consensus_a(double eps) {
  Mat a(8, 8);
  a << -0.8, 0.1, 0, 0.2, 0.5, 0, 0, 0,
       0.1, -0.4 - eps, eps, 0, 0, 0.3, 0, 0,
       0, 3 * eps, -9 * eps, 0, 0, 0, 6 * eps, 0,
       0.1, 0, eps, -0.5 - eps, 0, 0, 0, 0.4,
       0.1, 0, 0, 0, -0.6, 0.2, 0, 0.3,
       0, 0.4, 0, 0, 0.1, -0.6, 0.1, 0,
       0, 0, 3 * eps, 0, 0, 0.4, -0.6 - 3 * eps, 0.2,
       0, 0, 0, 0.3, 0.2, 0, 0.2, -0.7;
  return a;
}

inline Mat consensus_c() {
  Mat c = Mat::Zero(3, 8);
  c(0, 1) = 1;
  c(1, 3) = 1;
  c(2, 6) = 1;
  return c;
}

// Random pencil (E, A) of size n with rank(E) = r and nonsingular A22 block,
// so the pencil is regular of index <= 1. Eigenvalues are shifted left.
struct Pencil {
  Mat e, a;
};

inline Pencil random_index_one(std::mt19937_64& rng, Eigen::Index n, Eigen::Index r,
                               double shift = 1.5) {
  const Mat u = oracle::random_orthogonal(rng, n);
  const Mat v = oracle::random_orthogonal(rng, n);
  Mat s = Mat::Zero(n, n);
  std::uniform_real_distribution<double> sv(0.5, 2.0);
  for (Eigen::Index i = 0; i < r; ++i) s(i, i) = sv(rng);
  Mat at = oracle::random_matrix(rng, n, n, 0.7);
  // keep the algebraic block well conditioned
  if (r < n) at.bottomRightCorner(n - r, n - r) += 2.0 * Mat::Identity(n - r, n - r);
  if (r > 0) at.topLeftCorner(r, r) -= shift * s.topLeftCorner(r, r);
  return {u * s * v.transpose(), u * at * v.transpose()};
}

}  // namespace fixture

namespace fixture {

// Chain (or ring) of `regions` blocks of `size` states. Each block is stable
// with E_i = I, measures its first and last node, and couples to the next
// block through a random block scaled by `coupling`.
struct Network {
  Mat a, c;
  std::vector<std::vector<Eigen::Index>> regions;
};

inline Network block_network(std::mt19937_64& rng, Eigen::Index regions, Eigen::Index size,
                             double coupling, bool ring = false) {
  const Eigen::Index n = regions * size;
  Network net;
  net.a = Mat::Zero(n, n);
  const Eigen::Index per = size > 1 ? 2 : 1;
  net.c = Mat::Zero(regions * per, n);
  for (Eigen::Index r = 0; r < regions; ++r) {
    const Eigen::Index o = r * size;
    net.a.block(o, o, size, size) = oracle::random_matrix(rng, size, size, 0.5) - 2.0 * Mat::Identity(size, size);
    net.c(r * per, o) = 1.0;
    if (per == 2) net.c(r * per + 1, o + size - 1) = 1.0;
    std::vector<Eigen::Index> nodes;
    for (Eigen::Index k = 0; k < size; ++k) nodes.push_back(o + k);
    net.regions.push_back(nodes);
  }
  const Eigen::Index links = ring && regions > 2 ? regions : regions - 1;
  for (Eigen::Index r = 0; r < links; ++r) {
    const Eigen::Index s = (r + 1) % regions;
    net.a.block(r * size, s * size, size, size) = coupling * oracle::random_matrix(rng, size, size);
    net.a.block(s * size, r * size, size, size) = coupling * oracle::random_matrix(rng, size, size);
  }
  return net;
}

}  // namespace fixture

namespace fixture {

// Shifts the finite spectrum of (E, A) so its abscissa is at most -margin.
inline Mat stabilized(const Mat& e, const Mat& a, double margin = 0.5) {
  Eigen::GeneralizedEigenSolver<Mat> ges(a, e);
  double abscissa = -margin;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (std::abs(ges.betas()(i)) < 1e-12 * std::max(1.0, std::abs(ges.alphas()(i)))) continue;
    abscissa = std::max(abscissa, (ges.alphas()(i) / ges.betas()(i)).real());
  }
  return a - (abscissa + margin) * e;
}

}  // namespace fixture

namespace fixture {

// Three regions of five nodes in a chain. Each region measures its local
// nodes {0, 2, 4}; the couplings read unmeasured nodes of the neighbour, so
// a wrong estimate in one region shows up in the residuals of the others.
inline Network regional_chain(std::uint64_t seed = 5) {
  std::mt19937_64 rng(seed);
  const Eigen::Index regions = 3, size = 5, per = 3;
  Network net;
  net.a = Mat::Zero(regions * size, regions * size);
  net.c = Mat::Zero(regions * per, regions * size);
  for (Eigen::Index r = 0; r < regions; ++r) {
    const Eigen::Index o = r * size;
    net.a.block(o, o, size, size) =
        stabilized(Mat::Identity(size, size), oracle::random_matrix(rng, size, size, 0.7));
    net.c(r * per, o) = 1.0;
    net.c(r * per + 1, o + 2) = 1.0;
    net.c(r * per + 2, o + 4) = 1.0;
    std::vector<Eigen::Index> nodes;
    for (Eigen::Index k = 0; k < size; ++k) nodes.push_back(o + k);
    net.regions.push_back(nodes);
  }
  for (Eigen::Index r = 0; r + 1 < regions; ++r) {
    net.a(r * size + size - 1, (r + 1) * size + 1) = 0.6;
    net.a((r + 1) * size, r * size + size - 2) = 0.5;
  }
  return net;
}

// Semi-explicit index-one system in (x1, x2) coordinates:
// E = diag(I, 0), A22 well conditioned, unknown input u of width m.
struct SemiExplicit {
  Mat e, a, b, c, d;
  Eigen::Index n1, n2;
};

inline SemiExplicit random_semi_explicit(std::mt19937_64& rng, Eigen::Index n1, Eigen::Index n2,
                                         Eigen::Index m, Eigen::Index p) {
  const Eigen::Index n = n1 + n2;
  SemiExplicit s;
  s.n1 = n1;
  s.n2 = n2;
  s.e = Mat::Zero(n, n);
  s.e.topLeftCorner(n1, n1).setIdentity();
  s.a = oracle::random_matrix(rng, n, n, 0.6);
  s.a.bottomRightCorner(n2, n2) -= 2.0 * Mat::Identity(n2, n2);
  s.a = stabilized(s.e, s.a);
  s.b = oracle::random_matrix(rng, n, m);
  s.c = oracle::random_matrix(rng, p, n);
  s.d = Mat::Zero(p, m);
  return s;
}

}  // namespace fixture
