#include <doctest.h>

#include "dsmon/core/linalg.hpp"
#include "dsmon/geometry/deflating.hpp"
#include "dsmon/geometry/invariant_subspaces.hpp"
#include "dsmon/geometry/subspace.hpp"
#include "support/fixtures.hpp"

#include <cmath>

using namespace dsmon;

namespace {

Matrix unit(Index n, std::initializer_list<Index> idx) {
  Matrix m = Matrix::Zero(n, static_cast<Index>(idx.size()));
  Index j = 0;
  for (Index i : idx) m(i, j++) = 1.0;
  return m;
}

// Random system with occasional singular E and feedthrough.
DescriptorSystem random_system(std::mt19937_64& rng, int trial) {
  std::uniform_int_distribution<int> dn(1, 6);
  const Index n = dn(rng);
  const Index m = 1 + trial % 3;
  const Index p = 1 + (trial / 3) % 3;
  Matrix e = Matrix::Identity(n, n);
  if (trial % 3 == 1 && n > 1) {
    const auto pen = fixture::random_index_one(rng, n, n - 1);
    e = pen.e;
  }
  const Matrix d = (trial % 2 == 0) ? Matrix(oracle::random_matrix(rng, p, m)) : Matrix::Zero(p, m);
  return DescriptorSystem(e, oracle::random_matrix(rng, n, n), oracle::random_matrix(rng, n, m),
                          oracle::random_matrix(rng, p, n), d);
}

}  // namespace

TEST_CASE("elementary subspace operations") {
  const Subspace s12 = image(unit(3, {0, 1}));
  const Subspace s23 = image(unit(3, {1, 2}));
  const Subspace meet = intersect(s12, s23);
  CHECK(meet.dim() == 1);
  CHECK(approx_equal(meet, image(unit(3, {1})), 1e-12));

  CHECK(approx_equal(preimage(Matrix::Identity(3, 3), s12), s12, 1e-12));

  Matrix row(1, 2);
  row << 1, 1;
  const Subspace k = kernel(row);
  REQUIRE(k.dim() == 1);
  Vector expected(2);
  expected << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(k.basis().col(0).dot(expected)) - 1.0) < 1e-14);

  CHECK(sum(s12, s23).dim() == 3);
  CHECK(orth_complement(s12).dim() == 1);
  CHECK(largest_principal_angle(s12, s23) == doctest::Approx(M_PI / 2));
  CHECK_THROWS_AS(sum(s12, Subspace(4)), DimensionError);
}

TEST_CASE("subspace bases stay orthonormal") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial % 5;
    const Subspace a = image(oracle::random_matrix(rng, n, 1 + trial % 3));
    const Subspace b = kernel(oracle::random_matrix(rng, 1 + trial % 2, n));
    for (const Subspace& s : {a, b, sum(a, b), intersect(a, b), orth_complement(a),
                              preimage(oracle::random_matrix(rng, n, n), a)}) {
      CHECK(s.dim() <= s.ambient_dim());
      if (s.dim() > 0) {
        CHECK(linalg::max_abs(s.basis().transpose() * s.basis() - Matrix::Identity(s.dim(), s.dim())) <= 1e-10);
      }
    }
  }
}

TEST_CASE("conditioned invariant: degenerate cases") {
  std::mt19937_64 rng(4);
  const Matrix a = oracle::random_matrix(rng, 4, 4);
  const DescriptorSystem none(Matrix::Identity(4, 4), a, Matrix::Zero(4, 2), oracle::random_matrix(rng, 2, 4),
                              Matrix::Zero(2, 2));
  CHECK(conditioned_invariant(none).dim() == 0);

  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + trial % 4;
    const Matrix ar = oracle::random_matrix(rng, n, n);
    Matrix b = oracle::random_matrix(rng, n, 1);
    if (trial % 3 == 0 && n > 2) {
      // make the reachable space a proper subspace
      Matrix ablk = Matrix::Zero(n, n);
      ablk.topLeftCorner(2, 2) = ar.topLeftCorner(2, 2);
      ablk.bottomRightCorner(n - 2, n - 2) = ar.bottomRightCorner(n - 2, n - 2);
      b.bottomRows(n - 2).setZero();
      const DescriptorSystem sys(Matrix::Identity(n, n), ablk, b, Matrix::Zero(1, n), Matrix::Zero(1, 1));
      const Subspace s = conditioned_invariant(sys);
      const Matrix k = oracle::krylov_basis(ablk, b);
      CHECK(s.dim() == k.cols());
      CHECK(oracle::subspace_gap(s.basis(), k) < 1e-8);
      continue;
    }
    const DescriptorSystem sys(Matrix::Identity(n, n), ar, b, Matrix::Zero(1, n), Matrix::Zero(1, 1));
    const Subspace s = conditioned_invariant(sys);
    const Matrix k = oracle::krylov_basis(ar, b);
    CHECK(s.dim() == k.cols());
    CHECK(oracle::subspace_gap(s.basis(), k) < 1e-8);
  }
}

TEST_CASE("conditioned invariant of the double integrator with velocity input") {
  Matrix a(2, 2);
  a << 0, 1, 0, 0;
  Matrix b(2, 1);
  b << 0, 1;
  Matrix c(1, 2);
  c << 1, 0;
  const DescriptorSystem sys(Matrix::Identity(2, 2), a, b, c, Matrix::Zero(1, 1));
  std::vector<Index> dims;
  const Subspace s = conditioned_invariant(sys, {}, &dims);
  // first step reaches span{e2}; the second adds A e2 = e1
  REQUIRE(dims.size() >= 2);
  CHECK(dims[0] == 1);
  CHECK(s.dim() == 2);
  const Matrix ref = oracle::conditioned_recursion(Matrix::Identity(2, 2), a, b, c, Matrix::Zero(1, 1));
  CHECK(ref.cols() == 2);
}

TEST_CASE("conditioned invariant matches the brute-force recursion and is a fixed point") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const DescriptorSystem sys = random_system(rng, trial);
    const Subspace s = conditioned_invariant(sys);
    const Matrix ref = oracle::conditioned_recursion(sys.E(), sys.A(), sys.B(), sys.C(), sys.D());
    CHECK(s.dim() == ref.cols());
    CHECK(oracle::subspace_gap(s.basis(), ref) < 1e-7);
    CHECK(largest_principal_angle(conditioned_step(sys, s), s) <= 1e-8);
  }
}

TEST_CASE("conditioned invariant minimality spot check") {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const DescriptorSystem sys = random_system(rng, trial);
    if (sys.n() > 5) continue;
    const Subspace s = conditioned_invariant(sys);
    for (Index drop = 0; drop < s.dim(); ++drop) {
      Matrix reduced(sys.n(), s.dim() - 1);
      Index j = 0;
      for (Index c = 0; c < s.dim(); ++c)
        if (c != drop) reduced.col(j++) = s.basis().col(c);
      const Subspace smaller = Subspace::from_orthonormal(reduced);
      const Subspace step = conditioned_step(sys, smaller);
      // a strictly smaller fixed point would contradict minimality
      CHECK_FALSE(approx_equal(step, smaller, 1e-7));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("output injection: trivial and random cases") {
  std::mt19937_64 rng(31);
  const Index n = 4;
  const DescriptorSystem sys(Matrix::Identity(n, n), oracle::random_matrix(rng, n, n),
                             oracle::random_matrix(rng, n, 1), oracle::random_matrix(rng, 2, n),
                             Matrix::Zero(2, 1));
  const Matrix l_whole = output_injection(sys, Subspace::whole(n));
  CHECK(linalg::max_abs(l_whole) == 0.0);
  CHECK(injection_residual(sys, Subspace::whole(n), l_whole) == 0.0);

  const DescriptorSystem nob(Matrix::Identity(n, n), sys.A(), Matrix::Zero(n, 1), sys.C(), Matrix::Zero(2, 1));
  const Matrix l_zero = output_injection(nob, Subspace(n));
  CHECK(linalg::max_abs(l_zero) == 0.0);

  const Subspace s = conditioned_invariant(sys);
  const Matrix l = output_injection(sys, s);
  const Matrix q1 = preimage(sys.E(), s).basis();
  CHECK(linalg::max_abs(s.residual_projector() * (sys.A() + l * sys.C()) * q1) <= 1e-8);
  CHECK(injection_residual(sys, s, l) <= 1e-8);
}

TEST_CASE("controlled invariant: degenerate cases and the chain") {
  std::mt19937_64 rng(9);
  const Matrix a = oracle::random_matrix(rng, 3, 3);
  CHECK(controlled_invariant(a, oracle::random_matrix(rng, 3, 1), Matrix::Zero(1, 3)).is_whole());
  CHECK(controlled_invariant(a, Matrix::Zero(3, 1), Matrix::Identity(3, 3)).is_zero());

  Matrix chain = Matrix::Zero(3, 3);
  chain(0, 1) = 1;
  chain(1, 2) = 1;
  const Matrix b = unit(3, {2});
  Matrix c = Matrix::Zero(1, 3);
  c(0, 0) = 1;
  const Subspace v = controlled_invariant(chain, b, c);
  const Matrix ref = oracle::controlled_recursion(chain, b, c);
  CHECK(v.dim() == ref.cols());
  CHECK(v.dim() == 0);
}

TEST_CASE("controlled invariant properties and duality") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + trial % 4;
    const Index m = 1 + trial % 2;
    const Index p = 1 + (trial / 2) % 2;
    const Matrix a = oracle::random_matrix(rng, n, n);
    const Matrix b = oracle::random_matrix(rng, n, m);
    Matrix c = oracle::random_matrix(rng, p, n);
    if (trial % 5 == 0) c.col(0).setZero();
    const Subspace v = controlled_invariant(a, b, c);
    const Matrix ref = oracle::controlled_recursion(a, b, c);
    CHECK(v.dim() == ref.cols());
    CHECK(oracle::subspace_gap(v.basis(), ref) < 1e-7);
    CHECK(containment_gap(map(a, v), sum(v, image(b))) <= 1e-8);
    CHECK(linalg::max_abs(c * v.basis()) <= 1e-8);

    const DescriptorSystem sys(Matrix::Identity(n, n), a, b, c, Matrix::Zero(p, m));
    const Subspace s = conditioned_invariant(sys);
    const Subspace dual = orth_complement(controlled_invariant(a.transpose(), c.transpose(), b.transpose()));
    CHECK(largest_principal_angle(s, dual) <= 1e-7);

    // with D = 0 the output-nulling subspace coincides with V*
    const Subspace on = output_nulling_subspace(a, b, c, Matrix::Zero(p, m));
    CHECK(largest_principal_angle(on, v) <= 1e-7);
  }
}

TEST_CASE("deflating transforms: degenerate splits") {
  std::mt19937_64 rng(41);
  const Index n = 3;
  const DescriptorSystem sys(Matrix::Identity(n, n), oracle::random_matrix(rng, n, n),
                             Matrix::Zero(n, 1), oracle::random_matrix(rng, 2, n), Matrix::Zero(2, 1));
  const auto zero = deflating_transforms(sys, Subspace(n), Matrix::Zero(n, 2));
  CHECK(zero.transforms.split_dim == 0);
  CHECK(zero.blocks.E22.rows() == n);
  CHECK(linalg::max_abs(zero.transforms.P.transpose() * zero.transforms.P - Matrix::Identity(n, n)) <= 1e-10);

  const auto whole = deflating_transforms(sys, Subspace::whole(n), Matrix::Zero(n, 2));
  CHECK(whole.transforms.split_dim == n);
  CHECK(whole.blocks.E22.size() == 0);
  CHECK(whole.blocks.A22.size() == 0);
}

TEST_CASE("deflating transforms on the 8-node example with a state attack on node 3") {
  const Matrix a = fixture::consensus_a(1e-4);
  Matrix bk = Matrix::Zero(8, 1);
  bk(2, 0) = 1;
  const DescriptorSystem sys(Matrix::Identity(8, 8), a, bk, fixture::consensus_c(), Matrix::Zero(3, 1));
  const Subspace s = conditioned_invariant(sys);
  const Matrix l = output_injection(sys, s);
  const auto res = deflating_transforms(sys, s, l);
  CHECK(res.blocks.zero_block_e <= 1e-8);
  CHECK(res.blocks.zero_block_a <= 1e-8);
  CHECK(res.blocks.zero_block_b <= 1e-8);
  const Index d = res.transforms.split_dim;
  CHECK(oracle::subspace_gap(res.transforms.P.leftCols(d), s.basis()) < 1e-10);
  // K = {3}: the unknown input enters node 3, which drives nodes 2, 4 and 7 (all measured)
  CHECK(s.dim() == 2);
  Matrix expected(8, 2);
  expected.setZero();
  expected(2, 0) = 1;
  expected.col(1) = a.col(2);
  expected(2, 1) = 0;
  CHECK(oracle::subspace_gap(oracle::lu_image(expected), s.basis()) < 1e-8);
}

TEST_CASE("deflating transforms reject a wrong injection") {
  const Matrix a = fixture::consensus_a(1e-2);
  Matrix bk = Matrix::Zero(8, 1);
  bk(2, 0) = 1;
  const DescriptorSystem sys(Matrix::Identity(8, 8), a, bk, fixture::consensus_c(), Matrix::Zero(3, 1));
  const Subspace s = conditioned_invariant(sys);
  CHECK_THROWS_AS(deflating_transforms(sys, s, Matrix::Zero(8, 3)), GeometryError);
}
