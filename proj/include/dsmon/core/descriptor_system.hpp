#pragma once

#include "dsmon/core/common.hpp"

#include <compare>
#include <string>
#include <vector>

namespace dsmon {

/// Sorted set of distinct attack channels. Stored 0-based; printed 1-based.
///
/// For the attack layout B = [I 0], D = [0 I] index i < n denotes the state
/// equation i and index n + j denotes the measurement j.
class AttackSet {
 public:
  AttackSet() = default;
  explicit AttackSet(std::vector<Index> zero_based);
  static AttackSet from_one_based(const std::vector<long long>& one_based);

  const std::vector<Index>& indices() const { return idx_; }
  Index size() const { return static_cast<Index>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  bool contains(Index i) const;
  /// Checks every index is below `channels`.
  void validate(Index channels) const;

  AttackSet set_union(const AttackSet& other) const;
  AttackSet set_intersection(const AttackSet& other) const;

  /// "{3,5}" with 1-based indices.
  std::string to_string() const;
  /// Inverse of to_string; also accepts "3,5" and "3 5".
  static AttackSet parse(const std::string& text);

  auto operator<=>(const AttackSet&) const = default;

 private:
  std::vector<Index> idx_;
};

/// The quintuple (E, A, B, C, D) of a linear time-invariant descriptor system
///   E x' = A x + B u,   y = C x + D u.
class DescriptorSystem {
 public:
  DescriptorSystem() = default;
  DescriptorSystem(Matrix e, Matrix a, Matrix b, Matrix c, Matrix d);

  /// Builds the attack model with B = [I_n 0] and D = [0 I_p].
  static DescriptorSystem attack_model(Matrix e, Matrix a, Matrix c);

  const Matrix& E() const { return e_; }
  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  const Matrix& D() const { return d_; }
  Index n() const { return a_.rows(); }
  Index m() const { return b_.cols(); }
  Index p() const { return c_.rows(); }

  bool has_attack_layout() const;
  Matrix B_of(const AttackSet& k) const;
  Matrix D_of(const AttackSet& k) const;

 private:
  Matrix e_, a_, b_, c_, d_;
};

struct RegularityWitness {
  bool regular = false;
  std::vector<Complex> points;
  std::vector<Complex> determinants;
  std::vector<double> sigma_ratios;
};

/// Probabilistic regularity test of the pencil (E, A) at 2n+1 seeded points.
RegularityWitness check_regular(const Matrix& e, const Matrix& a, const NumericPolicy& policy = {});
RegularityWitness check_regular(const DescriptorSystem& sys, const NumericPolicy& policy = {});

/// Norm of the component of v lying in Ker(E^T).
double inconsistency(const Matrix& e, const Vector& v, const NumericPolicy& policy = {});
/// Generic A2 test for E x' = A x + f with forcing value f0 at t = 0.
bool check_consistent(const Matrix& e, const Matrix& a, const Vector& x0, const Vector& f0,
                      const NumericPolicy& policy = {});
bool check_consistent(const DescriptorSystem& sys, const Vector& x0, const Vector& u0,
                      const NumericPolicy& policy = {});

struct ZeroReport {
  Index rows = 0;         ///< n + p
  Index columns = 0;      ///< n + m
  Index normal_rank = 0;  ///< generic rank of the Rosenbrock pencil
  bool square = false;
  std::vector<Complex> zeros;  ///< finite points where the rank drops
  bool has_zero_dynamics = false;

  bool rank_deficient_everywhere() const { return normal_rank < columns; }
};

/// Invariant zeros of the Rosenbrock pencil [sE - A, B; C, -D].
ZeroReport invariant_zeros(const Matrix& e, const Matrix& a, const Matrix& b, const Matrix& c,
                           const Matrix& d, const NumericPolicy& policy = {});
ZeroReport invariant_zeros(const DescriptorSystem& sys, const NumericPolicy& policy = {});

/// Finite generalized eigenvalues of (A, E), i.e. roots of det(sE - A).
/// Candidates from QZ are kept only when sE - A is numerically singular there.
std::vector<Complex> finite_generalized_eigenvalues(const Matrix& a, const Matrix& e,
                                                    const NumericPolicy& policy = {});

}  // namespace dsmon
