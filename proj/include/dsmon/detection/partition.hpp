#pragma once

#include "dsmon/core/descriptor_system.hpp"

#include <vector>

namespace dsmon {

/// Disjoint state regions covering {0..n-1}, with the measurements of each
/// region inferred from the support of the rows of C.
///
/// Construction checks that E and C are block diagonal with respect to the
/// regions (off-block entries at most `block_tol`).
class Partition {
 public:
  Partition() = default;
  Partition(const DescriptorSystem& sys, std::vector<std::vector<Index>> regions,
            double block_tol = 1e-12);
  /// Regions given with 1-based node numbers.
  static Partition from_one_based(const DescriptorSystem& sys,
                                  const std::vector<std::vector<long long>>& regions);
  /// A single region holding every node.
  static Partition single(const DescriptorSystem& sys);

  Index count() const { return static_cast<Index>(nodes_.size()); }
  Index n() const { return n_; }
  Index p() const { return p_; }
  const std::vector<Index>& nodes(Index i) const { return nodes_.at(i); }
  const std::vector<Index>& outputs(Index i) const { return outputs_.at(i); }
  Index region_of_node(Index node) const { return node_region_.at(node); }
  Index region_of_output(Index out) const { return output_region_.at(out); }

  /// A(V_i, V_j).
  Matrix block(const Matrix& m, Index i, Index j) const;
  Matrix local_E(Index i) const;
  Matrix local_A(Index i) const;
  Matrix local_C(Index i) const;
  /// G(V_i, outputs_i) for an n x p gain.
  Matrix local_gain(const Matrix& g, Index i) const;
  /// A(V_i, complement of V_i), the coupling block row.
  Matrix coupling_row(const Matrix& a, Index i) const;

  /// Block-diagonal part A_D; the remainder A - A_D is the coupling A_C.
  Matrix diagonal_part(const Matrix& a) const;
  Matrix coupling_part(const Matrix& a) const;

  /// Regions j != i with A_ij != 0 (i reads from j).
  std::vector<Index> in_neighbors(Index i) const { return in_.at(i); }
  /// Regions j != i with A_ji != 0 (j reads from i).
  std::vector<Index> out_neighbors(Index i) const { return out_.at(i); }
  /// Nodes of V_i whose equations involve states of other regions.
  std::vector<Index> boundary_nodes(Index i) const { return boundary_.at(i); }

  /// Assembles a block-diagonal gain from per-region gains.
  Matrix assemble_gain(const std::vector<Matrix>& local) const;

  /// Rows of `x` (n x N or n-vector) belonging to region i.
  Matrix restrict_rows(const Matrix& x, Index i) const;
  Matrix restrict_output_rows(const Matrix& y, Index i) const;

  const std::vector<std::vector<Index>>& regions() const { return nodes_; }
  const DescriptorSystem& system() const { return sys_; }

 private:
  DescriptorSystem sys_;
  Index n_ = 0, p_ = 0;
  std::vector<std::vector<Index>> nodes_, outputs_;
  std::vector<Index> node_region_, output_region_;
  std::vector<std::vector<Index>> in_, out_, boundary_;
};

}  // namespace dsmon
