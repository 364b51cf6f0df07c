#pragma once

#include "dsmon/core/descriptor_system.hpp"
#include "dsmon/detection/partition.hpp"

#include <optional>
#include <vector>

namespace dsmon {

/// The i-th decoupled system
///   E_i x_i' = A_i x_i + Bb_i f_i + B_K u_K,   y_i = C_i x_i + D_K u_K,
/// where f_i stacks the states of the in-neighbour regions.
///
/// Local attack channels follow the attack layout of the region: index
/// j < n_i is the state equation of nodes[j], index n_i + j the measurement
/// outputs[j].
struct RegionModel {
  Index index = 0;
  Matrix E, A, C;
  Matrix Bb;                         ///< [A_ij ...] over in-neighbours j
  std::vector<Index> neighbors;      ///< in-neighbour regions, column blocks of Bb in order
  std::vector<Index> neighbor_offsets;
  std::vector<Index> nodes;          ///< global node numbers (0-based)
  std::vector<Index> outputs;        ///< global measurement numbers (0-based)
  std::vector<Index> boundary;       ///< local node indices with outside couplings
  std::optional<AttackSet> hypothesis;

  Index n() const { return A.rows(); }
  Index p() const { return C.rows(); }
  Index channels() const { return n() + p(); }
  Matrix B_of(const AttackSet& local) const;
  Matrix D_of(const AttackSet& local) const;
  /// Columns of Bb belonging to in-neighbour `region`.
  Matrix coupling_block(Index region) const;
  /// True when every channel of the set is a boundary state equation.
  bool on_boundary(const AttackSet& local) const;
};

RegionModel region_model(const Partition& partition, Index i);
std::vector<RegionModel> region_models(const Partition& partition);

/// Global attack channels falling into region i, in local numbering.
AttackSet local_attack_set(const Partition& partition, Index i, const AttackSet& global);
/// Local channels of region i in global numbering.
AttackSet global_attack_set(const Partition& partition, Index i, const AttackSet& local);

}  // namespace dsmon
