#include "dsmon/regional/region_model.hpp"

#include "dsmon/core/linalg.hpp"

#include <algorithm>
#include <string>

namespace dsmon {

Matrix RegionModel::B_of(const AttackSet& local) const {
  local.validate(channels());
  Matrix b = Matrix::Zero(n(), local.size());
  for (Index j = 0; j < local.size(); ++j) {
    const Index ch = local.indices()[static_cast<std::size_t>(j)];
    if (ch < n()) b(ch, j) = 1.0;
  }
  return b;
}

Matrix RegionModel::D_of(const AttackSet& local) const {
  local.validate(channels());
  Matrix d = Matrix::Zero(p(), local.size());
  for (Index j = 0; j < local.size(); ++j) {
    const Index ch = local.indices()[static_cast<std::size_t>(j)];
    if (ch >= n()) d(ch - n(), j) = 1.0;
  }
  return d;
}

Matrix RegionModel::coupling_block(Index region) const {
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    if (neighbors[k] != region) continue;
    const Index end = k + 1 < neighbors.size() ? neighbor_offsets[k + 1] : Bb.cols();
    return Bb.middleCols(neighbor_offsets[k], end - neighbor_offsets[k]);
  }
  throw DimensionError("region " + std::to_string(region + 1) + " is not an in-neighbour of " +
                       std::to_string(index + 1));
}

bool RegionModel::on_boundary(const AttackSet& local) const {
  for (Index ch : local.indices()) {
    if (ch >= n()) return false;
    if (std::find(boundary.begin(), boundary.end(), ch) == boundary.end()) return false;
  }
  return true;
}

RegionModel region_model(const Partition& partition, Index i) {
  const Matrix& a = partition.system().A();
  RegionModel r;
  r.index = i;
  r.E = partition.local_E(i);
  r.A = partition.local_A(i);
  r.C = partition.local_C(i);
  r.nodes = partition.nodes(i);
  r.outputs = partition.outputs(i);
  r.neighbors = partition.in_neighbors(i);
  Index cols = 0;
  for (Index j : r.neighbors) {
    r.neighbor_offsets.push_back(cols);
    cols += static_cast<Index>(partition.nodes(j).size());
  }
  r.Bb = Matrix::Zero(r.n(), cols);
  for (std::size_t k = 0; k < r.neighbors.size(); ++k) {
    const Matrix blk = partition.block(a, i, r.neighbors[k]);
    r.Bb.middleCols(r.neighbor_offsets[k], blk.cols()) = blk;
  }
  for (Index node : partition.boundary_nodes(i)) {
    const auto it = std::find(r.nodes.begin(), r.nodes.end(), node);
    r.boundary.push_back(static_cast<Index>(it - r.nodes.begin()));
  }
  std::sort(r.boundary.begin(), r.boundary.end());
  return r;
}

std::vector<RegionModel> region_models(const Partition& partition) {
  std::vector<RegionModel> out;
  for (Index i = 0; i < partition.count(); ++i) out.push_back(region_model(partition, i));
  return out;
}

AttackSet local_attack_set(const Partition& partition, Index i, const AttackSet& global) {
  const Index n = partition.n();
  global.validate(n + partition.p());
  const auto& nodes = partition.nodes(i);
  const auto& outs = partition.outputs(i);
  const Index ni = static_cast<Index>(nodes.size());
  std::vector<Index> local;
  for (Index ch : global.indices()) {
    if (ch < n) {
      const auto it = std::find(nodes.begin(), nodes.end(), ch);
      if (it != nodes.end()) local.push_back(static_cast<Index>(it - nodes.begin()));
    } else {
      const auto it = std::find(outs.begin(), outs.end(), ch - n);
      if (it != outs.end()) local.push_back(ni + static_cast<Index>(it - outs.begin()));
    }
  }
  return AttackSet(local);
}

AttackSet global_attack_set(const Partition& partition, Index i, const AttackSet& local) {
  const auto& nodes = partition.nodes(i);
  const auto& outs = partition.outputs(i);
  const Index ni = static_cast<Index>(nodes.size());
  local.validate(ni + static_cast<Index>(outs.size()));
  std::vector<Index> global;
  for (Index ch : local.indices()) {
    global.push_back(ch < ni ? nodes[static_cast<std::size_t>(ch)]
                             : partition.n() + outs[static_cast<std::size_t>(ch - ni)]);
  }
  return AttackSet(global);
}

}  // namespace dsmon
