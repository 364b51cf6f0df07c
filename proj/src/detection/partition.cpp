#include "dsmon/detection/partition.hpp"

#include "dsmon/core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dsmon {

Partition::Partition(const DescriptorSystem& sys, std::vector<std::vector<Index>> regions,
                     double block_tol)
    : sys_(sys), n_(sys.n()), p_(sys.p()), nodes_(std::move(regions)) {
  if (nodes_.empty()) throw DimensionError("partition: no regions");
  node_region_.assign(n_, -1);
  for (std::size_t r = 0; r < nodes_.size(); ++r) {
    auto& v = nodes_[r];
    if (v.empty()) throw DimensionError("partition: region " + std::to_string(r + 1) + " is empty");
    std::sort(v.begin(), v.end());
    for (Index node : v) {
      if (node < 0 || node >= n_) throw DimensionError("partition: node out of range");
      if (node_region_[node] >= 0) {
        throw DimensionError("partition: node " + std::to_string(node + 1) + " in two regions");
      }
      node_region_[node] = static_cast<Index>(r);
    }
  }
  for (Index k = 0; k < n_; ++k) {
    if (node_region_[k] < 0) throw DimensionError("partition: node " + std::to_string(k + 1) + " not covered");
  }

  const Matrix& e = sys.E();
  for (Index i = 0; i < n_; ++i) {
    for (Index j = 0; j < n_; ++j) {
      if (node_region_[i] != node_region_[j] && std::abs(e(i, j)) > block_tol) {
        throw ConsistencyError("partition: E is not block diagonal (entry " + std::to_string(i + 1) +
                               "," + std::to_string(j + 1) + ")");
      }
    }
  }

  outputs_.assign(nodes_.size(), {});
  output_region_.assign(p_, -1);
  const Matrix& c = sys.C();
  for (Index o = 0; o < p_; ++o) {
    Index owner = -1;
    double best = 0.0;
    for (Index k = 0; k < n_; ++k) {
      if (std::abs(c(o, k)) > best) {
        best = std::abs(c(o, k));
        owner = node_region_[k];
      }
    }
    if (owner < 0) throw ConsistencyError("partition: measurement " + std::to_string(o + 1) + " is identically zero");
    for (Index k = 0; k < n_; ++k) {
      if (node_region_[k] != owner && std::abs(c(o, k)) > block_tol) {
        throw ConsistencyError("partition: C is not block diagonal (measurement " +
                               std::to_string(o + 1) + ")");
      }
    }
    output_region_[o] = owner;
    outputs_[owner].push_back(o);
  }

  const Matrix& a = sys.A();
  const std::size_t nr = nodes_.size();
  in_.assign(nr, {});
  out_.assign(nr, {});
  boundary_.assign(nr, {});
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      if (i == j) continue;
      if (linalg::max_abs(block(a, static_cast<Index>(i), static_cast<Index>(j))) > 0.0) {
        in_[i].push_back(static_cast<Index>(j));
        out_[j].push_back(static_cast<Index>(i));
      }
    }
    for (Index node : nodes_[i]) {
      for (Index k = 0; k < n_; ++k) {
        if (node_region_[k] != static_cast<Index>(i) && a(node, k) != 0.0) {
          boundary_[i].push_back(node);
          break;
        }
      }
    }
  }
  for (auto& v : out_) std::sort(v.begin(), v.end());
}

Partition Partition::from_one_based(const DescriptorSystem& sys,
                                    const std::vector<std::vector<long long>>& regions) {
  std::vector<std::vector<Index>> zero;
  for (const auto& r : regions) {
    std::vector<Index> v;
    for (long long k : r) {
      if (k < 1) throw DimensionError("partition: node numbers start at 1");
      v.push_back(static_cast<Index>(k - 1));
    }
    zero.push_back(std::move(v));
  }
  return Partition(sys, std::move(zero));
}

Partition Partition::single(const DescriptorSystem& sys) {
  std::vector<Index> all(sys.n());
  for (Index k = 0; k < sys.n(); ++k) all[k] = k;
  return Partition(sys, {all});
}

Matrix Partition::block(const Matrix& m, Index i, Index j) const {
  return linalg::select_block(m, nodes_.at(i), nodes_.at(j));
}

Matrix Partition::local_E(Index i) const { return block(sys_.E(), i, i); }
Matrix Partition::local_A(Index i) const { return block(sys_.A(), i, i); }
Matrix Partition::local_C(Index i) const {
  return linalg::select_block(sys_.C(), outputs_.at(i), nodes_.at(i));
}

Matrix Partition::local_gain(const Matrix& g, Index i) const {
  if (g.rows() != n_ || g.cols() != p_) throw DimensionError("local_gain: G must be n x p");
  return linalg::select_block(g, nodes_.at(i), outputs_.at(i));
}

Matrix Partition::coupling_row(const Matrix& a, Index i) const {
  Matrix row = linalg::select_rows(a, nodes_.at(i));
  for (Index k : nodes_.at(i)) row.col(k).setZero();
  return row;
}

Matrix Partition::diagonal_part(const Matrix& a) const {
  if (a.rows() != n_ || a.cols() != n_) throw DimensionError("diagonal_part: matrix must be n x n");
  Matrix d = Matrix::Zero(n_, n_);
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j)
      if (node_region_[i] == node_region_[j]) d(i, j) = a(i, j);
  return d;
}

Matrix Partition::coupling_part(const Matrix& a) const {
  if (a.rows() != n_ || a.cols() != n_) throw DimensionError("coupling_part: matrix must be n x n");
  Matrix c = Matrix::Zero(n_, n_);
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j)
      if (node_region_[i] != node_region_[j]) c(i, j) = a(i, j);
  return c;
}

Matrix Partition::assemble_gain(const std::vector<Matrix>& local) const {
  if (static_cast<Index>(local.size()) != count()) throw DimensionError("assemble_gain: one gain per region");
  Matrix g = Matrix::Zero(n_, p_);
  for (Index r = 0; r < count(); ++r) {
    const auto& rows = nodes_[r];
    const auto& cols = outputs_[r];
    if (local[r].rows() != static_cast<Index>(rows.size()) || local[r].cols() != static_cast<Index>(cols.size())) {
      throw DimensionError("assemble_gain: gain of region " + std::to_string(r + 1) + " has wrong shape");
    }
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t b = 0; b < cols.size(); ++b) g(rows[a], cols[b]) = local[r](a, b);
  }
  return g;
}

Matrix Partition::restrict_rows(const Matrix& x, Index i) const {
  if (x.rows() != n_) throw DimensionError("restrict_rows: expected n rows");
  return linalg::select_rows(x, nodes_.at(i));
}

Matrix Partition::restrict_output_rows(const Matrix& y, Index i) const {
  if (y.rows() != p_) throw DimensionError("restrict_output_rows: expected p rows");
  return linalg::select_rows(y, outputs_.at(i));
}

}  // namespace dsmon
