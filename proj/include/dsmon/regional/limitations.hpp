#pragma once

#include "dsmon/regional/region_model.hpp"

#include <array>
#include <optional>
#include <string>

namespace dsmon {

/// One limitation item. `fires` means its conclusion applies to the
/// hypothesis; `witness` holds a competing local set (L2, L4) or the external
/// channels in global numbering (L6).
struct LimitationItem {
  std::string name;
  bool fires = false;
  std::string conclusion;
  std::optional<AttackSet> witness;
};

struct LimitationReport {
  Index region = 0;
  AttackSet local;
  std::array<LimitationItem, 6> items;  ///< L1 .. L6

  const LimitationItem& operator[](int i) const { return items[static_cast<std::size_t>(i - 1)]; }
  /// The decoupled procedure provably detects K_i (L3 holds, L1 and L5 do not).
  bool decoupled_detectable() const;
  /// The decoupled procedure provably identifies K_i (L4 holds, L2 and L5 do not).
  bool decoupled_identifiable() const;
};

/// Evaluates L1..L6 for the local hypothesis K_i of a region. `global`, when
/// given, is the network-wide attack set used by L6. Competing sets R_i range
/// over |R_i| <= |K_i| with R_i not contained in K_i, within `budget`.
LimitationReport check_decoupled_limitations(const RegionModel& region, const AttackSet& local,
                                             double budget = 1e5,
                                             const Partition* partition = nullptr,
                                             const std::optional<AttackSet>& global = std::nullopt,
                                             const NumericPolicy& policy = {});

/// Invariant zeros (or a rank-deficient pencil) of (E, A, B, C, D) after
/// compressing B and D to independent columns of [B; D].
bool has_zero_dynamics(const Matrix& e, const Matrix& a, const Matrix& b, const Matrix& c,
                       const Matrix& d, const NumericPolicy& policy = {});

}  // namespace dsmon
