#pragma once

#include "dsmon/identification/identification_filter.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dsmon {

struct CandidateResult {
  AttackSet set;
  double max_residual = 0.0;
  bool zero = false;
  /// False when no filter could be built for the candidate.
  bool feasible = true;
  std::string note;
};

struct IdentificationVerdict {
  std::vector<CandidateResult> candidates;  ///< lexicographic order
  /// Zero-residual candidates of minimal cardinality (ties all reported).
  std::vector<AttackSet> identified;
  /// Intersection of every zero-residual candidate.
  AttackSet intersection;
  double threshold = 0.0;
  bool conclusive() const { return !identified.empty(); }
};

enum class CardinalityMode {
  exact,       ///< candidates with |K| = k
  up_to,       ///< candidates with |K| <= k
};

struct IdentifyOptions {
  CardinalityMode mode = CardinalityMode::exact;
  double budget = 1e5;
  /// Absolute residual threshold; zero selects the relative rule.
  double absolute_threshold = 0.0;
  Execution execution = Execution::parallel;
};

/// Binomial coefficient as a double (saturates instead of overflowing).
double binomial(Index n, Index k);

/// All subsets of {0..universe-1} with the requested cardinalities, lexicographic.
std::vector<AttackSet> enumerate_candidates(Index universe, Index k, CardinalityMode mode,
                                            double budget);

/// Runs one identification filter per candidate and collects the zero-residual sets.
IdentificationVerdict identify(const DescriptorSystem& sys, const Trajectory& y, const Vector& x0,
                               Index k, const IdentifyOptions& opts = {},
                               const NumericPolicy& policy = {});

/// Same search with an arbitrary per-candidate evaluator returning the max
/// residual (or nullopt with a note when the candidate is infeasible).
using CandidateEvaluator = std::function<std::optional<double>(const AttackSet&, std::string&)>;
IdentificationVerdict identify_with(const std::vector<AttackSet>& candidates,
                                    const CandidateEvaluator& eval, double threshold,
                                    Execution execution = Execution::parallel);

}  // namespace dsmon
