#pragma once

#include "dsmon/core/trajectory.hpp"
#include "dsmon/geometry/subspace.hpp"
#include "dsmon/identification/identify.hpp"
#include "dsmon/regional/reconstruction.hpp"
#include "dsmon/regional/region_model.hpp"

#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dsmon {

/// State of region i known modulo F: x_i = xhat + (something in F).
struct RegionalEstimate {
  Index region = 0;
  Trajectory xhat;
  Subspace F;
  Index derivative_order = 0;
  /// Empty when the reconstruction succeeded; otherwise xhat = 0 and F is everything.
  std::string failure;
};

/// Reconstructs the state of a region treating the coupling Bb f as unknown input.
RegionalEstimate estimate_region(const RegionModel& region, const Trajectory& y_local,
                                 const SmoothingDifferentiator& sg = {},
                                 const NumericPolicy& policy = {});

struct Message {
  Index round = 0;
  Index sender = 0;    ///< 0-based region
  Index receiver = 0;  ///< 0-based region
  std::string payload_kind;
  std::size_t bytes = 0;
};

/// Append-only record of the exchanged messages.
class MessageLog {
 public:
  MessageLog() = default;
  MessageLog(const MessageLog& other);
  MessageLog& operator=(const MessageLog& other);

  void append(Message m);
  /// Sorted by (round, sender, receiver), insertion order among ties.
  std::vector<Message> entries() const;
  std::size_t size() const;
  /// Lines `round,sender,receiver,payload_kind,bytes` with 1-based regions.
  void write(std::ostream& out) const;

 private:
  mutable std::mutex mutex_;
  std::vector<Message> log_;
};

struct RegionalOptions {
  SmoothingDifferentiator sg;
  /// Residual verdicts use factor * (1 + max_t |y_i(t)|_inf).
  double residual_factor = 1e-3;
  double budget = 1e5;
  Execution execution = Execution::parallel;
  /// Optional local attack hypothesis per region, used only for the precondition check.
  std::vector<std::optional<AttackSet>> hypotheses;
};

enum class SafetyCriterion { none, c1, c2 };

struct RegionalVerdict {
  std::vector<RegionalEstimate> estimates;
  std::vector<Trajectory> residuals;
  std::vector<double> max_residual;  ///< +inf when no residual could be produced
  std::vector<double> threshold;
  std::vector<bool> zero;
  std::vector<SafetyCriterion> criterion;
  std::vector<std::string> reasons;  ///< non-empty for unclassifiable regions
  std::vector<Index> safe, suspect;  ///< partition of all regions
  std::vector<Index> unclassifiable; ///< subset of suspect
  std::map<Index, AttackSet> identified_local;  ///< filled by identify_regional
  MessageLog messages;
};

/// Steps S1 to S3: local reconstructions, exchange, residual filters driven by
/// the neighbours' estimates, and classification with criteria C1 and C2.
RegionalVerdict cooperative_round(const Partition& partition,
                                  const std::vector<RegionModel>& models, const Trajectory& y,
                                  const Vector& x0, const RegionalOptions& opts = {},
                                  const NumericPolicy& policy = {});

struct LocalIdentification {
  Index region = 0;
  IdentificationVerdict verdict;  ///< local channel numbering
  std::optional<AttackSet> local_set;   ///< unique minimal zero-residual set
  std::optional<AttackSet> global_set;
  double filters = 0.0;           ///< candidates evaluated
  /// Set by identify_regional when the local set lies on boundary nodes fed
  /// by a suspect in-neighbour that identified an attack of its own.
  std::optional<Index> explained_by;
};

/// Step S4 for one region, using the neighbours' transmitted estimates.
LocalIdentification local_identify(const Partition& partition, const RegionModel& region,
                                   const std::vector<RegionalEstimate>& estimates,
                                   const Trajectory& y, const Vector& x0, Index k,
                                   const RegionalOptions& opts = {},
                                   const NumericPolicy& policy = {});

struct RegionalIdentification {
  RegionalVerdict verdict;
  std::vector<LocalIdentification> locals;  ///< one per suspect region
  AttackSet identified;                     ///< union of the conclusive local sets not explained by a neighbour
  double filters = 0.0;                     ///< filters designed in S4
  double centralized_filters = 0.0;         ///< C(n + p, k)
};

/// S1 to S4 end to end, with local sets of cardinality at most k.
RegionalIdentification identify_regional(const Partition& partition, const Trajectory& y,
                                         const Vector& x0, Index k,
                                         const RegionalOptions& opts = {},
                                         const NumericPolicy& policy = {});

/// sum_i C(n_i + p_i, k), the filter count of the decoupled search over every region.
double regional_filter_count(const Partition& partition, Index k);

}  // namespace dsmon
