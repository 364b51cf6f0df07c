#include "dsmon/regional/limitations.hpp"

#include "dsmon/core/linalg.hpp"
#include "dsmon/identification/identify.hpp"

namespace dsmon {

bool LimitationReport::decoupled_detectable() const {
  return items[2].fires && !items[0].fires && !items[4].fires;
}

bool LimitationReport::decoupled_identifiable() const {
  return items[3].fires && !items[1].fires && !items[4].fires;
}

bool has_zero_dynamics(const Matrix& e, const Matrix& a, const Matrix& b, const Matrix& c,
                       const Matrix& d, const NumericPolicy& policy) {
  const Matrix stacked = linalg::vstack(b, d);
  const Matrix basis = linalg::orth(stacked, policy, stacked.norm());
  const Matrix bc = basis.topRows(b.rows());
  const Matrix dc = basis.bottomRows(d.rows());
  return invariant_zeros(e, a, bc, c, dc, policy).has_zero_dynamics;
}

namespace {

// First R with |R| <= |K|, R not inside K, for which [extra B_{K u R}] has zero dynamics.
std::optional<AttackSet> competing_set(const RegionModel& r, const AttackSet& k,
                                       const Matrix& extra, double budget,
                                       const NumericPolicy& policy) {
  const auto candidates =
      enumerate_candidates(r.channels(), k.size(), CardinalityMode::up_to, budget);
  const Matrix zero_d = Matrix::Zero(r.p(), extra.cols());
  for (const AttackSet& cand : candidates) {
    if (cand.empty() || cand.set_intersection(k) == cand) continue;
    const AttackSet both = k.set_union(cand);
    const Matrix b = linalg::hstack(extra, r.B_of(both));
    const Matrix d = linalg::hstack(zero_d, r.D_of(both));
    if (has_zero_dynamics(r.E, r.A, b, r.C, d, policy)) return cand;
  }
  return std::nullopt;
}

}  // namespace

LimitationReport check_decoupled_limitations(const RegionModel& region, const AttackSet& local,
                                             double budget, const Partition* partition,
                                             const std::optional<AttackSet>& global,
                                             const NumericPolicy& policy) {
  local.validate(region.channels());
  LimitationReport rep;
  rep.region = region.index;
  rep.local = local;
  auto& it = rep.items;
  for (int i = 0; i < 6; ++i) it[static_cast<std::size_t>(i)].name = "L" + std::to_string(i + 1);

  const Matrix bk = region.B_of(local);
  const Matrix dk = region.D_of(local);
  const Matrix bb = region.Bb;
  const Matrix no_cols(region.n(), 0);

  it[0].fires = !local.empty() && has_zero_dynamics(region.E, region.A, bk, region.C, dk, policy);
  it[0].conclusion = it[0].fires ? "invariant zeros: not detectable" : "no invariant zeros";

  it[1].witness = competing_set(region, local, no_cols, budget, policy);
  it[1].fires = it[1].witness.has_value();
  it[1].conclusion = it[1].fires ? "competing set with zeros: not identifiable"
                                 : "no competing set with zeros";

  const bool interior = !local.empty() && !region.on_boundary(local);
  const Matrix bd_d = linalg::hstack(Matrix::Zero(region.p(), bb.cols()), dk);
  it[2].fires = interior && !has_zero_dynamics(region.E, region.A, linalg::hstack(bb, bk),
                                               region.C, bd_d, policy);
  it[2].conclusion = it[2].fires ? "detectable with the coupling as unknown input"
                                 : "detectability not granted";

  if (interior) {
    it[3].witness = competing_set(region, local, bb, budget, policy);
    it[3].fires = !it[3].witness.has_value();
  }
  it[3].conclusion = it[3].fires ? "identifiable with the coupling as unknown input"
                                 : "identifiability not granted";

  it[4].fires = !local.empty() && region.on_boundary(local);
  it[4].conclusion = it[4].fires ? "boundary attack: not detectable and not identifiable"
                                 : "not a boundary attack";

  if (global && partition) {
    std::vector<Index> outside;
    const AttackSet mine = global_attack_set(*partition, region.index,
                                             local_attack_set(*partition, region.index, *global));
    for (Index ch : global->indices()) {
      if (!mine.contains(ch)) outside.push_back(ch);
    }
    it[5].fires = !outside.empty();
    if (it[5].fires) it[5].witness = AttackSet(outside);
  }
  it[5].conclusion = it[5].fires ? "external attack channels: not detectable by this region"
                                 : "no external attack channels";
  return rep;
}

}  // namespace dsmon
