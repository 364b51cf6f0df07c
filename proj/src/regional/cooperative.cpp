#include "dsmon/regional/cooperative.hpp"

#include "dsmon/core/linalg.hpp"
#include "dsmon/identification/identification_filter.hpp"
#include "dsmon/regional/limitations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace dsmon {

RegionalEstimate estimate_region(const RegionModel& region, const Trajectory& y_local,
                                 const SmoothingDifferentiator& sg, const NumericPolicy& policy) {
  RegionalEstimate est;
  est.region = region.index;
  const Index n = region.n();
  const Matrix bb = linalg::orth(region.Bb, policy, region.Bb.norm());
  try {
    const PartitionedRealization pr = partition_by_svd(
        region.E, region.A, bb, region.C, Matrix::Zero(region.p(), bb.cols()), policy);
    const Reconstruction rec = reconstruct_states(pr.model, y_local, sg, policy);
    const Index n1 = pr.model.n1();
    Matrix stacked(n, y_local.size());
    stacked << rec.x1.samples, rec.x2.samples;
    est.xhat = Trajectory("xhat", y_local.times, pr.V * stacked);
    Matrix f = Matrix::Zero(n, rec.V1.dim() + rec.V2.dim());
    f.topLeftCorner(n1, rec.V1.dim()) = rec.V1.basis();
    f.bottomRightCorner(n - n1, rec.V2.dim()) = rec.V2.basis();
    est.F = Subspace::from_orthonormal(pr.V * f);
    est.derivative_order = rec.derivative_order;
  } catch (const ResolutionError& ex) {
    est.failure = ex.what();
  } catch (const GeometryError& ex) {
    est.failure = ex.what();
  }
  if (!est.failure.empty()) {
    est.xhat = Trajectory("xhat", y_local.times, Matrix::Zero(n, y_local.size()));
    est.F = Subspace::whole(n);
  }
  return est;
}

MessageLog::MessageLog(const MessageLog& other) : log_(other.entries()) {}

MessageLog& MessageLog::operator=(const MessageLog& other) {
  if (this != &other) {
    auto copy = other.entries();
    std::lock_guard<std::mutex> lock(mutex_);
    log_ = std::move(copy);
  }
  return *this;
}

void MessageLog::append(Message m) {
  std::lock_guard<std::mutex> lock(mutex_);
  log_.push_back(std::move(m));
}

std::vector<Message> MessageLog::entries() const {
  std::vector<Message> out;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    out = log_;
  }
  std::stable_sort(out.begin(), out.end(), [](const Message& a, const Message& b) {
    if (a.round != b.round) return a.round < b.round;
    if (a.sender != b.sender) return a.sender < b.sender;
    return a.receiver < b.receiver;
  });
  return out;
}

std::size_t MessageLog::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_.size();
}

void MessageLog::write(std::ostream& out) const {
  out << "round,sender,receiver,payload_kind,bytes\n";
  for (const Message& m : entries()) {
    out << m.round << ',' << m.sender + 1 << ',' << m.receiver + 1 << ',' << m.payload_kind << ','
        << m.bytes << '\n';
  }
}

namespace {

template <class F>
void for_regions(Index count, Execution execution, F&& body) {
  if (execution == Execution::parallel) {
    bool failed = false;
    std::string message;
#pragma omp parallel for schedule(dynamic)
    for (Index i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (const std::exception& ex) {
#pragma omp critical(dsmon_regional_error)
        {
          if (!failed) message = ex.what();
          failed = true;
        }
      }
    }
    if (failed) throw InternalError("regional step failed: " + message);
  } else {
    for (Index i = 0; i < count; ++i) body(i);
  }
}

// Bb_i F_i: the part of the neighbours' states left unknown after S1.
Matrix coupling_signature(const RegionModel& r, const std::vector<RegionalEstimate>& est,
                          const NumericPolicy& policy) {
  Matrix sig(r.n(), 0);
  for (Index j : r.neighbors) {
    sig = linalg::hstack(sig, r.coupling_block(j) * est[static_cast<std::size_t>(j)].F.basis());
  }
  return linalg::orth(sig, policy, sig.norm());
}

// x_bar: the neighbours' estimates stacked in the column order of Bb.
Trajectory neighbor_estimates(const RegionModel& r, const std::vector<RegionalEstimate>& est,
                              const std::vector<double>& times) {
  Matrix v(r.Bb.cols(), static_cast<Index>(times.size()));
  for (std::size_t k = 0; k < r.neighbors.size(); ++k) {
    const Trajectory& x = est[static_cast<std::size_t>(r.neighbors[k])].xhat;
    v.middleRows(r.neighbor_offsets[k], x.dim()) = x.samples;
  }
  return Trajectory("x_bar", times, v);
}

double run_residual(const IdentificationFilter& f, const Trajectory& y, const Vector& x0,
                    const Trajectory& known, const NumericPolicy& policy, Trajectory* out,
                    std::string& note) {
  try {
    Trajectory r = run_identification_filter(f, y, x0, &known, policy);
    const double v = r.sup_norm();
    if (out) *out = std::move(r);
    return v;
  } catch (const ConsistencyError& ex) {
    note = ex.what();
    return std::numeric_limits<double>::infinity();
  }
}

double local_threshold(const Trajectory& y, double factor) {
  return factor * (1.0 + (y.size() ? y.samples.cwiseAbs().maxCoeff() : 0.0));
}

}  // namespace

RegionalVerdict cooperative_round(const Partition& partition,
                                  const std::vector<RegionModel>& models, const Trajectory& y,
                                  const Vector& x0, const RegionalOptions& opts,
                                  const NumericPolicy& policy) {
  const Index count = partition.count();
  if (static_cast<Index>(models.size()) != count) throw DimensionError("one region model per region");
  if (y.dim() != partition.p()) throw DimensionError("measurement dimension mismatch");
  if (x0.size() != partition.n()) throw DimensionError("initial state has wrong dimension");
  if (!opts.hypotheses.empty() && static_cast<Index>(opts.hypotheses.size()) != count) {
    throw DimensionError("hypotheses must list every region");
  }
  y.validate();
  const auto sz = static_cast<std::size_t>(count);
  RegionalVerdict v;
  v.estimates.resize(sz);
  v.residuals.resize(sz);
  v.max_residual.assign(sz, std::numeric_limits<double>::infinity());
  v.threshold.assign(sz, 0.0);
  v.zero.assign(sz, false);
  v.criterion.assign(sz, SafetyCriterion::none);
  v.reasons.assign(sz, {});

  std::vector<Trajectory> y_local(sz);
  for (Index i = 0; i < count; ++i) {
    y_local[static_cast<std::size_t>(i)] =
        y.rows(partition.outputs(i), "y" + std::to_string(i + 1));
  }

  // S1: estimation
  for_regions(count, opts.execution, [&](Index i) {
    const auto s = static_cast<std::size_t>(i);
    v.estimates[s] = estimate_region(models[s], y_local[s], opts.sg, policy);
  });
  const std::size_t samples = y.times.size();
  for (Index i = 0; i < count; ++i) {
    const RegionalEstimate& e = v.estimates[static_cast<std::size_t>(i)];
    for (Index j : partition.out_neighbors(i)) {
      v.messages.append({1, i, j, "estimate", sizeof(double) * samples * static_cast<std::size_t>(e.xhat.dim())});
      v.messages.append({1, i, j, "uncertainty",
                         sizeof(double) * static_cast<std::size_t>(e.F.ambient_dim() * e.F.dim())});
    }
  }

  // S2: residual generation
  for_regions(count, opts.execution, [&](Index i) {
    const auto s = static_cast<std::size_t>(i);
    const RegionModel& r = models[s];
    std::string& reason = v.reasons[s];
    for (Index j : r.neighbors) {
      const auto& fail = v.estimates[static_cast<std::size_t>(j)].failure;
      if (!fail.empty()) reason += "estimate of region " + std::to_string(j + 1) + " unavailable (" + fail + "); ";
    }
    const Matrix bb = linalg::orth(r.Bb, policy, r.Bb.norm());
    if (has_zero_dynamics(r.E, r.A, bb, r.C, Matrix::Zero(r.p(), bb.cols()), policy)) {
      reason += "(E_i, A_i, Bb_i, C_i) has invariant zeros; ";
    }
    const Matrix sig = coupling_signature(r, v.estimates, policy);
    if (!opts.hypotheses.empty() && opts.hypotheses[s]) {
      const AttackSet& k = *opts.hypotheses[s];
      const Matrix b = linalg::hstack(sig, r.B_of(k));
      const Matrix d = linalg::hstack(Matrix::Zero(r.p(), sig.cols()), r.D_of(k));
      if (has_zero_dynamics(r.E, r.A, b, r.C, d, policy)) {
        reason += "(E_i, A_i, [Bb_i F_i B_K], C_i) has invariant zeros for " + k.to_string() + "; ";
      }
    }
    v.threshold[s] = local_threshold(y_local[s], opts.residual_factor);
    try {
      const IdentificationFilter f = build_signature_filter(
          r.E, r.A, r.C, sig, Matrix::Zero(r.p(), sig.cols()), r.Bb, policy);
      const Trajectory known = neighbor_estimates(r, v.estimates, y.times);
      std::string note;
      v.max_residual[s] = run_residual(f, y_local[s], partition.restrict_rows(x0, i), known,
                                       policy, &v.residuals[s], note);
      if (!note.empty()) reason += note + "; ";
    } catch (const DesignInfeasibleError& ex) {
      reason += std::string("no residual filter: ") + ex.what() + "; ";
    } catch (const GeometryError& ex) {
      reason += std::string("no residual filter: ") + ex.what() + "; ";
    }
    v.zero[s] = v.max_residual[s] <= v.threshold[s];
  });
  for (Index j = 0; j < count; ++j) {
    for (Index i : partition.in_neighbors(j)) v.messages.append({2, j, i, "residual_flag", 1});
  }

  // S3: classification
  for (Index i = 0; i < count; ++i) {
    const auto s = static_cast<std::size_t>(i);
    if (!v.reasons[s].empty()) {
      v.reasons[s].erase(v.reasons[s].size() - 2);
      v.unclassifiable.push_back(i);
      v.suspect.push_back(i);
      continue;
    }
    if (v.zero[s]) {
      v.criterion[s] = SafetyCriterion::c1;
    } else {
      bool some_zero = false, some_loud = false;
      for (Index j : partition.out_neighbors(i)) {
        const auto t = static_cast<std::size_t>(j);
        if (std::isinf(v.max_residual[t])) continue;
        (v.zero[t] ? some_zero : some_loud) = true;
      }
      if (some_zero && some_loud) v.criterion[s] = SafetyCriterion::c2;
    }
    (v.criterion[s] == SafetyCriterion::none ? v.suspect : v.safe).push_back(i);
  }
  return v;
}

LocalIdentification local_identify(const Partition& partition, const RegionModel& region,
                                   const std::vector<RegionalEstimate>& estimates,
                                   const Trajectory& y, const Vector& x0, Index k,
                                   const RegionalOptions& opts, const NumericPolicy& policy) {
  LocalIdentification out;
  out.region = region.index;
  const Index i = region.index;
  const Trajectory y_i = y.rows(partition.outputs(i), "y" + std::to_string(i + 1));
  const Vector x0_i = partition.restrict_rows(x0, i);
  const Matrix sig = coupling_signature(region, estimates, policy);
  const Trajectory known = neighbor_estimates(region, estimates, y.times);
  const auto candidates =
      enumerate_candidates(region.channels(), k, CardinalityMode::up_to, opts.budget);
  out.filters = static_cast<double>(candidates.size());
  auto eval = [&](const AttackSet& cand, std::string& note) -> std::optional<double> {
    const Matrix b = linalg::hstack(sig, region.B_of(cand));
    const Matrix d = linalg::hstack(Matrix::Zero(region.p(), sig.cols()), region.D_of(cand));
    const IdentificationFilter f = build_signature_filter(region.E, region.A, region.C, b, d,
                                                          region.Bb, policy);
    return run_residual(f, y_i, x0_i, known, policy, nullptr, note);
  };
  out.verdict = identify_with(candidates, eval, local_threshold(y_i, opts.residual_factor),
                              opts.execution);
  if (out.verdict.identified.size() == 1) {
    out.local_set = out.verdict.identified.front();
    out.global_set = global_attack_set(partition, i, *out.local_set);
  }
  return out;
}

RegionalIdentification identify_regional(const Partition& partition, const Trajectory& y,
                                         const Vector& x0, Index k,
                                         const RegionalOptions& opts,
                                         const NumericPolicy& policy) {
  RegionalIdentification out;
  const auto models = region_models(partition);
  out.verdict = cooperative_round(partition, models, y, x0, opts, policy);
  for (Index i : out.verdict.suspect) {
    LocalIdentification li = local_identify(partition, models[static_cast<std::size_t>(i)],
                                            out.verdict.estimates, y, x0, k, opts, policy);
    out.filters += li.filters;
    out.locals.push_back(std::move(li));
  }
  // A wrong estimate of a corrupted neighbour looks like an attack on the
  // boundary nodes it feeds. Such boundary-only sets are attributed to a
  // suspect in-neighbour that found an attack of its own.
  std::vector<bool> primary(out.locals.size(), false);
  for (std::size_t a = 0; a < out.locals.size(); ++a) {
    const LocalIdentification& li = out.locals[a];
    primary[a] = li.local_set && !models[static_cast<std::size_t>(li.region)].on_boundary(*li.local_set);
  }
  for (std::size_t a = 0; a < out.locals.size(); ++a) {
    LocalIdentification& li = out.locals[a];
    if (!li.global_set) continue;
    if (!primary[a] && !li.local_set->empty()) {
      for (Index j : partition.in_neighbors(li.region)) {
        for (std::size_t b = 0; b < out.locals.size(); ++b) {
          if (out.locals[b].region == j && primary[b]) li.explained_by = j;
        }
      }
    }
    if (li.explained_by) continue;
    out.verdict.identified_local[li.region] = *li.local_set;
    out.identified = out.identified.set_union(*li.global_set);
  }
  out.centralized_filters = binomial(partition.n() + partition.p(), k);
  return out;
}

double regional_filter_count(const Partition& partition, Index k) {
  double total = 0.0;
  for (Index i = 0; i < partition.count(); ++i) {
    total += binomial(static_cast<Index>(partition.nodes(i).size() + partition.outputs(i).size()), k);
  }
  return total;
}

}  // namespace dsmon
