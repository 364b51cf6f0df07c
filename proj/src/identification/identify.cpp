#include "dsmon/identification/identify.hpp"

#include "dsmon/detection/detection_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dsmon {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (Index i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

std::vector<AttackSet> enumerate_candidates(Index universe, Index k, CardinalityMode mode,
                                            double budget) {
  if (k < 0 || k > universe) throw DimensionError("cardinality out of range");
  const Index lo = mode == CardinalityMode::exact ? k : 0;
  double total = 0.0;
  for (Index c = lo; c <= k; ++c) total += binomial(universe, c);
  if (total > budget) {
    std::ostringstream msg;
    msg << "candidate enumeration needs " << total << " filters, above the budget of " << budget;
    throw BudgetExceededError(msg.str(), total);
  }
  std::vector<AttackSet> out;
  out.reserve(static_cast<std::size_t>(total));
  for (Index c = lo; c <= k; ++c) {
    std::vector<Index> idx(c);
    for (Index i = 0; i < c; ++i) idx[i] = i;
    while (true) {
      out.emplace_back(idx);
      Index i = c - 1;
      while (i >= 0 && idx[i] == universe - c + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (Index j = i + 1; j < c; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

IdentificationVerdict identify_with(const std::vector<AttackSet>& candidates,
                                    const CandidateEvaluator& eval, double threshold,
                                    Execution execution) {
  IdentificationVerdict v;
  v.threshold = threshold;
  v.candidates.resize(candidates.size());
  auto run_one = [&](std::size_t i) {
    CandidateResult& res = v.candidates[i];
    res.set = candidates[i];
    try {
      const auto value = eval(candidates[i], res.note);
      if (value) {
        res.max_residual = *value;
        res.zero = *value <= threshold;
      } else {
        res.feasible = false;
      }
    } catch (const DesignInfeasibleError& ex) {
      res.feasible = false;
      res.note = ex.what();
    } catch (const GeometryError& ex) {
      res.feasible = false;
      res.note = ex.what();
    }
  };
  const long long count = static_cast<long long>(candidates.size());
  if (execution == Execution::parallel) {
    bool failed = false;
    std::string message;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
      try {
        run_one(static_cast<std::size_t>(i));
      } catch (const std::exception& ex) {
#pragma omp critical(dsmon_identify_error)
        {
          if (!failed) message = ex.what();
          failed = true;
        }
      }
    }
    if (failed) throw InternalError("candidate evaluation failed: " + message);
  } else {
    for (long long i = 0; i < count; ++i) run_one(static_cast<std::size_t>(i));
  }

  Index best = -1;
  bool first = true;
  for (const auto& res : v.candidates) {
    if (!res.zero) continue;
    if (best < 0 || res.set.size() < best) best = res.set.size();
    v.intersection = first ? res.set : v.intersection.set_intersection(res.set);
    first = false;
  }
  for (const auto& res : v.candidates) {
    if (res.zero && res.set.size() == best) v.identified.push_back(res.set);
  }
  return v;
}

IdentificationVerdict identify(const DescriptorSystem& sys, const Trajectory& y, const Vector& x0,
                               Index k, const IdentifyOptions& opts, const NumericPolicy& policy) {
  if (!sys.has_attack_layout()) throw DimensionError("identify expects the attack layout B = [I 0], D = [0 I]");
  const auto candidates = enumerate_candidates(sys.m(), k, opts.mode, opts.budget);
  const double thr = opts.absolute_threshold > 0.0 ? opts.absolute_threshold
                                                   : residual_threshold(y, policy.residual_factor);
  auto eval = [&](const AttackSet& cand, std::string& note) -> std::optional<double> {
    const IdentificationFilter f = build_identification_filter(sys, cand, policy);
    try {
      return run_identification_filter(f, y, x0, nullptr, policy).sup_norm();
    } catch (const ConsistencyError& ex) {
      // the hypothesis cannot even explain the initial algebraic constraints
      note = ex.what();
      return std::numeric_limits<double>::infinity();
    }
  };
  return identify_with(candidates, eval, thr, opts.execution);
}

}  // namespace dsmon
