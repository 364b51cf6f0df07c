#include "dsmon/detection/detection_filter.hpp"

#include "dsmon/core/linalg.hpp"
#include "dsmon/core/pencil.hpp"
#include "dsmon/core/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace dsmon {

std::vector<Complex> unobservable_modes(const Matrix& e, const Matrix& a, const Matrix& c,
                                        const NumericPolicy& policy) {
  const Index n = a.rows();
  std::vector<Complex> bad;
  for (const Complex& lam : pencil_eigenvalues(e, a, policy)) {
    if (lam.real() < -policy.hurwitz_margin) continue;
    CMatrix pencil(n + c.rows(), n);
    pencil.topRows(n) = lam * e.cast<Complex>() - a.cast<Complex>();
    pencil.bottomRows(c.rows()) = c.cast<Complex>();
    // the eigenvalue itself is only known to rounding, so use a loose cutoff
    const Vector sv = Eigen::JacobiSVD<CMatrix>(pencil).singularValues();
    const double scale = std::max({1.0, e.norm() * std::abs(lam), a.norm(), c.norm()});
    if (sv(n - 1) <= 1e-8 * scale) bad.push_back(lam);
  }
  return bad;
}

namespace {

std::string list_modes(const std::vector<Complex>& modes) {
  std::ostringstream out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) out << ", ";
    out << format_double(modes[i].real());
    if (modes[i].imag() != 0.0) out << (modes[i].imag() > 0 ? "+" : "-") << format_double(std::abs(modes[i].imag())) << "j";
  }
  return out.str();
}

// Real matrix with the given spectrum (conjugate pairs as 2x2 rotation blocks).
Matrix real_spectrum_matrix(const std::vector<Complex>& targets) {
  const Index r = static_cast<Index>(targets.size());
  Matrix f = Matrix::Zero(r, r);
  std::vector<bool> used(targets.size(), false);
  Index pos = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (used[i]) continue;
    const Complex t = targets[i];
    used[i] = true;
    if (std::abs(t.imag()) <= 1e-12 * std::max(1.0, std::abs(t))) {
      f(pos, pos) = t.real();
      ++pos;
      continue;
    }
    std::size_t mate = targets.size();
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (!used[j] && std::abs(targets[j] - std::conj(t)) <= 1e-9 * std::max(1.0, std::abs(t))) {
        mate = j;
        break;
      }
    }
    if (mate == targets.size()) throw DimensionError("target spectrum is not closed under conjugation");
    used[mate] = true;
    f(pos, pos) = t.real();
    f(pos + 1, pos + 1) = t.real();
    f(pos, pos + 1) = std::abs(t.imag());
    f(pos + 1, pos) = -std::abs(t.imag());
    pos += 2;
  }
  return f;
}

// K with eig(M + K Cr) = eig(F), via T M - F T = H Cr and K = -T^-1 H.
Matrix place_observer(const Matrix& m, const Matrix& cr, const Matrix& f, std::uint64_t seed) {
  const Index r = m.rows();
  const Index p = cr.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix best;
  double best_cond = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 12; ++attempt) {
    Matrix h(r, p);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < p; ++j) h(i, j) = nd(rng);
    const Matrix t = linalg::solve_sylvester(-f, m, h * cr);
    const Vector sv = linalg::singular_values(t);
    if (sv.size() == 0 || sv(sv.size() - 1) == 0.0) continue;
    const double cond = sv(0) / sv(sv.size() - 1);
    if (!std::isfinite(cond) || cond > 1e12) continue;
    if (cond < best_cond) {
      best_cond = cond;
      best = -t.fullPivLu().solve(h);
    }
    if (cond < 1e6) break;
  }
  if (best.size() == 0 && r > 0) {
    throw DesignInfeasibleError("pole placement failed: observer Sylvester equation is singular");
  }
  return best;
}

}  // namespace

Matrix design_injection(const Matrix& e, const Matrix& a, const Matrix& c,
                        const std::vector<Complex>* targets, const NumericPolicy& policy) {
  const Index n = a.rows();
  if (e.rows() != n || e.cols() != n || a.cols() != n || c.cols() != n) {
    throw DimensionError("design_injection: dimension mismatch");
  }
  const Index p = c.rows();
  const auto bad = unobservable_modes(e, a, c, policy);
  if (!bad.empty()) {
    throw DesignInfeasibleError("unobservable modes in the closed right half plane: " + list_modes(bad));
  }

  if (!targets) {
    for (double gamma : {1.0, 0.5, 0.25, 2.0, 4.0, 0.1}) {
      const Matrix g = gamma * a * c.transpose();
      if (is_hurwitz(e, a + g * c, policy)) return g;
    }
  }

  const PencilDecomposition pd = decompose_pencil(e, a, policy);
  if (!pd.regular || pd.index > 1) {
    throw DesignInfeasibleError("pencil (E, A) is not regular of index <= 1");
  }
  const IndexOneRealization real = realize_index_one(pd);
  const Index r = pd.slow_dim;
  if (r == 0) {
    const Matrix g = Matrix::Zero(n, p);
    if (is_hurwitz(e, a, policy)) return g;
    throw DesignInfeasibleError("purely algebraic pencil is not Hurwitz");
  }
  std::vector<Complex> wanted;
  if (targets) {
    if (static_cast<Index>(targets->size()) != r) {
      throw DimensionError("target spectrum needs " + std::to_string(r) + " values (slow modes)");
    }
    wanted = *targets;
  } else {
    // targets on the time scale of the plant: -s (1 + k / r) with s the mean
    // modulus of the finite spectrum, pushed away from open-loop eigenvalues
    const std::vector<Complex> open = pencil_eigenvalues(e, a, policy);
    double scale = 0.0;
    for (const Complex& lam : open) scale += std::abs(lam);
    scale = std::max(0.1, open.empty() ? 1.0 : scale / static_cast<double>(open.size()));
    for (int attempt = 0; attempt < 20; ++attempt) {
      double gap = std::numeric_limits<double>::infinity();
      for (Index k = 0; k < r; ++k) {
        const double t = -scale * (1.0 + static_cast<double>(k) / r);
        for (const Complex& lam : open) gap = std::min(gap, std::abs(Complex(t, 0.0) - lam));
      }
      if (gap >= 1e-2 * scale) break;
      scale *= 1.07;
    }
    for (Index k = 0; k < r; ++k) wanted.emplace_back(-scale * (1.0 + static_cast<double>(k) / r), 0.0);
  }
  const Matrix cr = c * real.lift_state;
  if (p == 0) throw DesignInfeasibleError("no measurements available for pole placement");
  const Matrix s = pd.e_t.topLeftCorner(r, r);
  const auto attempt = [&](const Matrix& basis, const std::vector<Complex>& spectrum) -> Matrix {
    const Matrix k = basis * place_observer(basis.transpose() * real.slow * basis, cr * basis,
                                            real_spectrum_matrix(spectrum), policy.seed);
    const Matrix g = pd.left.leftCols(r) * s * k;
    if (!is_hurwitz(e, a + g * c, policy)) return Matrix();
    return g;
  };
  try {
    const Matrix g = attempt(Matrix::Identity(r, r), wanted);
    if (g.size() > 0) return g;
  } catch (const DesignInfeasibleError&) {
  }
  // stable unobservable slow modes stay where they are; place only the observable part
  Matrix unobs = linalg::null_space(cr, policy, cr.norm());
  while (unobs.cols() > 0) {
    const Matrix leak = real.slow * unobs - unobs * (unobs.transpose() * real.slow * unobs);
    const Matrix keep = linalg::null_space(leak, policy, real.slow.norm());
    if (keep.cols() == unobs.cols()) break;
    unobs = unobs * keep;
  }
  const Index ro = r - unobs.cols();
  if (ro == r || (targets && ro < r)) {
    throw DesignInfeasibleError("pole placement did not produce a Hurwitz pencil");
  }
  const Matrix obs = linalg::complement(unobs, r);
  wanted.resize(static_cast<std::size_t>(ro));
  const Matrix g = ro == 0 ? Matrix(Matrix::Zero(n, p)) : attempt(obs, wanted);
  if (g.size() == 0 || !is_hurwitz(e, a + g * c, policy)) {
    throw DesignInfeasibleError("pole placement did not produce a Hurwitz pencil");
  }
  return g;
}

DetectionFilter make_detection_filter(const DescriptorSystem& sys, const Matrix& g,
                                      const NumericPolicy& policy) {
  if (g.rows() != sys.n() || g.cols() != sys.p()) throw DimensionError("G must be n x p");
  if (!is_hurwitz(sys.E(), sys.A() + g * sys.C(), policy)) {
    throw DesignInfeasibleError("(E, A + G C) is not regular, index <= 1 and Hurwitz");
  }
  return DetectionFilter{sys, g, FilterMode::centralized, std::nullopt};
}

DetectionFilter design_centralized(const DescriptorSystem& sys, const std::vector<Complex>* targets,
                                   const NumericPolicy& policy) {
  return make_detection_filter(sys, design_injection(sys.E(), sys.A(), sys.C(), targets, policy),
                               policy);
}

DetectionFilter make_decentralized_filter(const Partition& partition, const Matrix& g,
                                          const NumericPolicy& policy) {
  const DescriptorSystem& sys = partition.system();
  if (g.rows() != sys.n() || g.cols() != sys.p()) throw DimensionError("G must be n x p");
  for (Index i = 0; i < sys.n(); ++i) {
    for (Index j = 0; j < sys.p(); ++j) {
      if (g(i, j) != 0.0 && partition.region_of_node(i) != partition.region_of_output(j)) {
        throw DimensionError("decentralized G is not block diagonal");
      }
    }
  }
  for (Index r = 0; r < partition.count(); ++r) {
    const Matrix gi = partition.local_gain(g, r);
    if (!is_hurwitz(partition.local_E(r), partition.local_A(r) + gi * partition.local_C(r), policy)) {
      throw DesignInfeasibleError("region " + std::to_string(r + 1) + " filter is not Hurwitz");
    }
  }
  return DetectionFilter{sys, g, FilterMode::decentralized, partition};
}

DetectionFilter design_decentralized(const Partition& partition, const NumericPolicy& policy) {
  std::vector<Matrix> gains;
  for (Index r = 0; r < partition.count(); ++r) {
    try {
      gains.push_back(design_injection(partition.local_E(r), partition.local_A(r),
                                       partition.local_C(r), nullptr, policy));
    } catch (const DesignInfeasibleError& err) {
      throw DesignInfeasibleError("region " + std::to_string(r + 1) + ": " + err.what());
    }
  }
  return make_decentralized_filter(partition, partition.assemble_gain(gains), policy);
}

Trajectory run_detector(const DetectionFilter& filter, const Trajectory& y, const Vector& x0,
                        const NumericPolicy& policy, Trajectory* w_out) {
  y.validate();
  const DescriptorSystem& sys = filter.plant;
  if (y.dim() != sys.p()) throw DimensionError("measurement dimension does not match the plant");
  if (x0.size() != sys.n()) throw DimensionError("initial state has wrong dimension");
  const DaeIntegrator integ(sys.E(), filter.closed_loop(), policy);
  const Matrix forcing = -filter.G * y.samples;
  const Matrix w = integ.integrate_sampled(y.times, x0, forcing);
  if (w_out) *w_out = Trajectory("w", y.times, w);
  return Trajectory("r", y.times, sys.C() * w - y.samples);
}

double residual_threshold(const Trajectory& y, double factor) {
  return factor * (1.0 + y.sup_norm());
}

DetectionVerdict detection_verdict(const Trajectory& r, const Trajectory& y,
                                   const NumericPolicy& policy, double absolute) {
  DetectionVerdict v;
  v.max_residual = r.sup_norm();
  v.threshold = absolute > 0.0 ? absolute : residual_threshold(y, policy.residual_factor);
  v.attack = v.max_residual > v.threshold;
  return v;
}

}  // namespace dsmon
