#include "dsmon/core/descriptor_system.hpp"

#include "dsmon/core/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dsmon {

AttackSet::AttackSet(std::vector<Index> zero_based) : idx_(std::move(zero_based)) {
  std::sort(idx_.begin(), idx_.end());
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
    throw DimensionError("attack set has repeated indices");
  }
  if (!idx_.empty() && idx_.front() < 0) throw DimensionError("attack set index below 1");
}

AttackSet AttackSet::from_one_based(const std::vector<long long>& one_based) {
  std::vector<Index> idx;
  idx.reserve(one_based.size());
  for (long long v : one_based) {
    if (v < 1) throw DimensionError("attack set indices are 1-based");
    idx.push_back(static_cast<Index>(v - 1));
  }
  return AttackSet(std::move(idx));
}

bool AttackSet::contains(Index i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

void AttackSet::validate(Index channels) const {
  if (!idx_.empty() && idx_.back() >= channels) {
    throw DimensionError("attack index " + std::to_string(idx_.back() + 1) + " exceeds " +
                         std::to_string(channels) + " channels");
  }
}

AttackSet AttackSet::set_union(const AttackSet& other) const {
  std::vector<Index> out;
  std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                 std::back_inserter(out));
  return AttackSet(std::move(out));
}

AttackSet AttackSet::set_intersection(const AttackSet& other) const {
  std::vector<Index> out;
  std::set_intersection(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                        std::back_inserter(out));
  return AttackSet(std::move(out));
}

std::string AttackSet::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < idx_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(idx_[i] + 1);
  }
  return s + "}";
}

AttackSet AttackSet::parse(const std::string& text) {
  std::string cleaned;
  for (char ch : text) {
    if (ch == '{' || ch == '}' || ch == '[' || ch == ']' || ch == ',' || ch == ';') {
      cleaned += ' ';
    } else {
      cleaned += ch;
    }
  }
  std::istringstream in(cleaned);
  std::vector<long long> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(token, &used);
    } catch (const std::exception&) {
      throw DimensionError("cannot parse attack set '" + text + "'");
    }
    if (used != token.size()) throw DimensionError("cannot parse attack set '" + text + "'");
    values.push_back(v);
  }
  return from_one_based(values);
}

DescriptorSystem::DescriptorSystem(Matrix e, Matrix a, Matrix b, Matrix c, Matrix d)
    : e_(std::move(e)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const Index n = a_.rows();
  if (a_.cols() != n) throw DimensionError("A must be square");
  if (e_.rows() != n || e_.cols() != n) throw DimensionError("E must match A");
  if (b_.rows() != n) throw DimensionError("B must have n rows");
  if (c_.cols() != n) throw DimensionError("C must have n columns");
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) throw DimensionError("D must be p x m");
}

DescriptorSystem DescriptorSystem::attack_model(Matrix e, Matrix a, Matrix c) {
  const Index n = a.rows();
  const Index p = c.rows();
  Matrix b = Matrix::Zero(n, n + p);
  b.leftCols(n).setIdentity();
  Matrix d = Matrix::Zero(p, n + p);
  d.rightCols(p).setIdentity();
  return DescriptorSystem(std::move(e), std::move(a), std::move(b), std::move(c), std::move(d));
}

bool DescriptorSystem::has_attack_layout() const {
  const Index n_ = n();
  const Index p_ = p();
  if (m() != n_ + p_) return false;
  Matrix b = Matrix::Zero(n_, n_ + p_);
  b.leftCols(n_).setIdentity();
  Matrix d = Matrix::Zero(p_, n_ + p_);
  d.rightCols(p_).setIdentity();
  return b_ == b && d_ == d;
}

Matrix DescriptorSystem::B_of(const AttackSet& k) const {
  k.validate(m());
  return linalg::select_columns(b_, k.indices());
}

Matrix DescriptorSystem::D_of(const AttackSet& k) const {
  k.validate(m());
  return linalg::select_columns(d_, k.indices());
}

namespace {

std::vector<Complex> random_points(std::size_t count, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Complex> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double re = unit(rng);
    const double im = unit(rng);
    pts.emplace_back(scale * re, scale * im);
  }
  return pts;
}

double pencil_scale(const Matrix& e, const Matrix& a) {
  const double ne = e.norm();
  const double na = a.norm();
  if (ne == 0.0) return 1.0;
  return std::max(1.0, na / ne);
}

}  // namespace

RegularityWitness check_regular(const Matrix& e, const Matrix& a, const NumericPolicy& policy) {
  if (e.rows() != e.cols() || a.rows() != a.cols() || e.rows() != a.rows()) {
    throw DimensionError("check_regular: E and A must be square and equal in size");
  }
  const Index n = a.rows();
  RegularityWitness w;
  if (n == 0) {
    w.regular = true;
    return w;
  }
  w.points = random_points(static_cast<std::size_t>(2 * n + 1), pencil_scale(e, a), policy.seed);
  for (const Complex& s : w.points) {
    CMatrix m = s * e.cast<Complex>() - a.cast<Complex>();
    w.determinants.push_back(m.fullPivLu().determinant());
    w.sigma_ratios.push_back(linalg::sigma_ratio(m));
    if (linalg::complex_rank(m, policy) == n) w.regular = true;
  }
  return w;
}

RegularityWitness check_regular(const DescriptorSystem& sys, const NumericPolicy& policy) {
  return check_regular(sys.E(), sys.A(), policy);
}

double inconsistency(const Matrix& e, const Vector& v, const NumericPolicy& policy) {
  if (e.rows() != v.size()) throw DimensionError("inconsistency: size mismatch");
  const Matrix kernel = linalg::left_null_space(e, policy);
  if (kernel.cols() == 0) return 0.0;
  return (kernel.transpose() * v).norm();
}

bool check_consistent(const Matrix& e, const Matrix& a, const Vector& x0, const Vector& f0,
                      const NumericPolicy& policy) {
  if (x0.size() != a.cols() || f0.size() != a.rows()) {
    throw DimensionError("check_consistent: dimension mismatch");
  }
  const Vector v = a * x0 + f0;
  return inconsistency(e, v, policy) <= policy.consistency_tol * (1.0 + v.norm());
}

bool check_consistent(const DescriptorSystem& sys, const Vector& x0, const Vector& u0,
                      const NumericPolicy& policy) {
  if (u0.size() != sys.m()) throw DimensionError("check_consistent: input size mismatch");
  return check_consistent(sys.E(), sys.A(), x0, sys.B() * u0, policy);
}

namespace {

constexpr double kZeroRatio = 1e-6;
constexpr double kMagnitudeCap = 1e6;

std::vector<Complex> qz_candidates(const Matrix& a, const Matrix& e) {
  std::vector<Complex> out;
  if (a.rows() == 0) return out;
  Eigen::GeneralizedEigenSolver<Matrix> ges;
  ges.compute(a, e, false);
  if (ges.info() != Eigen::Success) throw InternalError("QZ iteration did not converge");
  const double beta_floor = 1e-13 * std::max(1.0, e.norm());
  for (Index i = 0; i < ges.betas().size(); ++i) {
    const double beta = ges.betas()(i);
    if (std::abs(beta) <= beta_floor) continue;
    out.push_back(ges.alphas()(i) / beta);
  }
  return out;
}

bool is_rank_drop(const Matrix& pe, const Matrix& pa, const Complex& s) {
  CMatrix m = s * pe.cast<Complex>() - pa.cast<Complex>();
  return linalg::sigma_ratio(m) <= kZeroRatio;
}

void add_unique(std::vector<Complex>& values, const Complex& z) {
  for (const Complex& v : values) {
    if (std::abs(v - z) <= 1e-7 * (1.0 + std::abs(z))) return;
  }
  values.push_back(z);
}

void sort_complex(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace

std::vector<Complex> finite_generalized_eigenvalues(const Matrix& a, const Matrix& e,
                                                    const NumericPolicy&) {
  if (a.rows() != a.cols() || e.rows() != a.rows() || e.cols() != a.cols()) {
    throw DimensionError("finite_generalized_eigenvalues: pencil must be square");
  }
  const double cap = kMagnitudeCap * pencil_scale(e, a);
  std::vector<Complex> out;
  for (const Complex& z : qz_candidates(a, e)) {
    if (std::abs(z) > cap) continue;
    if (is_rank_drop(e, a, z)) out.push_back(z);
  }
  sort_complex(out);
  return out;
}

ZeroReport invariant_zeros(const Matrix& e, const Matrix& a, const Matrix& b, const Matrix& c,
                           const Matrix& d, const NumericPolicy& policy) {
  const Index n = a.rows();
  const Index m = b.cols();
  const Index p = c.rows();
  if (e.rows() != n || e.cols() != n || a.cols() != n || b.rows() != n || c.cols() != n ||
      d.rows() != p || d.cols() != m) {
    throw DimensionError("invariant_zeros: inconsistent dimensions");
  }
  ZeroReport rep;
  rep.rows = n + p;
  rep.columns = n + m;
  rep.square = rep.rows == rep.columns;

  // s * pe - pa = [sE - A, B; C, -D]
  Matrix pe = Matrix::Zero(n + p, n + m);
  pe.topLeftCorner(n, n) = e;
  Matrix pa(n + p, n + m);
  pa.topLeftCorner(n, n) = a;
  pa.topRightCorner(n, m) = -b;
  pa.bottomLeftCorner(p, n) = -c;
  pa.bottomRightCorner(p, m) = d;

  const double scale = pencil_scale(pe, pa);
  const auto pts = random_points(static_cast<std::size_t>(2 * (n + m) + 1), scale, policy.seed);
  for (const Complex& s : pts) {
    CMatrix mat = s * pe.cast<Complex>() - pa.cast<Complex>();
    rep.normal_rank = std::max(rep.normal_rank, linalg::complex_rank(mat, policy));
  }
  if (rep.normal_rank < rep.columns) {
    rep.has_zero_dynamics = true;
    return rep;
  }

  const double cap = kMagnitudeCap * scale;
  if (rep.square) {
    for (const Complex& z : qz_candidates(pa, pe)) {
      if (std::abs(z) <= cap && is_rank_drop(pe, pa, z)) add_unique(rep.zeros, z);
    }
  } else {
    // Tall pencil: every zero is an eigenvalue of W * pencil for any W. The
    // extra eigenvalues depend on W, so only candidates shared by two random
    // projections are kept and then checked on the full pencil.
    std::mt19937_64 rng(policy.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    std::vector<std::vector<Complex>> found;
    for (int trial = 0; trial < 2; ++trial) {
      Matrix w(n + m, n + p);
      for (Index i = 0; i < w.size(); ++i) w.data()[i] = gauss(rng);
      found.push_back(qz_candidates(w * pa, w * pe));
    }
    for (const Complex& z : found[0]) {
      if (std::abs(z) > cap) continue;
      const bool shared = std::any_of(found[1].begin(), found[1].end(), [&](const Complex& v) {
        return std::abs(v - z) <= 1e-5 * (1.0 + std::abs(z));
      });
      if (shared && is_rank_drop(pe, pa, z)) add_unique(rep.zeros, z);
    }
  }
  sort_complex(rep.zeros);
  rep.has_zero_dynamics = !rep.zeros.empty();
  return rep;
}

ZeroReport invariant_zeros(const DescriptorSystem& sys, const NumericPolicy& policy) {
  return invariant_zeros(sys.E(), sys.A(), sys.B(), sys.C(), sys.D(), policy);
}

}  // namespace dsmon
