#include "dsmon/core/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace dsmon {

Trajectory::Trajectory(std::string label_, std::vector<double> times_, Matrix samples_)
    : label(std::move(label_)), times(std::move(times_)), samples(std::move(samples_)) {
  validate();
}

void Trajectory::validate() const {
  if (samples.cols() != static_cast<Index>(times.size())) {
    throw DimensionError("trajectory '" + label + "': sample count differs from grid length");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw DimensionError("trajectory '" + label + "': grid not strictly increasing");
    }
  }
}

double Trajectory::sup_norm() const {
  return samples.size() == 0 ? 0.0 : samples.cwiseAbs().maxCoeff();
}

Trajectory Trajectory::rows(std::span<const Index> rows, const std::string& new_label) const {
  Matrix out(static_cast<Index>(rows.size()), samples.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = samples.row(rows[i]);
  return Trajectory(new_label, times, std::move(out));
}

std::vector<double> uniform_grid(double horizon, double dt) {
  if (!(dt > 0.0)) throw DimensionError("time step must be positive");
  if (!(horizon >= 0.0)) throw DimensionError("horizon must be nonnegative");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = static_cast<double>(k) * dt;
  return t;
}

bool same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > 1e-12 * (1.0 + std::abs(a[k]))) return false;
  }
  return true;
}

namespace {

// Lagrange weights of nodes x[0..3] evaluated at xi.
void lagrange4(const double* x, double xi, double* w) {
  for (int i = 0; i < 4; ++i) {
    double num = 1.0, den = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      num *= xi - x[j];
      den *= x[i] - x[j];
    }
    w[i] = num / den;
  }
}

// First node of the 4-point stencil used on interval [k, k+1].
std::size_t stencil_start(std::size_t k, std::size_t n) {
  if (k == 0) return 0;
  if (k + 2 >= n) return n - 4;
  return k - 1;
}

Vector interpolate_at(const std::vector<double>& t, const Matrix& s, double xi) {
  const std::size_t n = t.size();
  if (n == 1) return s.col(0);
  std::size_t k;
  if (xi <= t.front()) {
    k = 0;
  } else if (xi >= t.back()) {
    k = n - 2;
  } else {
    k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), xi) - t.begin()) - 1;
  }
  if (n < 4) {
    const double w = (xi - t[k]) / (t[k + 1] - t[k]);
    return (1.0 - w) * s.col(static_cast<Index>(k)) + w * s.col(static_cast<Index>(k + 1));
  }
  const std::size_t j0 = stencil_start(k, n);
  double w[4];
  lagrange4(&t[j0], xi, w);
  Vector out = Vector::Zero(s.rows());
  for (int i = 0; i < 4; ++i) out += w[i] * s.col(static_cast<Index>(j0 + i));
  return out;
}

}  // namespace

Matrix midpoint_values(const std::vector<double>& t, const Matrix& s) {
  const std::size_t n = t.size();
  if (n < 2) return Matrix(s.rows(), 0);
  Matrix out(s.rows(), static_cast<Index>(n - 1));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double xi = 0.5 * (t[k] + t[k + 1]);
    if (n < 4) {
      out.col(static_cast<Index>(k)) =
          0.5 * (s.col(static_cast<Index>(k)) + s.col(static_cast<Index>(k + 1)));
      continue;
    }
    const std::size_t j0 = stencil_start(k, n);
    double w[4];
    lagrange4(&t[j0], xi, w);
    auto col = out.col(static_cast<Index>(k));
    col = w[0] * s.col(static_cast<Index>(j0));
    for (int i = 1; i < 4; ++i) col += w[i] * s.col(static_cast<Index>(j0 + i));
  }
  return out;
}

Signal interpolate(const Trajectory& traj) {
  traj.validate();
  if (traj.size() == 0) throw DimensionError("cannot interpolate an empty trajectory");
  auto t = std::make_shared<const std::vector<double>>(traj.times);
  auto s = std::make_shared<const Matrix>(traj.samples);
  return [t, s](double xi) { return interpolate_at(*t, *s, xi); };
}

Signal zero_order_hold(const Trajectory& traj) {
  traj.validate();
  if (traj.size() == 0) throw DimensionError("cannot hold an empty trajectory");
  auto t = std::make_shared<const std::vector<double>>(traj.times);
  auto s = std::make_shared<const Matrix>(traj.samples);
  return [t, s](double xi) -> Vector {
    const auto it = std::upper_bound(t->begin(), t->end(), xi);
    if (it == t->begin()) return s->col(0);
    return s->col(static_cast<Index>(it - t->begin() - 1));
  };
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  traj.validate();
  const std::string label = traj.label.empty() ? "v" : traj.label;
  out << 't';
  for (Index i = 0; i < traj.dim(); ++i) out << ',' << label << '_' << (i + 1);
  out << '\n';
  std::string line;
  for (Index k = 0; k < traj.size(); ++k) {
    line = format_double(traj.times[static_cast<std::size_t>(k)]);
    for (Index i = 0; i < traj.dim(); ++i) {
      line += ',';
      line += format_double(traj.samples(i, k));
    }
    line += '\n';
    out << line;
  }
}

void write_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_csv(f, traj);
}

Trajectory read_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DimensionError("empty CSV");
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.empty() || cols[0] != "t") throw DimensionError("CSV header must start with 't'");
  std::string label;
  if (cols.size() > 1) {
    const auto pos = cols[1].rfind('_');
    label = pos == std::string::npos ? cols[1] : cols[1].substr(0, pos);
  }
  const Index dim = static_cast<Index>(cols.size()) - 1;
  std::vector<double> times;
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Index count = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = std::stod(cell);
      if (count == 0) {
        times.push_back(v);
      } else {
        values.push_back(v);
      }
      ++count;
    }
    if (count != dim + 1) throw DimensionError("CSV row has wrong number of columns");
  }
  Matrix samples = Eigen::Map<Matrix>(values.data(), dim, static_cast<Index>(times.size()));
  return Trajectory(label, std::move(times), std::move(samples));
}

Trajectory read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  return read_csv(f);
}

}  // namespace dsmon
