#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/numerics.hpp"

namespace qgp {

TimeGrid::TimeGrid(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw NumericalError("time grid needs at least 2 samples");
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i] > samples_[i - 1])) {
      std::ostringstream msg;
      msg << "time grid not strictly increasing at index " << i;
      throw NumericalError(msg.str());
    }
  }
  const double h = step();
  uniform_ = true;
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (std::abs((samples_[i] - samples_[i - 1]) - h) > 1e-7 * h) {
      uniform_ = false;
      break;
    }
  }
}

TimeGrid TimeGrid::uniform(double t0, double t1, std::size_t count) {
  if (count < 2) throw NumericalError("time grid needs at least 2 samples");
  std::vector<double> s(count);
  const double h = (t1 - t0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) s[i] = t0 + h * static_cast<double>(i);
  s.back() = t1;
  return TimeGrid(std::move(s));
}

std::size_t TimeGrid::index_of(double t) const {
  const auto it = std::lower_bound(samples_.begin(), samples_.end(), t);
  const double tol = 1e-8 * step();
  std::size_t best = samples_.size();
  if (it != samples_.end() && std::abs(*it - t) <= tol)
    best = static_cast<std::size_t>(it - samples_.begin());
  else if (it != samples_.begin() && std::abs(*(it - 1) - t) <= tol)
    best = static_cast<std::size_t>(it - samples_.begin()) - 1;
  if (best == samples_.size()) {
    std::ostringstream msg;
    msg << "time " << t << " is not a sample of the grid [" << front() << ", " << back() << "]";
    throw NumericalError(msg.str());
  }
  return best;
}

TimeGrid TimeGrid::prefix(std::size_t count) const {
  return TimeGrid(std::vector<double>(samples_.begin(), samples_.begin() + count));
}

namespace {

void require_aligned(std::span<const double> values, const TimeGrid& grid) {
  if (values.size() != grid.size()) {
    std::ostringstream msg;
    msg << "sample count " << values.size() << " does not match grid size " << grid.size();
    throw NumericalError(msg.str());
  }
}

double simpson_38(std::span<const double> f, std::size_t i, double h) {
  return 3.0 * h / 8.0 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]);
}

}  // namespace

double integrate(std::span<const double> values, const TimeGrid& grid) {
  require_aligned(values, grid);
  const std::size_t n = values.size();
  if (!grid.is_uniform() || n < 3) {
    double sum = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      sum += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
    return sum;
  }
  const double h = grid.step();
  const std::size_t intervals = n - 1;
  const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
    sum += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
  if (simpson_end != intervals) sum += simpson_38(values, simpson_end, h);
  return sum;
}

std::vector<double> cumulative_integral(std::span<const double> values, const TimeGrid& grid) {
  require_aligned(values, grid);
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  if (!grid.is_uniform() || n < 3) {
    for (std::size_t i = 1; i < n; ++i)
      out[i] = out[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
    return out;
  }
  const double h = grid.step();
  out[1] = 0.5 * h * (values[0] + values[1]);
  for (std::size_t i = 2; i < n; ++i) {
    if (i % 2 == 0)
      out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
    else
      out[i] = out[i - 3] + simpson_38(values, i - 3, h);
  }
  // Odd entries above rely on out[i - 3] being an even-index Simpson sum,
  // which holds because i - 3 is even whenever i is odd.
  return out;
}

std::vector<StencilTerm> derivative_stencil(const TimeGrid& grid, std::size_t i) {
  const std::size_t n = grid.size();
  if (n == 2) {
    const double h = grid[1] - grid[0];
    return {{0, -1.0 / h}, {1, 1.0 / h}};
  }
  if (grid.is_uniform() && n >= 5) {
    const double w = 1.0 / (12.0 * grid.step());
    if (i == 0) return {{0, -25 * w}, {1, 48 * w}, {2, -36 * w}, {3, 16 * w}, {4, -3 * w}};
    if (i == 1) return {{0, -3 * w}, {1, -10 * w}, {2, 18 * w}, {3, -6 * w}, {4, 1 * w}};
    if (i == n - 2)
      return {{n - 5, -1 * w}, {n - 4, 6 * w}, {n - 3, -18 * w}, {n - 2, 10 * w}, {n - 1, 3 * w}};
    if (i == n - 1)
      return {{n - 5, 3 * w}, {n - 4, -16 * w}, {n - 3, 36 * w}, {n - 2, -48 * w}, {n - 1, 25 * w}};
    return {{i - 2, w}, {i - 1, -8 * w}, {i + 1, 8 * w}, {i + 2, -w}};
  }
  if (i == 0) {
    const double h1 = grid[1] - grid[0], h2 = grid[2] - grid[1];
    return {{0, -(2 * h1 + h2) / (h1 * (h1 + h2))},
            {1, (h1 + h2) / (h1 * h2)},
            {2, -h1 / (h2 * (h1 + h2))}};
  }
  if (i == n - 1) {
    const double h1 = grid[n - 2] - grid[n - 3], h2 = grid[n - 1] - grid[n - 2];
    return {{n - 3, h2 / (h1 * (h1 + h2))},
            {n - 2, -(h1 + h2) / (h1 * h2)},
            {n - 1, (2 * h2 + h1) / (h2 * (h1 + h2))}};
  }
  const double h1 = grid[i] - grid[i - 1], h2 = grid[i + 1] - grid[i];
  return {{i - 1, -h2 / (h1 * (h1 + h2))},
          {i, (h2 - h1) / (h1 * h2)},
          {i + 1, h1 / (h2 * (h1 + h2))}};
}

std::vector<double> differentiate(std::span<const double> values, const TimeGrid& grid) {
  require_aligned(values, grid);
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (const auto& term : derivative_stencil(grid, i)) out[i] += term.weight * values[term.index];
  return out;
}

std::vector<double> unwrap_phase(std::span<const double> angles) {
  std::vector<double> out(angles.begin(), angles.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    double d = std::remainder(angles[i] - angles[i - 1], kTwoPi);
    if (d <= -kPi) d += kTwoPi;
    out[i] = out[i - 1] + d;
  }
  return out;
}

}  // namespace qgp
