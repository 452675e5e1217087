#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/interferometer.hpp"

namespace qgp {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> power_spectrum(const std::vector<double>& samples, std::size_t padded) {
  double* in = fftw_alloc_real(padded);
  fftw_complex* out = fftw_alloc_complex(padded / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in, out, FFTW_ESTIMATE);
  }
  const std::size_t n = samples.size();
  for (std::size_t k = 0; k < padded; ++k) in[k] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n - 1)));
    in[k] = w * samples[k];
  }
  fftw_execute(plan);
  std::vector<double> power(padded / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return power;
}

}  // namespace

SpectralPeak periodogram_peak(const std::vector<double>& samples, double dt, std::size_t padding) {
  if (samples.size() < 4) throw NumericalError("periodogram needs at least 4 samples");
  if (!(dt > 0.0)) throw NumericalError("periodogram needs a positive sample spacing");
  const std::size_t padded = next_power_of_two(std::max<std::size_t>(1, padding) * samples.size());
  const std::vector<double> power = power_spectrum(samples, padded);

  const auto top = std::max_element(power.begin(), power.end());
  const std::size_t k = static_cast<std::size_t>(top - power.begin());
  SpectralPeak peak;
  peak.bin = k;
  peak.power = *top;
  double offset = 0.0;
  if (k > 0 && k + 1 < power.size()) {
    const double floor = 1e-300;
    const double a = std::log(std::max(power[k - 1], floor));
    const double b = std::log(std::max(power[k], floor));
    const double c = std::log(std::max(power[k + 1], floor));
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  peak.frequency = (static_cast<double>(k) + offset) / (static_cast<double>(padded) * dt);
  return peak;
}

FrequencyScan scan_and_extract_frequency(const GaugeTrajectory& traj,
                                         const FrequencyOptions& options) {
  const TimeGrid& grid = traj.grid();
  if (!grid.is_uniform()) throw NumericalError("frequency extraction needs a uniform t1 grid");
  if (grid.size() < 4) throw NumericalError("frequency extraction needs at least 4 samples");

  const Interferometer ifm(traj, options.arms, options.geometry);
  FrequencyScan scan{ifm.trace()};
  const auto& trace = scan.trace;

  const double span = grid.span();
  const double rate = (trace.phase_arg.back() - trace.phase_arg.front()) / span;
  scan.phase_rate_frequency = std::abs(rate) / kTwoPi;
  const double cycles = scan.phase_rate_frequency * span;
  if (*std::max_element(trace.envelope.begin(), trace.envelope.end()) == 0.0)
    throw NumericalError("interference signal vanishes: the two arms are uncoupled");

  if (cycles < 1.0) {
    scan.below_resolution = true;
  } else {
    const double period = 1.0 / scan.phase_rate_frequency;
    if (cycles < options.min_periods) {
      std::ostringstream msg;
      msg << "t1 grid covers " << cycles << " oscillation periods; at least "
          << options.min_periods << " are required (span >= " << options.min_periods * period
          << ")";
      throw NumericalError(msg.str());
    }
    const double per_period = static_cast<double>(grid.size() - 1) / cycles;
    if (per_period < options.min_samples_per_period) {
      std::ostringstream msg;
      msg << "t1 grid has " << per_period << " samples per oscillation period; at least "
          << options.min_samples_per_period << " are required ("
          << static_cast<std::size_t>(std::ceil(options.min_samples_per_period * cycles)) + 1
          << " samples over this span)";
      throw NumericalError(msg.str());
    }
  }
  scan.dominant_frequency = periodogram_peak(trace.dI_dt2, grid.step(), options.padding).frequency;
  return scan;
}

}  // namespace qgp
