#include "nvpol/synthetic.hpp"

#include "nvpol/photon_statistics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nvpol {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

Eigen::VectorXd default_angle_grid_deg() {
  return Eigen::VectorXd::LinSpaced(19, 0.0, 180.0);
}

std::vector<std::string> validate_sweep(const PolarizationSweep& sweep) {
  const Eigen::Index n = sweep.angles_deg.size();
  if (n == 0) throw std::invalid_argument("sweep: empty angle grid");
  if (sweep.intensities.size() != n || sweep.g2_values.size() != n)
    throw std::invalid_argument("sweep: column lengths differ");
  if (sweep.g2_errors.size() != 0 && sweep.g2_errors.size() != n)
    throw std::invalid_argument("sweep: g2_errors length differs");
  std::vector<std::string> warnings;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = sweep.angles_deg[i];
    if (a < 0.0 || a > 180.0)
      throw std::invalid_argument("sweep: angle " + std::to_string(a) +
                                  " outside [0, 180] degrees");
    if (i > 0 && a <= sweep.angles_deg[i - 1])
      throw std::invalid_argument("sweep: angles must be strictly increasing");
    if (sweep.intensities[i] < 0.0)
      throw std::invalid_argument("sweep: negative intensity at angle " +
                                  std::to_string(a));
    const double g = sweep.g2_values[i];
    if (g < 0.0 || g > 1.5)
      throw std::invalid_argument("sweep: g2 value " + std::to_string(g) +
                                  " outside [0, 1.5] at angle " + std::to_string(a));
    if (g > 1.0)
      warnings.push_back("g2 value " + std::to_string(g) + " above 1 at angle " +
                         std::to_string(a) + " deg");
  }
  return warnings;
}

std::int64_t sample_counts(double rate, double t, RandomSeed seed) {
  if (rate < 0.0) throw std::invalid_argument("sample_counts: negative rate");
  if (t < 0.0) throw std::invalid_argument("sample_counts: negative time");
  const double mean = rate * t;
  if (mean == 0.0) return 0;
  auto engine = make_engine(seed);
  std::poisson_distribution<std::int64_t> poisson(mean);
  return poisson(engine);
}

namespace {

// g2 from per-source counts, plus its delta-method standard error using the
// observed counts as Poisson variance estimates. g2 = 1 - sum(c_k^2)/S^2
// where the sum runs over the real emitters only.
std::pair<double, double> g2_from_counts(const Eigen::VectorXd& emitter_counts,
                                         double background_count) {
  const double s = emitter_counts.sum() + background_count;
  if (s <= 0.0) return {0.0, 0.0};
  const double q = emitter_counts.squaredNorm();
  const double g2 = 1.0 - q / (s * s);
  double var = 0.0;
  for (Eigen::Index k = 0; k < emitter_counts.size(); ++k) {
    const double d = (-2.0 * emitter_counts[k] + 2.0 * q / s) / (s * s);
    var += d * d * emitter_counts[k];
  }
  const double db = 2.0 * q / (s * s * s);
  var += db * db * background_count;
  return {g2, std::sqrt(var)};
}

}  // namespace

PolarizationSweep generate_sweep(const EmitterSystem& truth, const ForwardModel& model,
                                 double t, RandomSeed seed,
                                 const Eigen::VectorXd& angles_deg) {
  truth.validate();
  if (t <= 0.0) throw std::invalid_argument("generate_sweep: t must be > 0");

  const double max_b = truth.max_brightness();
  const double bg_rate = truth.background * max_b;
  const auto n_emitters = static_cast<Eigen::Index>(truth.emitters.size());

  PolarizationSweep sweep;
  sweep.angles_deg = angles_deg;
  sweep.acquisition_time = t;
  sweep.intensities.resize(angles_deg.size());
  sweep.g2_values.resize(angles_deg.size());
  sweep.g2_errors.resize(angles_deg.size());

  Eigen::VectorXd counts(n_emitters);
  for (Eigen::Index i = 0; i < angles_deg.size(); ++i) {
    const double theta = angles_deg[i] * kDegToRad;
    for (Eigen::Index k = 0; k < n_emitters; ++k) {
      const auto& e = truth.emitters[static_cast<std::size_t>(k)];
      const double rate = e.brightness * model.rate(e.orientation.label, theta);
      counts[k] = static_cast<double>(sample_counts(
          rate, t,
          RandomSeed{derive_stream(seed.value, static_cast<std::uint64_t>(i),
                                   static_cast<std::uint64_t>(k))}));
    }
    const double bg_count = static_cast<double>(sample_counts(
        bg_rate, t,
        RandomSeed{derive_stream(seed.value, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(n_emitters))}));
    sweep.intensities[i] = counts.sum() + bg_count;
    const auto [g2, err] = g2_from_counts(counts, bg_count);
    sweep.g2_values[i] = g2;
    sweep.g2_errors[i] = err;
  }
  return sweep;
}

PolarizationSweep generate_sweep(const EmitterSystem& truth, const OpticalSystem& optics,
                                 double t, RandomSeed seed) {
  return generate_sweep(truth, ForwardModel(optics), t, seed, default_angle_grid_deg());
}

PolarizationSweep noiseless_sweep(const EmitterSystem& truth, const ForwardModel& model,
                                  const Eigen::VectorXd& angles_deg, double t) {
  truth.validate();
  const double max_b = truth.max_brightness();
  const double bg_rate = truth.background * max_b;
  const auto n_emitters = static_cast<Eigen::Index>(truth.emitters.size());

  PolarizationSweep sweep;
  sweep.angles_deg = angles_deg;
  sweep.acquisition_time = t;
  sweep.intensities.resize(angles_deg.size());
  sweep.g2_values.resize(angles_deg.size());
  sweep.g2_errors = Eigen::VectorXd::Zero(angles_deg.size());

  Eigen::VectorXd rates(n_emitters);
  for (Eigen::Index i = 0; i < angles_deg.size(); ++i) {
    const double theta = angles_deg[i] * kDegToRad;
    for (Eigen::Index k = 0; k < n_emitters; ++k) {
      const auto& e = truth.emitters[static_cast<std::size_t>(k)];
      rates[k] = e.brightness * model.rate(e.orientation.label, theta);
    }
    sweep.intensities[i] = (rates.sum() + bg_rate) * t;
    sweep.g2_values[i] = g2_of_rates(rates, bg_rate);
  }
  return sweep;
}

}  // namespace nvpol
