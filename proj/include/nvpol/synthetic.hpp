#pragma once

#include "nvpol/dipole.hpp"
#include "nvpol/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace nvpol {

/// A polarization sweep: per-angle PL intensity and g2(0), measured or
/// synthetic. Intensities are counts for synthetic data and arbitrary
/// units for ingested data; g2 errors may be NaN where unknown.
struct PolarizationSweep {
  Eigen::VectorXd angles_deg;
  Eigen::VectorXd intensities;
  Eigen::VectorXd g2_values;
  Eigen::VectorXd g2_errors;
  double acquisition_time = 0.0;  // 0 when unknown (measured data)
};

/// Default measurement grid: 0..180 degrees in 10 degree steps (19 points).
Eigen::VectorXd default_angle_grid_deg();

/// Hard-validates a sweep (throws std::invalid_argument) and returns
/// soft warnings, e.g. g2 values above 1.
std::vector<std::string> validate_sweep(const PolarizationSweep& sweep);

/// Poisson counts with mean rate * t. Deterministic per seed.
std::int64_t sample_counts(double rate, double t, RandomSeed seed);

/// Simulates a finite-acquisition-time sweep: per angle, each emitter and the
/// background contribute independent Poisson counts with expectation
/// rate * t, where rates are normalized so the brightest emitter's solo curve
/// peaks at 1. The g2 value applies the coincidence formula to the sampled
/// counts in place of the true rates; g2_errors hold a delta-method
/// propagation of the Poisson count variance.
///
/// Substreams are derived per (seed, angle index, source index), so results
/// do not depend on evaluation order.
PolarizationSweep generate_sweep(const EmitterSystem& truth, const ForwardModel& model,
                                 double t, RandomSeed seed,
                                 const Eigen::VectorXd& angles_deg);
PolarizationSweep generate_sweep(const EmitterSystem& truth, const OpticalSystem& optics,
                                 double t, RandomSeed seed);

/// The infinite-time limit of generate_sweep: exact model curves on the given
/// grid, with intensities scaled by t and zero g2 errors.
PolarizationSweep noiseless_sweep(const EmitterSystem& truth, const ForwardModel& model,
                                  const Eigen::VectorXd& angles_deg, double t = 1.0);

}  // namespace nvpol
