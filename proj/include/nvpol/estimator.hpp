#pragma once

#include "nvpol/dipole.hpp"
#include "nvpol/rng.hpp"
#include "nvpol/synthetic.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nvpol {

/// Raised by commands when an optimization fails to converge.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tunables of the chi-squared protocol. Defaults are the reference values;
/// the CLI exposes them.
struct FitOptions {
  double g2_weight = 1.0;          // weight of the g2 term in the objective
  double denominator_floor = 1e-6; // floor on normalized model denominators
  double ratio_floor = 1e-3;       // below this the second emitter is "off"
  double rel_margin = 0.5;         // best class must be <= margin * next class
  int grid_ratio = 21;             // coarse-grid resolution per parameter
  int grid_background = 13;
  int grid_offset = 24;
  double background_grid_max = 0.6;
  int max_iterations = 500;        // Nelder-Mead cap
  double tolerance = 1e-10;        // Nelder-Mead spread tolerance on chi^2
};

enum class Verdict { OneEmitter, TwoEmitters, Inconclusive };
std::string to_string(Verdict verdict);

/// One orientation-pair hypothesis with its fitted free parameters.
struct FitHypothesis {
  OrientationPair pair;
  double ratio = 0.0;         // dimmer/brighter detection-rate ratio, in [0,1]
  double background = 0.0;    // fraction of the brighter emitter's peak rate
  double scale = 1.0;         // measured intensity per unit model intensity
  double theta_offset = 0.0;  // polarizer-zero offset, radians in [0, pi)
};

struct PairFit {
  FitHypothesis hypothesis;
  double chi_squared = 0.0;
  bool converged = true;
};

struct FitResult {
  std::vector<PairFit> per_pair;           // in enumerate_pairs() order
  std::vector<DegeneracyClass> classes;
  std::vector<double> class_chi_squared;   // min chi^2 per class
  int best_class = -1;
  int best_pair = -1;
  Verdict verdict = Verdict::Inconclusive;
  double recovered_ratio = 0.0;
  double recovered_background = 0.0;
  bool all_converged = true;

  const PairFit& best() const { return per_pair[static_cast<std::size_t>(best_pair)]; }
};

/// Pearson-form goodness of fit between a measured and a model sweep on the
/// same angle grid:
///   sum (I_meas/s - I_model)^2 / I_model + w (g2_meas - g2_model)^2 / g2_model
/// with model intensities normalized to peak 1, the measured scale s solved
/// in closed form, and denominators floored at `floor`.
double chi_squared(const PolarizationSweep& measured, const PolarizationSweep& model,
                   double g2_weight = 1.0, double floor = 1e-6);

/// Fits one orientation-pair hypothesis: coarse grid over
/// (ratio, background, theta_offset) with the scale profiled out, then
/// Nelder-Mead refinement. Deterministic.
PairFit fit_pair(const PolarizationSweep& measured, const OrientationPair& pair,
                 const ForwardModel& model, const FitOptions& options = {});
PairFit fit_pair(const PolarizationSweep& measured, const OrientationPair& pair,
                 const OpticalSystem& optics, const FitOptions& options = {});

/// Runs fit_pair for all ten hypotheses, groups them by degeneracy class and
/// decides between one and two emitters:
///  - OneEmitter when the best hypothesis extinguishes its second emitter
///    (ratio < ratio_floor);
///  - TwoEmitters when the winning class beats the runner-up class by the
///    relative margin;
///  - Inconclusive otherwise.
FitResult fit_all(const PolarizationSweep& measured, const ForwardModel& model,
                  const FitOptions& options = {});
FitResult fit_all(const PolarizationSweep& measured, const OpticalSystem& optics,
                  const FitOptions& options = {});

/// Monte Carlo spread of the recovered (ratio, background) under the truth.
struct ConfidenceSummary {
  int n_trials = 0;
  double mean_ratio = 0.0;
  double mean_background = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double sigma1_area = 0.0;  // area of the 68.3% confidence ellipse
  Eigen::MatrixXd samples;   // n_trials x 3: ratio, background, chi^2
};

/// Chi-squared(2 dof) quantile scaling used for the 68.3% ellipse.
double confidence_ellipse_quantile();

/// Generates n_trials sweeps from the truth, fits each with the true pair and
/// summarizes the recovered parameters. Trials are independently seeded by
/// index, so the result does not depend on thread count.
ConfidenceSummary confidence_monte_carlo(const EmitterSystem& truth,
                                         const ForwardModel& model, double t,
                                         int n_trials, RandomSeed seed,
                                         const FitOptions& options = {},
                                         int threads = 0);
ConfidenceSummary confidence_monte_carlo(const EmitterSystem& truth,
                                         const OpticalSystem& optics, double t,
                                         int n_trials, RandomSeed seed,
                                         const FitOptions& options = {},
                                         int threads = 0);

struct TminSearchOptions {
  double target = 0.01;   // the 68.3% ellipse must fit within +-target in both
                          // parameters
  int trials = 50;        // Monte Carlo trials per probe
  double t_start = 125.0; // first probe
  double t_cap = 1e7;     // cells above this are marked unreached (inf)
  int bisection_steps = 4;
  int threads = 0;
  FitOptions fit{};
};

/// Minimum acquisition time per (ratio, background) truth cell: doubling
/// search over t followed by bisection, each probe a Monte Carlo confidence
/// run. Common random numbers across cells and probes (trial-indexed seeds)
/// keep the map smooth. Rows follow `ratios`, columns `backgrounds`;
/// unreached cells are +inf.
Eigen::MatrixXd min_acquisition_time(const Eigen::VectorXd& ratios,
                                     const Eigen::VectorXd& backgrounds,
                                     const OrientationPair& pair,
                                     const ForwardModel& model, RandomSeed seed,
                                     const TminSearchOptions& options = {});

/// Absolute parameter errors and chi^2 of single-sweep fits (true pair) over
/// a (ratio, background) truth grid. Rows follow `ratios`.
struct SweepErrorMaps {
  Eigen::MatrixXd ratio_error;
  Eigen::MatrixXd background_error;
  Eigen::MatrixXd chi_squared;
};

SweepErrorMaps background_error_sweep(const Eigen::VectorXd& ratios,
                                      const Eigen::VectorXd& backgrounds,
                                      const OrientationPair& pair,
                                      const ForwardModel& model, double t,
                                      RandomSeed seed, const FitOptions& options = {},
                                      int threads = 0);

}  // namespace nvpol
