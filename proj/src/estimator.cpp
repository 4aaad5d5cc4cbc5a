#include "nvpol/estimator.hpp"

#include "nvpol/parallel.hpp"
#include "nvpol/photon_statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nvpol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

double wrap_offset(double x) {
  double y = std::fmod(x, kPi);
  if (y < 0.0) y += kPi;
  return y;
}

// Model curves of a pair hypothesis on a fixed angle grid. Responses are
// normalized so a unit-scale solo curve peaks at 1, matching the background
// convention.
struct PairModel {
  PolarizationResponse first, second;
  Eigen::VectorXd thetas;  // measured angles, radians

  PairModel(const OrientationPair& pair, const ForwardModel& model,
            const Eigen::VectorXd& angles_deg) {
    const double n = model.norm();
    first = model.response(pair.first);
    second = model.response(pair.second);
    first.cc /= n; first.ss /= n; first.cs /= n;
    second.cc /= n; second.ss /= n; second.cs /= n;
    thetas = angles_deg * kDegToRad;
  }

  void curves(double ratio, double background, double offset,
              Eigen::VectorXd& intensity, Eigen::VectorXd& g2) const {
    const auto n = thetas.size();
    intensity.resize(n);
    g2.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double th = thetas[i] - offset;
      const double p1 = first.at(th);
      const double p2 = ratio * second.at(th);
      const double total = p1 + p2 + background;
      intensity[i] = total;
      g2[i] = total > 0.0 ? 1.0 - (p1 * p1 + p2 * p2) / (total * total) : 0.0;
    }
  }
};

// Chi-squared of measured data against model curves, with the model
// intensities normalized to peak 1 and the measured scale profiled out in
// closed form. Returns the optimal scale through `scale_out` when non-null.
double chi_squared_curves(const Eigen::VectorXd& meas_i, const Eigen::VectorXd& meas_g,
                          const Eigen::VectorXd& model_i, const Eigen::VectorXd& model_g,
                          double g2_weight, double floor, double* scale_out) {
  const double peak = model_i.maxCoeff();
  if (peak <= 0.0) return std::numeric_limits<double>::infinity();

  double sum_i2_over_d = 0.0, sum_im_over_d = 0.0;
  const auto n = meas_i.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double m = model_i[k] / peak;
    const double d = std::max(m, floor);
    sum_i2_over_d += meas_i[k] * meas_i[k] / d;
    sum_im_over_d += meas_i[k] * m / d;
  }
  const double scale = sum_im_over_d > 0.0 ? sum_i2_over_d / sum_im_over_d : 1.0;
  if (scale_out) *scale_out = scale;

  double chi2 = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double m = model_i[k] / peak;
    const double di = meas_i[k] / scale - m;
    chi2 += di * di / std::max(m, floor);
    const double dg = meas_g[k] - model_g[k];
    chi2 += g2_weight * dg * dg / std::max(model_g[k], floor);
  }
  return chi2;
}

// Nelder-Mead on a 3-parameter objective. Standard reflection/expansion/
// contraction coefficients; converged when the simplex value spread falls
// below tol.
template <typename F>
double nelder_mead(F&& f, Eigen::Vector3d& x, const Eigen::Vector3d& step,
                   int max_iterations, double tol, bool& converged) {
  constexpr int n = 3;
  std::array<Eigen::Vector3d, n + 1> pts;
  std::array<double, n + 1> vals;
  pts[0] = x;
  vals[0] = f(x);
  for (int i = 0; i < n; ++i) {
    pts[i + 1] = x;
    pts[i + 1][i] += step[i];
    vals[i + 1] = f(pts[i + 1]);
  }

  auto order = [&] {
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (vals[j] < vals[i]) {
          std::swap(vals[i], vals[j]);
          std::swap(pts[i], pts[j]);
        }
  };

  converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    order();
    if (std::abs(vals[n] - vals[0]) < tol) {
      converged = true;
      break;
    }
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;

    const Eigen::Vector3d reflected = centroid + (centroid - pts[n]);
    const double fr = f(reflected);
    if (fr < vals[0]) {
      const Eigen::Vector3d expanded = centroid + 2.0 * (centroid - pts[n]);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[n] = expanded;
        vals[n] = fe;
      } else {
        pts[n] = reflected;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = reflected;
      vals[n] = fr;
    } else {
      const Eigen::Vector3d contracted = centroid + 0.5 * (pts[n] - centroid);
      const double fc = f(contracted);
      if (fc < vals[n]) {
        pts[n] = contracted;
        vals[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  order();
  x = pts[0];
  return vals[0];
}

void check_grids(const PolarizationSweep& a, const PolarizationSweep& b) {
  if (a.angles_deg.size() != b.angles_deg.size() ||
      (a.angles_deg - b.angles_deg).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("chi_squared: angle grids differ");
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::OneEmitter: return "one_emitter";
    case Verdict::TwoEmitters: return "two_emitters";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double chi_squared(const PolarizationSweep& measured, const PolarizationSweep& model,
                   double g2_weight, double floor) {
  check_grids(measured, model);
  return chi_squared_curves(measured.intensities, measured.g2_values,
                            model.intensities, model.g2_values, g2_weight, floor,
                            nullptr);
}

PairFit fit_pair(const PolarizationSweep& measured, const OrientationPair& pair,
                 const ForwardModel& model, const FitOptions& options) {
  const Eigen::Index n = measured.angles_deg.size();
  if (n < 8) throw std::invalid_argument("fit_pair: need at least 8 angles");
  if (measured.angles_deg[n - 1] - measured.angles_deg[0] < 90.0)
    throw std::invalid_argument("fit_pair: sweep must span at least 90 degrees");

  const PairModel pm(pair, model, measured.angles_deg);

  auto objective_at = [&](double ratio, double background, double offset,
                          double* scale_out) {
    Eigen::VectorXd mi, mg;
    pm.curves(ratio, background, offset, mi, mg);
    return chi_squared_curves(measured.intensities, measured.g2_values, mi, mg,
                              options.g2_weight, options.denominator_floor,
                              scale_out);
  };

  // Coarse grid; scale is profiled out at every point.
  struct Seed {
    double ratio, background, offset, chi2;
  };
  std::vector<Seed> seeds;
  double best_chi2 = std::numeric_limits<double>::infinity();
  for (int io = 0; io < options.grid_offset; ++io) {
    const double offset = kPi * io / options.grid_offset;
    for (int ir = 0; ir < options.grid_ratio; ++ir) {
      const double ratio = static_cast<double>(ir) / (options.grid_ratio - 1);
      for (int ib = 0; ib < options.grid_background; ++ib) {
        const double background =
            options.background_grid_max * ib / (options.grid_background - 1);
        const double chi2 = objective_at(ratio, background, offset, nullptr);
        if (chi2 < best_chi2) best_chi2 = chi2;
        seeds.push_back({ratio, background, offset, chi2});
      }
    }
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.chi2 < b.chi2; });

  // Refine from the best few grid points that sit in distinct offset basins.
  std::vector<Seed> starts;
  for (const Seed& s : seeds) {
    bool close = false;
    for (const Seed& t : starts) {
      const double d = std::abs(wrap_offset(s.offset - t.offset));
      if (std::min(d, kPi - d) < kPi / 8) close = true;
    }
    if (!close) starts.push_back(s);
    if (starts.size() == 3) break;
  }

  auto penalized = [&](const Eigen::Vector3d& p) {
    const double ratio = std::clamp(p[0], 0.0, 1.0);
    const double background = std::max(p[1], 0.0);
    double penalty = 0.0;
    if (p[0] < 0.0) penalty += p[0] * p[0];
    if (p[0] > 1.0) penalty += (p[0] - 1.0) * (p[0] - 1.0);
    if (p[1] < 0.0) penalty += p[1] * p[1];
    return objective_at(ratio, background, wrap_offset(p[2]), nullptr) +
           1e3 * penalty;
  };

  PairFit fit;
  fit.hypothesis.pair = pair;
  double best = std::numeric_limits<double>::infinity();
  bool best_converged = false;
  Eigen::Vector3d best_x = Eigen::Vector3d::Zero();
  for (const Seed& s : starts) {
    Eigen::Vector3d x(s.ratio, s.background, s.offset);
    bool converged = false;
    const Eigen::Vector3d step(0.05, 0.03, 6.0 * kDegToRad);
    const double value = nelder_mead(penalized, x, step, options.max_iterations,
                                     options.tolerance, converged);
    if (value < best) {
      best = value;
      best_x = x;
      best_converged = converged;
    }
  }

  fit.hypothesis.ratio = std::clamp(best_x[0], 0.0, 1.0);
  fit.hypothesis.background = std::max(best_x[1], 0.0);
  fit.hypothesis.theta_offset = wrap_offset(best_x[2]);
  double scale = 1.0;
  fit.chi_squared = objective_at(fit.hypothesis.ratio, fit.hypothesis.background,
                                 fit.hypothesis.theta_offset, &scale);
  fit.hypothesis.scale = scale;
  fit.converged = best_converged;
  return fit;
}

PairFit fit_pair(const PolarizationSweep& measured, const OrientationPair& pair,
                 const OpticalSystem& optics, const FitOptions& options) {
  return fit_pair(measured, pair, ForwardModel(optics), options);
}

FitResult fit_all(const PolarizationSweep& measured, const ForwardModel& model,
                  const FitOptions& options) {
  FitResult result;
  result.classes = degeneracy_classes();
  const auto& pairs = enumerate_pairs();
  result.per_pair.reserve(pairs.size());
  for (const auto& pair : pairs) {
    result.per_pair.push_back(fit_pair(measured, pair, model, options));
    result.all_converged = result.all_converged && result.per_pair.back().converged;
  }

  result.class_chi_squared.assign(result.classes.size(),
                                  std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < result.classes.size(); ++c)
    for (const auto& member : result.classes[c].members) {
      const double chi2 =
          result.per_pair[static_cast<std::size_t>(pair_index(member))].chi_squared;
      result.class_chi_squared[c] = std::min(result.class_chi_squared[c], chi2);
    }

  result.best_class = static_cast<int>(
      std::min_element(result.class_chi_squared.begin(), result.class_chi_squared.end()) -
      result.class_chi_squared.begin());

  double next_best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < result.classes.size(); ++c)
    if (static_cast<int>(c) != result.best_class)
      next_best = std::min(next_best, result.class_chi_squared[c]);

  int best_pair = -1;
  double best_chi2 = std::numeric_limits<double>::infinity();
  for (const auto& member : result.classes[static_cast<std::size_t>(result.best_class)].members) {
    const int idx = pair_index(member);
    const double chi2 = result.per_pair[static_cast<std::size_t>(idx)].chi_squared;
    if (chi2 < best_chi2) {
      best_chi2 = chi2;
      best_pair = idx;
    }
  }
  result.best_pair = best_pair;

  const PairFit& best = result.best();
  result.recovered_ratio = best.hypothesis.ratio;
  result.recovered_background = best.hypothesis.background;

  if (best.hypothesis.ratio < options.ratio_floor) {
    result.verdict = Verdict::OneEmitter;
  } else if (best.chi_squared <= options.rel_margin * next_best) {
    result.verdict = Verdict::TwoEmitters;
  } else {
    result.verdict = Verdict::Inconclusive;
  }
  return result;
}

FitResult fit_all(const PolarizationSweep& measured, const OpticalSystem& optics,
                  const FitOptions& options) {
  return fit_all(measured, ForwardModel(optics), options);
}

double confidence_ellipse_quantile() { return -2.0 * std::log(1.0 - 0.683); }

ConfidenceSummary confidence_monte_carlo(const EmitterSystem& truth,
                                         const ForwardModel& model, double t,
                                         int n_trials, RandomSeed seed,
                                         const FitOptions& options, int threads) {
  truth.validate();
  if (n_trials < 2)
    throw std::invalid_argument("confidence_monte_carlo: need at least 2 trials");
  if (truth.emitters.empty() || truth.emitters.size() > 2)
    throw std::invalid_argument("confidence_monte_carlo: one or two emitters");

  const OrientationPair pair =
      truth.emitters.size() == 2
          ? OrientationPair::make(truth.emitters[0].orientation.label,
                                  truth.emitters[1].orientation.label)
          : OrientationPair::make(truth.emitters[0].orientation.label,
                                  truth.emitters[0].orientation.label);
  const Eigen::VectorXd angles = default_angle_grid_deg();

  ConfidenceSummary summary;
  summary.n_trials = n_trials;
  summary.samples.resize(n_trials, 3);

  parallel_for(n_trials, threads, [&](int trial) {
    const RandomSeed trial_seed{derive_stream(seed.value, static_cast<std::uint64_t>(trial))};
    const PolarizationSweep sweep = generate_sweep(truth, model, t, trial_seed, angles);
    const PairFit fit = fit_pair(sweep, pair, model, options);
    summary.samples(trial, 0) = fit.hypothesis.ratio;
    summary.samples(trial, 1) = fit.hypothesis.background;
    summary.samples(trial, 2) = fit.chi_squared;
  });

  summary.mean_ratio = summary.samples.col(0).mean();
  summary.mean_background = summary.samples.col(1).mean();
  const Eigen::VectorXd dr = summary.samples.col(0).array() - summary.mean_ratio;
  const Eigen::VectorXd db = summary.samples.col(1).array() - summary.mean_background;
  const double inv = 1.0 / (n_trials - 1);
  summary.covariance(0, 0) = dr.squaredNorm() * inv;
  summary.covariance(1, 1) = db.squaredNorm() * inv;
  summary.covariance(0, 1) = summary.covariance(1, 0) = dr.dot(db) * inv;
  const double det = std::max(summary.covariance.determinant(), 0.0);
  summary.sigma1_area = kPi * std::sqrt(det) * confidence_ellipse_quantile();
  return summary;
}

ConfidenceSummary confidence_monte_carlo(const EmitterSystem& truth,
                                         const OpticalSystem& optics, double t,
                                         int n_trials, RandomSeed seed,
                                         const FitOptions& options, int threads) {
  return confidence_monte_carlo(truth, ForwardModel(optics), t, n_trials, seed,
                                options, threads);
}

namespace {

EmitterSystem pair_truth(const OrientationPair& pair, double ratio, double background) {
  EmitterSystem truth;
  truth.emitters.push_back({orientation(pair.first), 0.0, 1.0});
  truth.emitters.push_back({orientation(pair.second), 0.0, ratio});
  truth.background = background;
  return truth;
}

}  // namespace

Eigen::MatrixXd min_acquisition_time(const Eigen::VectorXd& ratios,
                                     const Eigen::VectorXd& backgrounds,
                                     const OrientationPair& pair,
                                     const ForwardModel& model, RandomSeed seed,
                                     const TminSearchOptions& options) {
  Eigen::MatrixXd tmin(ratios.size(), backgrounds.size());
  const int cells = static_cast<int>(ratios.size() * backgrounds.size());

  parallel_for(cells, options.threads, [&](int cell) {
    const Eigen::Index i = cell / backgrounds.size();
    const Eigen::Index j = cell % backgrounds.size();
    const EmitterSystem truth = pair_truth(pair, ratios[i], backgrounds[j]);

    // Trial seeds depend only on the trial index: common random numbers
    // across cells and probes keep the map smooth in both directions.
    auto meets_target = [&](double t) {
      const ConfidenceSummary s = confidence_monte_carlo(
          truth, model, t, options.trials, seed, options.fit, 1);
      const double q = confidence_ellipse_quantile();
      const double wr = std::sqrt(q * s.covariance(0, 0));
      const double wb = std::sqrt(q * s.covariance(1, 1));
      return std::max(wr, wb) <= options.target;
    };

    double t_hi = options.t_start;
    double t_lo = 0.0;
    bool reached = meets_target(t_hi);
    while (!reached && t_hi < options.t_cap) {
      t_lo = t_hi;
      t_hi = std::min(t_hi * 2.0, options.t_cap);
      reached = meets_target(t_hi);
    }
    if (!reached) {
      tmin(i, j) = std::numeric_limits<double>::infinity();
      return;
    }
    if (t_lo > 0.0) {
      for (int step = 0; step < options.bisection_steps; ++step) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (meets_target(mid))
          t_hi = mid;
        else
          t_lo = mid;
      }
    }
    tmin(i, j) = t_hi;
  });
  return tmin;
}

SweepErrorMaps background_error_sweep(const Eigen::VectorXd& ratios,
                                      const Eigen::VectorXd& backgrounds,
                                      const OrientationPair& pair,
                                      const ForwardModel& model, double t,
                                      RandomSeed seed, const FitOptions& options,
                                      int threads) {
  SweepErrorMaps maps;
  maps.ratio_error.resize(ratios.size(), backgrounds.size());
  maps.background_error.resize(ratios.size(), backgrounds.size());
  maps.chi_squared.resize(ratios.size(), backgrounds.size());
  const Eigen::VectorXd angles = default_angle_grid_deg();
  const int cells = static_cast<int>(ratios.size() * backgrounds.size());

  parallel_for(cells, threads, [&](int cell) {
    const Eigen::Index i = cell / backgrounds.size();
    const Eigen::Index j = cell % backgrounds.size();
    const EmitterSystem truth = pair_truth(pair, ratios[i], backgrounds[j]);
    const RandomSeed cell_seed{derive_stream(seed.value, static_cast<std::uint64_t>(i),
                                             static_cast<std::uint64_t>(j))};
    const PolarizationSweep sweep = generate_sweep(truth, model, t, cell_seed, angles);
    const PairFit fit = fit_pair(sweep, pair, model, options);
    maps.ratio_error(i, j) = std::abs(fit.hypothesis.ratio - ratios[i]);
    maps.background_error(i, j) = std::abs(fit.hypothesis.background - backgrounds[j]);
    maps.chi_squared(i, j) = fit.chi_squared;
  });
  return maps;
}

}  // namespace nvpol
