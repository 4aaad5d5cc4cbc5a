#pragma once

#include "nvpol/dipole.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace nvpol {

/// g2(0) of n single-photon emitters of equal brightness: 1 - 1/n.
template <typename Scalar = double>
Scalar g2_equal(int n) {
  if (n < 1) throw std::invalid_argument("g2_equal: n must be >= 1");
  return Scalar(1) - Scalar(1) / Scalar(n);
}

/// g2(0) of two emitters with detection-probability ratio alpha:
/// 2 alpha / (1 + alpha)^2. Symmetric under alpha -> 1/alpha.
template <typename Scalar>
Scalar g2_two(Scalar alpha) {
  if (alpha < Scalar(0)) throw std::invalid_argument("g2_two: negative ratio");
  const Scalar s = Scalar(1) + alpha;
  return Scalar(2) * alpha / (s * s);
}

/// g2(0) of two emitters plus an unpolarized background bath of total
/// detection probability np_gamma:
///   (2 P1 P2 + 2 (P1 + P2) NPg + NPg^2) / (P1 + P2 + NPg)^2.
template <typename Scalar>
Scalar g2_two_background(Scalar p1, Scalar p2, Scalar np_gamma) {
  if (p1 < Scalar(0) || p2 < Scalar(0) || np_gamma < Scalar(0))
    throw std::invalid_argument("g2_two_background: negative input");
  const Scalar total = p1 + p2 + np_gamma;
  if (total <= Scalar(0))
    throw std::invalid_argument("g2_two_background: all rates are zero");
  return (Scalar(2) * p1 * p2 + Scalar(2) * (p1 + p2) * np_gamma +
          np_gamma * np_gamma) /
         (total * total);
}

/// Three-emitter extension, zero background: the pairwise-coincidence sum
/// 2 (P1 P2 + P1 P3 + P2 P3) / (P1 + P2 + P3)^2. Reduces to g2_equal(3) at
/// equal brightness and to g2_two when one probability vanishes.
template <typename Scalar>
Scalar g2_three(Scalar p1, Scalar p2, Scalar p3) {
  if (p1 < Scalar(0) || p2 < Scalar(0) || p3 < Scalar(0))
    throw std::invalid_argument("g2_three: negative input");
  const Scalar total = p1 + p2 + p3;
  if (total <= Scalar(0)) throw std::invalid_argument("g2_three: all rates are zero");
  return Scalar(2) * (p1 * p2 + p1 * p3 + p2 * p3) / (total * total);
}

/// g2(0) of up to three emitters with detection rates `rates` plus an
/// unpolarized background rate. Equals 1 - sum(rates^2)/total^2; the
/// background contributes no self-coincidence suppression.
double g2_of_rates(const Eigen::Ref<const Eigen::VectorXd>& rates,
                   double background_rate);

/// Polarization-resolved g2(0) of an orientation pair at polarizer angle
/// theta: per-emitter detection rates come from the dipole model (normalized
/// so a unit-scale solo curve peaks at 1), then the two-emitter background
/// formula applies. `np_gamma` is on the same normalized scale.
double g2_angular(double theta, const OrientationPair& pair, double scale1,
                  double scale2, double np_gamma, const ForwardModel& model);
double g2_angular(double theta, const OrientationPair& pair, double scale1,
                  double scale2, double np_gamma, const OpticalSystem& optics);

/// g2(0) versus polarizer angle for a full emitter system (background given
/// in the peak-relative convention of EmitterSystem).
Eigen::VectorXd g2_curve(const EmitterSystem& system, const ForwardModel& model,
                         const Eigen::VectorXd& angles_rad);

/// g2(0) with the polarizer removed: per-emitter rates are the theta-averages
/// of the polarized curves (for the cos^2-family curves this equals the
/// full-aperture rate up to the factor 2 a polarizer discards, which cancels).
double unpolarized_g2(const EmitterSystem& system, const ForwardModel& model);
double unpolarized_g2(const EmitterSystem& system, const OpticalSystem& optics);

/// Two-emitter g2 map over (ratio, background) with P1 = 1, P2 = ratio,
/// NP_gamma = background (background in units of P1). Rows follow `ratios`.
Eigen::MatrixXd g2_map_two(const Eigen::Ref<const Eigen::VectorXd>& ratios,
                           const Eigen::Ref<const Eigen::VectorXd>& backgrounds);

/// Three-emitter g2 map over two brightness ratios with P1 = 1, zero
/// background. Rows follow `ratios2`.
Eigen::MatrixXd g2_map_three(const Eigen::Ref<const Eigen::VectorXd>& ratios2,
                             const Eigen::Ref<const Eigen::VectorXd>& ratios3);

}  // namespace nvpol
