#pragma once

#include "nvpol/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

namespace nvpol {

using Vec3c = Eigen::Vector3cd;

/// Collection geometry and quadrature settings for the detection-rate
/// integral over the objective's spherical cap.
struct OpticalSystem {
  double numerical_aperture = 1.98;
  double relative_permittivity = 5.76;  // diamond, n = 2.4
  double wavelength_nm = 700.0;         // sets the physical k only; relative
                                        // rates are wavelength independent
  int quadrature_points = 64;           // per angular dimension
  double far_field_radius_kr = 1.0e4;   // collection sphere radius, units 1/k

  double refractive_index() const;
  /// Half-angle of the collection cone inside the medium, asin(NA/n).
  /// NA/n > 1 is clamped to a pi/2 half-angle.
  double aperture_half_angle() const;
  bool aperture_clamped() const;
  void validate() const;
};

/// One NV emitter: two degenerate orthogonal emission dipoles perpendicular
/// to the NV axis, rotated about it by `beta`.
struct DipoleEmitter {
  NvOrientation orientation;
  double beta = 0.0;        // rotation of the dipole pair about the axis, rad
  double brightness = 1.0;  // relative detection-probability scale, >= 0

  /// The two orthonormal emission dipole directions.
  std::array<Vec3, 2> dipole_pair() const;
};

/// Ideal linear polarizer (parallel transmittance 1) at angle theta from
/// lab x. All predictions are pi-periodic in theta.
struct PolarizerSetting {
  double theta = 0.0;  // radians
};

/// Radiated field of a point dipole at an observation point given in units
/// of 1/k, with the common 1/(4 pi eps0 eps_r) prefactor dropped. Includes
/// the far-field term and both near-field terms.
Vec3c dipole_field(const Vec3& dipole_moment, const Vec3& observation_point_kr);

/// Polarized detection rate of a single dipole: the surface integral of
/// |E_x cos(theta) + E_y sin(theta)|^2 over the collection cap.
double dipole_detection_rate(const Vec3& dipole_moment, const OpticalSystem& optics,
                             double theta);

/// Polarized detection rate of an NV emitter: incoherent sum of the two
/// dipole rates, scaled by the emitter brightness. Independent of beta.
double detection_rate(const DipoleEmitter& emitter, const OpticalSystem& optics,
                      const PolarizerSetting& polarizer);

/// Closed-form angular detection probability
///   cos^2(t)(sin^2(p) + cos^2(g) cos^2(p)) + sin^2(t)(cos^2(p) + cos^2(g) sin^2(p))
/// for polarizer angle t, axis polar angle g and azimuth p. Note this form
/// carries no sin(t)cos(t) cross term, so it matches the collection integral's
/// small-aperture limit only when the azimuth is a multiple of pi/2; use it as
/// a shape check against detection_rate, not as the model.
double detection_probability_closed_form(double theta, double gamma_k, double phi_k);

/// Exact reduction of one emitter's polarized rate (both dipoles, unit
/// brightness) to a quadratic form in the polarizer direction:
///   D(theta) = cc cos^2 + ss sin^2 + cs sin cos.
struct PolarizationResponse {
  double cc = 0.0, ss = 0.0, cs = 0.0;

  double at(double theta) const;
  double peak() const;     // max over theta
  double minimum() const;  // min over theta
  double mean() const;     // average over theta
};

/// Integrates the response of an arbitrary emitter (beta drops out of the sum).
PolarizationResponse polarization_response(const DipoleEmitter& emitter,
                                           const OpticalSystem& optics);

/// Cached responses of the four canonical orientations for one optical
/// system, normalized so that a unit-brightness solo curve peaks at 1.
/// Immutable after construction; safe to share across threads.
class ForwardModel {
 public:
  explicit ForwardModel(const OpticalSystem& optics);

  const OpticalSystem& optics() const { return optics_; }
  const PolarizationResponse& response(NvLabel label) const {
    return response_[static_cast<std::size_t>(label)];
  }
  /// Peak of the raw solo curve, the normalization constant.
  double norm() const { return norm_; }
  /// Normalized rate of a unit-brightness emitter of the given orientation.
  double rate(NvLabel label, double theta) const {
    return response(label).at(theta) / norm_;
  }
  /// Theta-average of the normalized rate (the unpolarized-per-2 rate).
  double mean_rate(NvLabel label) const { return response(label).mean() / norm_; }

 private:
  OpticalSystem optics_;
  std::array<PolarizationResponse, 4> response_;
  double norm_ = 1.0;
};

/// One to three NV emitters plus an unpolarized background level.
struct EmitterSystem {
  std::vector<DipoleEmitter> emitters;
  /// Flat background intensity as a fraction of the brightest emitter's
  /// peak solo intensity.
  double background = 0.0;

  double max_brightness() const;
  void validate() const;
};

/// PL intensity versus polarizer angle: sum of the emitters' detection rates
/// plus the angle-independent background term, in relative units.
Eigen::VectorXd pl_curve(const EmitterSystem& system, const OpticalSystem& optics,
                         const Eigen::VectorXd& angles_rad);

}  // namespace nvpol
