#pragma once

#include "nvpol/geometry.hpp"
#include "nvpol/rng.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace nvpol {

/// Ground-state spin model and lineshape settings for ODMR simulation.
struct OdmrConfig {
  double zero_field_splitting_ghz = 2.857;
  double gyromagnetic_ratio_ghz_per_t = 28.024;
  Vec3 b_field_mt = default_b_field_mt();
  double linewidth_mhz = 6.0;      // Lorentzian FWHM
  double contrast_per_nv = 0.15;   // dip depth of a lone NV
  Eigen::VectorXd frequency_grid_ghz = default_frequency_grid_ghz();

  static Vec3 default_b_field_mt();
  static Eigen::VectorXd default_frequency_grid_ghz();

  void validate() const;
  /// Soft warnings, e.g. field strength beyond the linear-Zeeman regime.
  std::vector<std::string> warnings() const;
};

/// The two ground-state resonance frequencies (f_minus <= f_plus, GHz) of an
/// NV along `axis`: eigenvalue differences of D Sz^2 + gamma_e B.S in the NV
/// frame, by full 3x3 diagonalization.
std::pair<double, double> resonance_frequencies(const Vec3& axis,
                                                const OdmrConfig& config);

/// Secular approximation D +- gamma_e |B.axis|, kept as a cross-check of the
/// exact diagonalization.
std::pair<double, double> secular_resonances(const Vec3& axis,
                                             const OdmrConfig& config);

struct OdmrSpectrum {
  Eigen::VectorXd frequencies_ghz;
  Eigen::VectorXd normalized_pl;  // 1 far from resonance, dips at resonances
};

struct OdmrEmitter {
  Vec3 axis;
  double weight = 1.0;  // relative brightness
};

/// Normalized PL versus drive frequency: unity minus population-weighted
/// Lorentzian dips at each emitter's two resonances. Emitters sharing an
/// orientation stack their dips, so with two NVs along one axis and one
/// along another the lone orientation shows half the contrast.
OdmrSpectrum spectrum(const std::vector<OdmrEmitter>& emitters,
                      const OdmrConfig& config);

/// Photon shot noise: each point becomes Poisson(pl * photons)/photons.
OdmrSpectrum add_odmr_noise(const OdmrSpectrum& clean, double photons_per_point,
                            RandomSeed seed);

}  // namespace nvpol
