#include "nvpol/odmr.hpp"

#include "nvpol/synthetic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace nvpol {

Vec3 OdmrConfig::default_b_field_mt() {
  // Direction (1/3, 1/3, 1); magnitude set so the orientation best aligned
  // with it (axis a) splits by 20 MHz, clearly resolved at the default
  // linewidth for a single orientation.
  const Vec3 direction = Vec3(1.0 / 3.0, 1.0 / 3.0, 1.0).normalized();
  double best = 0.0;
  for (const auto& o : nv_axes()) best = std::max(best, std::abs(direction.dot(o.axis)));
  const double magnitude = 0.020 / (2.0 * 0.028024 * best);
  return magnitude * direction;
}

Eigen::VectorXd OdmrConfig::default_frequency_grid_ghz() {
  return Eigen::VectorXd::LinSpaced(1601, 2.657, 3.057);
}

void OdmrConfig::validate() const {
  if (zero_field_splitting_ghz <= 0.0)
    throw std::invalid_argument("OdmrConfig: zero_field_splitting must be > 0");
  if (linewidth_mhz <= 0.0)
    throw std::invalid_argument("OdmrConfig: linewidth must be > 0");
  if (contrast_per_nv <= 0.0 || contrast_per_nv >= 1.0)
    throw std::invalid_argument("OdmrConfig: contrast must be in (0, 1)");
  if (frequency_grid_ghz.size() < 2)
    throw std::invalid_argument("OdmrConfig: frequency grid too short");
}

std::vector<std::string> OdmrConfig::warnings() const {
  std::vector<std::string> w;
  if (b_field_mt.norm() > 10.0)
    w.push_back("field magnitude " + std::to_string(b_field_mt.norm()) +
                " mT exceeds the linear-Zeeman validity guideline of 10 mT");
  return w;
}

std::pair<double, double> resonance_frequencies(const Vec3& axis,
                                                const OdmrConfig& config) {
  config.validate();
  const Vec3 n = axis.normalized();
  Vec3 u = Vec3::UnitZ().cross(n);
  if (u.norm() < 1e-12) u = Vec3::UnitX().cross(n);
  u.normalize();
  const Vec3 v = n.cross(u);

  // Field components in the NV frame, in GHz via the gyromagnetic ratio.
  const Vec3 b_tesla = config.b_field_mt * 1e-3;
  const double gx = config.gyromagnetic_ratio_ghz_per_t * b_tesla.dot(u);
  const double gy = config.gyromagnetic_ratio_ghz_per_t * b_tesla.dot(v);
  const double gz = config.gyromagnetic_ratio_ghz_per_t * b_tesla.dot(n);
  const double d = config.zero_field_splitting_ghz;

  using Mat3c = Eigen::Matrix3cd;
  const std::complex<double> im(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Mat3c sz = Mat3c::Zero(), sx = Mat3c::Zero(), sy = Mat3c::Zero();
  sz(0, 0) = 1.0;
  sz(2, 2) = -1.0;
  sx(0, 1) = sx(1, 0) = sx(1, 2) = sx(2, 1) = inv_sqrt2;
  sy(0, 1) = -im * inv_sqrt2;
  sy(1, 0) = im * inv_sqrt2;
  sy(1, 2) = -im * inv_sqrt2;
  sy(2, 1) = im * inv_sqrt2;

  const Mat3c h = d * sz * sz + gx * sx + gy * sy + gz * sz;
  Eigen::SelfAdjointEigenSolver<Mat3c> solver(h);
  const Eigen::Vector3d e = solver.eigenvalues();  // ascending
  return {e[1] - e[0], e[2] - e[0]};
}

std::pair<double, double> secular_resonances(const Vec3& axis,
                                             const OdmrConfig& config) {
  const double parallel = config.gyromagnetic_ratio_ghz_per_t *
                          std::abs((config.b_field_mt * 1e-3).dot(axis.normalized()));
  return {config.zero_field_splitting_ghz - parallel,
          config.zero_field_splitting_ghz + parallel};
}

OdmrSpectrum spectrum(const std::vector<OdmrEmitter>& emitters,
                      const OdmrConfig& config) {
  config.validate();
  if (emitters.empty()) throw std::invalid_argument("spectrum: no emitters");
  double total_weight = 0.0;
  for (const auto& e : emitters) {
    if (e.weight < 0.0) throw std::invalid_argument("spectrum: negative weight");
    total_weight += e.weight;
  }
  if (total_weight <= 0.0) throw std::invalid_argument("spectrum: zero total weight");

  const double half_width = 0.5 * config.linewidth_mhz * 1e-3;  // GHz
  const double hw2 = half_width * half_width;

  OdmrSpectrum out;
  out.frequencies_ghz = config.frequency_grid_ghz;
  out.normalized_pl = Eigen::VectorXd::Ones(config.frequency_grid_ghz.size());
  for (const auto& e : emitters) {
    const auto [f_minus, f_plus] = resonance_frequencies(e.axis, config);
    const double depth = (e.weight / total_weight) * config.contrast_per_nv;
    for (Eigen::Index i = 0; i < out.frequencies_ghz.size(); ++i) {
      const double f = out.frequencies_ghz[i];
      const double dm = f - f_minus, dp = f - f_plus;
      out.normalized_pl[i] -=
          depth * (hw2 / (dm * dm + hw2) + hw2 / (dp * dp + hw2));
    }
  }
  return out;
}

OdmrSpectrum add_odmr_noise(const OdmrSpectrum& clean, double photons_per_point,
                            RandomSeed seed) {
  if (photons_per_point <= 0.0)
    throw std::invalid_argument("add_odmr_noise: photons_per_point must be > 0");
  OdmrSpectrum noisy;
  noisy.frequencies_ghz = clean.frequencies_ghz;
  noisy.normalized_pl.resize(clean.normalized_pl.size());
  for (Eigen::Index i = 0; i < clean.normalized_pl.size(); ++i) {
    const auto counts = sample_counts(
        std::max(clean.normalized_pl[i], 0.0), photons_per_point,
        RandomSeed{derive_stream(seed.value, static_cast<std::uint64_t>(i))});
    noisy.normalized_pl[i] = static_cast<double>(counts) / photons_per_point;
  }
  return noisy;
}

}  // namespace nvpol
