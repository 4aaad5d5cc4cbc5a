#include "nvpol/dipole.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nvpol {

namespace {
constexpr double kPi = std::numbers::pi;
}

double OpticalSystem::refractive_index() const {
  return std::sqrt(relative_permittivity);
}

double OpticalSystem::aperture_half_angle() const {
  const double s = numerical_aperture / refractive_index();
  return std::asin(std::min(s, 1.0));
}

bool OpticalSystem::aperture_clamped() const {
  return numerical_aperture / refractive_index() > 1.0;
}

void OpticalSystem::validate() const {
  if (numerical_aperture <= 0.0)
    throw std::invalid_argument("OpticalSystem: numerical_aperture must be > 0");
  if (relative_permittivity < 1.0)
    throw std::invalid_argument("OpticalSystem: relative_permittivity must be >= 1");
  if (quadrature_points < 16)
    throw std::invalid_argument("OpticalSystem: quadrature_points must be >= 16");
  if (far_field_radius_kr < 100.0)
    throw std::invalid_argument("OpticalSystem: far_field_radius_kr must be >= 100");
}

std::array<Vec3, 2> DipoleEmitter::dipole_pair() const {
  const Vec3& n = orientation.axis;
  Vec3 u = Vec3::UnitZ().cross(n);
  if (u.norm() < 1e-12) u = Vec3::UnitX().cross(n);
  u.normalize();
  const Vec3 v = n.cross(u);
  const double cb = std::cos(beta), sb = std::sin(beta);
  return {cb * u + sb * v, -sb * u + cb * v};
}

Vec3c dipole_field(const Vec3& p, const Vec3& x) {
  const double r = x.norm();
  if (r <= 0.0)
    throw std::invalid_argument("dipole_field: observation point at the source");
  const Vec3 rhat = x / r;
  const double rp = rhat.dot(p);
  const Vec3 transverse = p - rp * rhat;       // ((r x p) x r)/r^2
  const Vec3 near_dir = 3.0 * rp * rhat - p;   // (3 r (r.p) - r^2 p)/r^2
  const std::complex<double> near_amp(1.0 / (r * r * r), -1.0 / (r * r));
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, r));
  Vec3c field = transverse.cast<std::complex<double>>() / r +
                near_amp * near_dir.cast<std::complex<double>>();
  return phase * field;
}

namespace {

// Quadrature over the spherical collection cap: composite Simpson in the
// polar angle, uniform midpoints in the (periodic) azimuth. The callback
// receives the observation point and the area weight R^2 sin(polar) dA.
template <typename F>
void integrate_cap(const OpticalSystem& optics, F&& f) {
  optics.validate();
  int n_pol = optics.quadrature_points;
  if (n_pol % 2 != 0) ++n_pol;
  const int n_az = optics.quadrature_points;
  const double alpha = optics.aperture_half_angle();
  const double h = alpha / n_pol;
  const double dphi = 2.0 * kPi / n_az;
  const double radius = optics.far_field_radius_kr;
  const double r2 = radius * radius;

  for (int i = 0; i <= n_pol; ++i) {
    double w_pol = (i == 0 || i == n_pol) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w_pol *= h / 3.0;
    const double pol = i * h;
    const double sp = std::sin(pol), cp = std::cos(pol);
    if (sp == 0.0) continue;  // zero-measure ring at the pole
    for (int j = 0; j < n_az; ++j) {
      const double az = (j + 0.5) * dphi;
      const Vec3 point(radius * sp * std::cos(az), radius * sp * std::sin(az),
                       radius * cp);
      f(point, w_pol * dphi * sp * r2);
    }
  }
}

}  // namespace

double dipole_detection_rate(const Vec3& dipole, const OpticalSystem& optics,
                             double theta) {
  const double ct = std::cos(theta), st = std::sin(theta);
  double rate = 0.0;
  integrate_cap(optics, [&](const Vec3& x, double w) {
    const Vec3c e = dipole_field(dipole, x);
    rate += w * std::norm(e.x() * ct + e.y() * st);
  });
  return rate;
}

double detection_rate(const DipoleEmitter& emitter, const OpticalSystem& optics,
                      const PolarizerSetting& polarizer) {
  if (emitter.brightness < 0.0)
    throw std::invalid_argument("detection_rate: negative brightness");
  const auto dipoles = emitter.dipole_pair();
  double rate = 0.0;
  for (const Vec3& d : dipoles) rate += dipole_detection_rate(d, optics, polarizer.theta);
  return emitter.brightness * rate;
}

double detection_probability_closed_form(double theta, double gamma_k, double phi_k) {
  const double ct2 = std::cos(theta) * std::cos(theta);
  const double st2 = 1.0 - ct2;
  const double cg2 = std::cos(gamma_k) * std::cos(gamma_k);
  const double cp2 = std::cos(phi_k) * std::cos(phi_k);
  const double sp2 = 1.0 - cp2;
  return ct2 * (sp2 + cg2 * cp2) + st2 * (cp2 + cg2 * sp2);
}

double PolarizationResponse::at(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return cc * c * c + ss * s * s + cs * s * c;
}

double PolarizationResponse::peak() const {
  const double m = 0.5 * (cc + ss);
  return m + std::hypot(0.5 * (cc - ss), 0.5 * cs);
}

double PolarizationResponse::minimum() const {
  const double m = 0.5 * (cc + ss);
  return m - std::hypot(0.5 * (cc - ss), 0.5 * cs);
}

double PolarizationResponse::mean() const { return 0.5 * (cc + ss); }

PolarizationResponse polarization_response(const DipoleEmitter& emitter,
                                           const OpticalSystem& optics) {
  // One pass accumulates the 2x2 Hermitian pupil moments of the transverse
  // field; the polarizer projection is a quadratic form in them.
  const auto dipoles = emitter.dipole_pair();
  double mxx = 0.0, myy = 0.0;
  std::complex<double> mxy = 0.0;
  integrate_cap(optics, [&](const Vec3& x, double w) {
    for (const Vec3& d : dipoles) {
      const Vec3c e = dipole_field(d, x);
      mxx += w * std::norm(e.x());
      myy += w * std::norm(e.y());
      mxy += w * e.x() * std::conj(e.y());
    }
  });
  return PolarizationResponse{mxx, myy, 2.0 * mxy.real()};
}

ForwardModel::ForwardModel(const OpticalSystem& optics) : optics_(optics) {
  optics_.validate();
  double peak = 0.0;
  for (int k = 0; k < 4; ++k) {
    DipoleEmitter e{orientation(static_cast<NvLabel>(k)), 0.0, 1.0};
    response_[k] = polarization_response(e, optics_);
    peak = std::max(peak, response_[k].peak());
  }
  norm_ = peak;
}

double EmitterSystem::max_brightness() const {
  double m = 0.0;
  for (const auto& e : emitters) m = std::max(m, e.brightness);
  return m;
}

void EmitterSystem::validate() const {
  if (emitters.empty())
    throw std::invalid_argument("EmitterSystem: at least one emitter required");
  if (emitters.size() > 3)
    throw std::invalid_argument("EmitterSystem: at most three emitters supported");
  for (const auto& e : emitters)
    if (e.brightness < 0.0)
      throw std::invalid_argument("EmitterSystem: negative brightness");
  if (background < 0.0)
    throw std::invalid_argument("EmitterSystem: negative background");
  double total = background;
  for (const auto& e : emitters) total += e.brightness;
  if (total <= 0.0)
    throw std::invalid_argument("EmitterSystem: all rates are zero");
}

Eigen::VectorXd pl_curve(const EmitterSystem& system, const OpticalSystem& optics,
                         const Eigen::VectorXd& angles_rad) {
  system.validate();
  std::vector<PolarizationResponse> responses;
  responses.reserve(system.emitters.size());
  double brightest_peak = 0.0;
  for (const auto& e : system.emitters) {
    responses.push_back(polarization_response(e, optics));
    brightest_peak = std::max(brightest_peak, e.brightness * responses.back().peak());
  }
  const double bg = system.background * brightest_peak;
  Eigen::VectorXd out(angles_rad.size());
  for (Eigen::Index i = 0; i < angles_rad.size(); ++i) {
    double total = bg;
    for (std::size_t k = 0; k < responses.size(); ++k)
      total += system.emitters[k].brightness * responses[k].at(angles_rad[i]);
    out[i] = total;
  }
  return out;
}

}  // namespace nvpol
