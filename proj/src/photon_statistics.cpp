#include "nvpol/photon_statistics.hpp"

#include <cmath>
#include <stdexcept>

namespace nvpol {

double g2_of_rates(const Eigen::Ref<const Eigen::VectorXd>& rates,
                   double background_rate) {
  if (background_rate < 0.0 || (rates.size() > 0 && rates.minCoeff() < 0.0))
    throw std::invalid_argument("g2_of_rates: negative rate");
  const double total = rates.sum() + background_rate;
  if (total <= 0.0) throw std::invalid_argument("g2_of_rates: all rates are zero");
  return 1.0 - rates.squaredNorm() / (total * total);
}

double g2_angular(double theta, const OrientationPair& pair, double scale1,
                  double scale2, double np_gamma, const ForwardModel& model) {
  if (scale1 < 0.0 || scale2 < 0.0 || np_gamma < 0.0)
    throw std::invalid_argument("g2_angular: negative input");
  const double p1 = scale1 * model.rate(pair.first, theta);
  const double p2 = scale2 * model.rate(pair.second, theta);
  return g2_two_background(p1, p2, np_gamma);
}

double g2_angular(double theta, const OrientationPair& pair, double scale1,
                  double scale2, double np_gamma, const OpticalSystem& optics) {
  return g2_angular(theta, pair, scale1, scale2, np_gamma, ForwardModel(optics));
}

Eigen::VectorXd g2_curve(const EmitterSystem& system, const ForwardModel& model,
                         const Eigen::VectorXd& angles_rad) {
  system.validate();
  const double bg = system.background * system.max_brightness();
  Eigen::VectorXd rates(static_cast<Eigen::Index>(system.emitters.size()));
  Eigen::VectorXd out(angles_rad.size());
  for (Eigen::Index i = 0; i < angles_rad.size(); ++i) {
    for (std::size_t k = 0; k < system.emitters.size(); ++k)
      rates[static_cast<Eigen::Index>(k)] =
          system.emitters[k].brightness *
          model.rate(system.emitters[k].orientation.label, angles_rad[i]);
    out[i] = g2_of_rates(rates, bg);
  }
  return out;
}

double unpolarized_g2(const EmitterSystem& system, const ForwardModel& model) {
  system.validate();
  const double bg = system.background * system.max_brightness();
  Eigen::VectorXd rates(static_cast<Eigen::Index>(system.emitters.size()));
  for (std::size_t k = 0; k < system.emitters.size(); ++k)
    rates[static_cast<Eigen::Index>(k)] =
        system.emitters[k].brightness *
        model.mean_rate(system.emitters[k].orientation.label);
  return g2_of_rates(rates, bg);
}

double unpolarized_g2(const EmitterSystem& system, const OpticalSystem& optics) {
  return unpolarized_g2(system, ForwardModel(optics));
}

Eigen::MatrixXd g2_map_two(const Eigen::Ref<const Eigen::VectorXd>& ratios,
                           const Eigen::Ref<const Eigen::VectorXd>& backgrounds) {
  Eigen::MatrixXd map(ratios.size(), backgrounds.size());
  for (Eigen::Index i = 0; i < ratios.size(); ++i)
    for (Eigen::Index j = 0; j < backgrounds.size(); ++j)
      map(i, j) = g2_two_background(1.0, ratios[i], backgrounds[j]);
  return map;
}

Eigen::MatrixXd g2_map_three(const Eigen::Ref<const Eigen::VectorXd>& ratios2,
                             const Eigen::Ref<const Eigen::VectorXd>& ratios3) {
  Eigen::MatrixXd map(ratios2.size(), ratios3.size());
  for (Eigen::Index i = 0; i < ratios2.size(); ++i)
    for (Eigen::Index j = 0; j < ratios3.size(); ++j)
      map(i, j) = g2_three(1.0, ratios2[i], ratios3[j]);
  return map;
}

}  // namespace nvpol
