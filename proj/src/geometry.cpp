#include "nvpol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nvpol {

namespace {
constexpr double kPi = std::numbers::pi;
}

char to_char(NvLabel label) {
  switch (label) {
    case NvLabel::A: return 'a';
    case NvLabel::B: return 'b';
    case NvLabel::C: return 'c';
    case NvLabel::D: return 'd';
  }
  throw std::invalid_argument("to_char: bad NvLabel");
}

NvLabel label_from_char(char c) {
  switch (c) {
    case 'a': case 'A': return NvLabel::A;
    case 'b': case 'B': return NvLabel::B;
    case 'c': case 'C': return NvLabel::C;
    case 'd': case 'D': return NvLabel::D;
  }
  throw std::invalid_argument(std::string("unknown orientation label '") + c +
                              "' (expected one of a, b, c, d)");
}

NvOrientation NvOrientation::from_axis(NvLabel label, const Vec3& axis) {
  const double n = axis.norm();
  if (n <= 0.0) throw std::invalid_argument("NvOrientation: zero axis");
  NvOrientation o;
  o.label = label;
  o.axis = axis / n;
  o.polar = std::acos(std::clamp(o.axis.z(), -1.0, 1.0));
  o.azimuth = std::atan2(o.axis.y(), o.axis.x());
  return o;
}

const std::array<NvOrientation, 4>& nv_axes() {
  static const std::array<NvOrientation, 4> axes = {
      NvOrientation::from_axis(NvLabel::A, Vec3(1, 1, 1)),
      NvOrientation::from_axis(NvLabel::B, Vec3(-1, -1, 1)),
      NvOrientation::from_axis(NvLabel::C, Vec3(1, -1, -1)),
      NvOrientation::from_axis(NvLabel::D, Vec3(-1, 1, -1)),
  };
  return axes;
}

const NvOrientation& orientation(NvLabel label) {
  return nv_axes()[static_cast<std::size_t>(label)];
}

OrientationPair OrientationPair::make(NvLabel x, NvLabel y) {
  if (static_cast<int>(x) > static_cast<int>(y)) std::swap(x, y);
  return OrientationPair{x, y};
}

OrientationPair OrientationPair::from_string(const std::string& s) {
  if (s.size() != 2)
    throw std::invalid_argument("orientation pair must be two characters, got '" + s + "'");
  return make(label_from_char(s[0]), label_from_char(s[1]));
}

std::string OrientationPair::str() const {
  return std::string{to_char(first), to_char(second)};
}

const std::vector<OrientationPair>& enumerate_pairs() {
  static const std::vector<OrientationPair> pairs = [] {
    std::vector<OrientationPair> p;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        p.push_back(OrientationPair::make(static_cast<NvLabel>(i), static_cast<NvLabel>(j)));
    return p;
  }();
  return pairs;
}

int pair_index(const OrientationPair& pair) {
  const auto& pairs = enumerate_pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i] == pair) return static_cast<int>(i);
  throw std::invalid_argument("pair_index: not a canonical pair");
}

bool DegeneracyClass::contains(const OrientationPair& pair) const {
  for (const auto& m : members)
    if (m == pair) return true;
  return false;
}

std::vector<DegeneracyClass> group_pairs_by_curves(
    const std::function<Eigen::VectorXd(const OrientationPair&, double, double)>& curve,
    double tol) {
  const auto& pairs = enumerate_pairs();

  // Signature per pair: curves concatenated over a (ratio, background) grid.
  const std::vector<double> ratios = {0.25, 0.5, 0.75, 1.0};
  const std::vector<double> backgrounds = {0.0, 0.15, 0.3};
  std::vector<Eigen::VectorXd> signatures;
  signatures.reserve(pairs.size());
  for (const auto& p : pairs) {
    std::vector<Eigen::VectorXd> parts;
    Eigen::Index total = 0;
    for (double r : ratios)
      for (double b : backgrounds) {
        parts.push_back(curve(p, r, b));
        total += parts.back().size();
      }
    Eigen::VectorXd sig(total);
    Eigen::Index at = 0;
    for (const auto& part : parts) {
      sig.segment(at, part.size()) = part;
      at += part.size();
    }
    signatures.push_back(std::move(sig));
  }

  std::vector<DegeneracyClass> classes;
  std::vector<int> assigned(pairs.size(), -1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (assigned[i] >= 0) continue;
    DegeneracyClass cls;
    cls.id = static_cast<int>(classes.size());
    cls.members.push_back(pairs[i]);
    assigned[i] = cls.id;
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if (assigned[j] >= 0) continue;
      if ((signatures[i] - signatures[j]).cwiseAbs().maxCoeff() < tol) {
        cls.members.push_back(pairs[j]);
        assigned[j] = cls.id;
      }
    }
    classes.push_back(std::move(cls));
  }
  return classes;
}

namespace {

// Small-aperture limit of the polarized detection probability of one NV:
// the two orthonormal emission dipoles span the plane perpendicular to the
// axis n, so the per-axis probability through a polarizer along
// e = (cos t, sin t, 0) is |e|^2 - (n.e)^2 = 1 - sin^2(polar) cos^2(t - azimuth).
double paraxial_probability(const NvOrientation& o, double theta) {
  const double s = std::sin(o.polar);
  const double c = std::cos(theta - o.azimuth);
  return 1.0 - s * s * c * c;
}

Eigen::VectorXd paraxial_pair_curve(const OrientationPair& pair, double ratio,
                                    double background) {
  const int n = 19;  // 0..180 deg, 10 deg steps
  Eigen::VectorXd out(2 * n);
  const NvOrientation& o1 = orientation(pair.first);
  const NvOrientation& o2 = orientation(pair.second);
  for (int i = 0; i < n; ++i) {
    const double theta = kPi * i / (n - 1);
    const double p1 = paraxial_probability(o1, theta);
    const double p2 = ratio * paraxial_probability(o2, theta);
    const double total = p1 + p2 + background;  // solo peaks are 1, so the
                                                // background convention holds
    out[i] = total;
    out[n + i] = 1.0 - (p1 * p1 + p2 * p2) / (total * total);
  }
  return out;
}

}  // namespace

const std::vector<DegeneracyClass>& degeneracy_classes() {
  static const std::vector<DegeneracyClass> classes =
      group_pairs_by_curves(paraxial_pair_curve);
  return classes;
}

const DegeneracyClass& degeneracy_class(const OrientationPair& pair) {
  for (const auto& cls : degeneracy_classes())
    if (cls.contains(pair)) return cls;
  throw std::invalid_argument("degeneracy_class: not a canonical pair");
}

}  // namespace nvpol
