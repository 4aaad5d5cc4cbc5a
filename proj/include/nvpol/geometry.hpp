#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nvpol {

using Vec3 = Eigen::Vector3d;

/// One of the four NV symmetry axes of a [100]-oriented diamond crystal.
enum class NvLabel : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

char to_char(NvLabel label);
NvLabel label_from_char(char c);

/// An NV axis together with its spherical angles in the lab frame.
/// The optical axis is lab z ([001]); the azimuth is measured from lab x,
/// which is also the zero of the polarizer angle.
struct NvOrientation {
  NvLabel label{NvLabel::A};
  Vec3 axis{Vec3::UnitZ()};
  double polar{0.0};    // angle between axis and +z, radians
  double azimuth{0.0};  // azimuth of the x-y projection, radians

  /// Builds an orientation from a (not necessarily normalized) axis vector.
  static NvOrientation from_axis(NvLabel label, const Vec3& axis);
};

/// The four canonical <111> axes:
///   a = ( 1, 1, 1)/sqrt(3)   b = (-1,-1, 1)/sqrt(3)
///   c = ( 1,-1,-1)/sqrt(3)   d = (-1, 1,-1)/sqrt(3)
/// Any global rotation about z maps to a polarizer-angle offset, so the
/// in-plane orientation of this frame is a pure convention.
const std::array<NvOrientation, 4>& nv_axes();

const NvOrientation& orientation(NvLabel label);

/// Unordered pair of orientation labels, repetition allowed.
/// Stored sorted so that equal pairs compare equal.
struct OrientationPair {
  NvLabel first{NvLabel::A};
  NvLabel second{NvLabel::A};

  static OrientationPair make(NvLabel x, NvLabel y);
  static OrientationPair from_string(const std::string& s);
  std::string str() const;  // e.g. "ac"

  bool operator==(const OrientationPair&) const = default;
};

/// All 10 unordered label pairs with repetition, in lexicographic order.
const std::vector<OrientationPair>& enumerate_pairs();

/// Index of a pair within enumerate_pairs().
int pair_index(const OrientationPair& pair);

/// A set of orientation pairs whose forward-model curves (PL intensity and
/// g2 versus polarizer angle, over all brightness ratios and backgrounds)
/// are pointwise identical, hence experimentally indistinguishable.
struct DegeneracyClass {
  int id{0};
  std::vector<OrientationPair> members;

  bool contains(const OrientationPair& pair) const;
};

/// Partitions the 10 pairs by comparing caller-supplied forward curves.
/// `curve` must return, for a pair and a (ratio, background) test point, a
/// fixed-length sampled signature; two pairs land in the same class when
/// their signatures agree within `tol` for every test point.
std::vector<DegeneracyClass> group_pairs_by_curves(
    const std::function<Eigen::VectorXd(const OrientationPair&, double ratio,
                                        double background)>& curve,
    double tol = 1e-9);

/// Degeneracy classes of the canonical axes, computed once at first use from
/// the small-aperture limit of the collection model (not hard-coded).
const std::vector<DegeneracyClass>& degeneracy_classes();

const DegeneracyClass& degeneracy_class(const OrientationPair& pair);

}  // namespace nvpol
