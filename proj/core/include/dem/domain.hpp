#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dem {

/// Open axis-aligned box in (t, y_1, ..., y_a) space.
///
/// Distances are measured in the l-infinity metric, for which the distance
/// of an interior point to the boundary of a box is the smallest distance to
/// any of its 2(a+1) faces.
class Domain {
 public:
  Domain(double t_lo, double t_hi, std::vector<double> lo, std::vector<double> hi);

  std::size_t dimension() const { return lo_.size(); }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }

  /// Signed distance to the boundary: positive strictly inside, zero on a
  /// face, negative outside. 1-Lipschitz in l-infinity.
  double boundary_distance(double t, std::span<const double> y) const;

  /// Same, for a packed point (t, y_1, ..., y_a).
  double boundary_distance(std::span<const double> point) const;

  bool contains(double t, std::span<const double> y) const {
    return boundary_distance(t, y) > 0.0;
  }

 private:
  double t_lo_;
  double t_hi_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

}  // namespace dem
