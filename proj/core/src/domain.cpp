#include "dem/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dem/error.hpp"

namespace dem {

Domain::Domain(double t_lo, double t_hi, std::vector<double> lo, std::vector<double> hi)
    : t_lo_(t_lo), t_hi_(t_hi), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.empty()) throw InstanceError("domain needs at least one coordinate");
  if (lo_.size() != hi_.size()) throw InstanceError("domain lo/hi have different lengths");
  if (!std::isfinite(t_lo_) || !std::isfinite(t_hi_) || !(t_lo_ < t_hi_)) {
    throw InstanceError("domain requires finite t_lo < t_hi");
  }
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!std::isfinite(lo_[k]) || !std::isfinite(hi_[k]) || !(lo_[k] < hi_[k])) {
      throw InstanceError("domain requires finite lo < hi for coordinate " + std::to_string(k));
    }
  }
}

double Domain::boundary_distance(double t, std::span<const double> y) const {
  if (y.size() != lo_.size()) {
    throw InstanceError("point has " + std::to_string(y.size()) + " coordinates, domain has " +
                        std::to_string(lo_.size()));
  }
  if (std::isnan(t)) return -std::numeric_limits<double>::infinity();
  double d = std::min(t - t_lo_, t_hi_ - t);
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (std::isnan(y[k])) return -std::numeric_limits<double>::infinity();
    d = std::min({d, y[k] - lo_[k], hi_[k] - y[k]});
  }
  return d;
}

double Domain::boundary_distance(std::span<const double> point) const {
  if (point.size() != lo_.size() + 1) {
    throw InstanceError("packed point must have a+1 = " + std::to_string(lo_.size() + 1) +
                        " entries, got " + std::to_string(point.size()));
  }
  return boundary_distance(point[0], point.subspan(1));
}

}  // namespace dem
