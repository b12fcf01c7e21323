#pragma once

#include <utility>

namespace mobgen {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  bool operator==(const GeoPoint&) const = default;
};

bool valid_coordinates(const GeoPoint& p);

/// Great-circle distance in meters (haversine, spherical Earth).
double haversine_m(const GeoPoint& a, const GeoPoint& b);

/// Equirectangular projection around a fixed origin; meter-accurate at city
/// scale, which is all the metrics need.
class LocalProjection {
public:
  explicit LocalProjection(GeoPoint origin);
  std::pair<double, double> to_xy_m(const GeoPoint& p) const;

private:
  GeoPoint origin_;
  double meters_per_deg_lon_;
};

}  // namespace mobgen
