#include "mobgen/geo.hpp"

#include <algorithm>
#include <cmath>

namespace mobgen {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

bool valid_coordinates(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

LocalProjection::LocalProjection(GeoPoint origin)
    : origin_(origin),
      meters_per_deg_lon_(kEarthRadiusM * kDegToRad * std::cos(origin.lat * kDegToRad)) {}

std::pair<double, double> LocalProjection::to_xy_m(const GeoPoint& p) const {
  const double x = (p.lon - origin_.lon) * meters_per_deg_lon_;
  const double y = (p.lat - origin_.lat) * kEarthRadiusM * kDegToRad;
  return {x, y};
}

}  // namespace mobgen
