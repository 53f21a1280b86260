#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "syncvision/registration.hpp"

namespace syncvision::geo {

inline constexpr double kLunarRadiusKm = 1737.4;

/// Selenographic position in degrees, treated as spherical lat/lon.
class GeoPoint {
 public:
  GeoPoint() = default;
  /// Throws std::invalid_argument outside [-90, 90] x [-180, 180].
  GeoPoint(double lat_deg, double lon_deg);
  double lat() const { return lat_; }
  double lon() const { return lon_; }

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

/// Great-circle distance, 2r asin(sqrt(hav(dphi) + cos phi1 cos phi2 hav(dlambda))).
double haversine_distance(const GeoPoint& a, const GeoPoint& b, double radius_km = kLunarRadiusKm);

/// rows x cols lattice of geo positions sampled every `step` pixels from
/// (origin_x, origin_y).
struct GeoGrid {
  int rows = 0;
  int cols = 0;
  double step = 100.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<GeoPoint> nodes;  // row-major

  const GeoPoint& node(int r, int c) const { return nodes[static_cast<std::size_t>(r) * cols + c]; }
  Point2 pixel(int r, int c) const { return {origin_x + c * step, origin_y + r * step}; }
  void validate() const;
};

struct GridMatch {
  int row = 0;
  int col = 0;
  Point2 pixel;
  double distance_km = 0.0;
};

/// Nearest lattice node by haversine distance; ties go to the first node in
/// row-major order.
GridMatch nearest_grid_pixel(const GeoGrid& grid, const GeoPoint& target, double radius_km = kLunarRadiusKm);

struct PixelRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool operator==(const PixelRect&) const = default;
};

/// Axis-aligned min/max box of the corners; when bounds are given the box is
/// clamped to [0, width-1] x [0, height-1].
PixelRect footprint_bbox(std::span<const Point2, 4> corners, std::optional<std::array<int, 2>> bounds = std::nullopt);

/// [a b tx; c d ty].
struct AffineTransform {
  std::array<double, 6> m{1, 0, 0, 0, 1, 0};
  Point2 apply(Point2 p) const { return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]}; }
};

struct PointPair {
  Point2 src;
  Point2 dst;
};

/// Least-squares affine fit through the 6x6 normal equations (centred and
/// scaled internally). Throws std::invalid_argument for fewer than 3 pairs
/// and DegenerateGeometry for collinear sources.
AffineTransform estimate_affine(std::span<const PointPair> pairs);

}  // namespace syncvision::geo
