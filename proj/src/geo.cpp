#include "syncvision/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "syncvision/error.hpp"
#include "syncvision/linalg.hpp"

namespace syncvision::geo {

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat_(lat_deg), lon_(lon_deg) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0)) throw std::invalid_argument("latitude outside [-90, 90]");
  if (!(lon_deg >= -180.0 && lon_deg <= 180.0)) throw std::invalid_argument("longitude outside [-180, 180]");
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b, double radius_km) {
  if (!(radius_km > 0.0)) throw std::invalid_argument("radius must be positive");
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = a.lat() * deg, phi2 = b.lat() * deg;
  const double dphi = phi2 - phi1;
  const double dlambda = (b.lon() - a.lon()) * deg;
  const double s1 = std::sin(dphi / 2.0), s2 = std::sin(dlambda / 2.0);
  const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
  return 2.0 * radius_km * std::asin(std::sqrt(h));
}

void GeoGrid::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid must have at least one node");
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (nodes.size() != static_cast<std::size_t>(rows) * cols) throw std::invalid_argument("grid node count != rows*cols");
}

GridMatch nearest_grid_pixel(const GeoGrid& grid, const GeoPoint& target, double radius_km) {
  grid.validate();
  GridMatch best;
  best.distance_km = std::numeric_limits<double>::infinity();
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const double d = haversine_distance(grid.node(r, c), target, radius_km);
      if (d < best.distance_km) best = {r, c, grid.pixel(r, c), d};
    }
  return best;
}

PixelRect footprint_bbox(std::span<const Point2, 4> corners, std::optional<std::array<int, 2>> bounds) {
  PixelRect r{corners[0].x, corners[0].y, corners[0].x, corners[0].y};
  for (const Point2& p : corners) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("non-finite corner");
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  }
  if (bounds) {
    const double mx = (*bounds)[0] - 1.0, my = (*bounds)[1] - 1.0;
    r.x0 = std::clamp(r.x0, 0.0, mx);
    r.x1 = std::clamp(r.x1, 0.0, mx);
    r.y0 = std::clamp(r.y0, 0.0, my);
    r.y1 = std::clamp(r.y1, 0.0, my);
  }
  return r;
}

AffineTransform estimate_affine(std::span<const PointPair> pairs) {
  const std::size_t n = pairs.size();
  if (n < 3) throw std::invalid_argument("affine fit needs at least 3 pairs");

  // Condition both point sets: centroid to origin, unit mean distance.
  double sx = 0, sy = 0, dx = 0, dy = 0;
  for (const auto& p : pairs) {
    sx += p.src.x;
    sy += p.src.y;
    dx += p.dst.x;
    dy += p.dst.y;
  }
  sx /= n;
  sy /= n;
  dx /= n;
  dy /= n;
  double ss = 0, ds = 0;
  for (const auto& p : pairs) {
    ss += std::hypot(p.src.x - sx, p.src.y - sy);
    ds += std::hypot(p.dst.x - dx, p.dst.y - dy);
  }
  ss /= n;
  ds /= n;
  if (!(ss > 0.0)) throw DegenerateGeometry("source points coincide");
  if (!(ds > 0.0)) ds = 1.0;

  // Rows: [x y 1 0 0 0] -> u, [0 0 0 x y 1] -> v.
  std::vector<double> ata(36, 0.0), atb(6, 0.0);
  for (const auto& p : pairs) {
    const double x = (p.src.x - sx) / ss, y = (p.src.y - sy) / ss;
    const double u = (p.dst.x - dx) / ds, v = (p.dst.y - dy) / ds;
    const double r1[6] = {x, y, 1, 0, 0, 0};
    const double r2[6] = {0, 0, 0, x, y, 1};
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) ata[a * 6 + b] += r1[a] * r1[b] + r2[a] * r2[b];
      atb[a] += r1[a] * u + r2[a] * v;
    }
  }
  // Collinear sources make the 3x3 moment block singular.
  const double det3 = ata[0] * (ata[7] * ata[14] - ata[8] * ata[13]) - ata[1] * (ata[6] * ata[14] - ata[8] * ata[12]) +
                      ata[2] * (ata[6] * ata[13] - ata[7] * ata[12]);
  if (std::abs(det3) < 1e-9 * static_cast<double>(n * n * n)) throw DegenerateGeometry("source points are collinear");
  std::vector<double> sol;
  if (!linalg::solve_linear(ata, atb, 6, sol, 1e-12)) throw DegenerateGeometry("source points are collinear");

  // Undo conditioning: dst = ds * (A ((src - s_c) / ss)) + d_c.
  const double a = sol[0] * ds / ss, b = sol[1] * ds / ss;
  const double c = sol[3] * ds / ss, d = sol[4] * ds / ss;
  AffineTransform t;
  t.m = {a, b, dx + ds * sol[2] - a * sx - b * sy, c, d, dy + ds * sol[5] - c * sx - d * sy};
  return t;
}

}  // namespace syncvision::geo
