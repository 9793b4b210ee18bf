#include "dronecine/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dronecine/errors.hpp"

namespace dronecine::sim {

Terrain::Terrain(std::size_t nx, std::size_t ny, double cell_size, std::vector<double> heights,
                 double origin_east, double origin_north, std::vector<std::uint8_t> water)
    : nx_(nx),
      ny_(ny),
      cell_size_(cell_size),
      origin_east_(origin_east),
      origin_north_(origin_north),
      heights_(std::move(heights)),
      water_(std::move(water)) {
  if (nx_ < 2 || ny_ < 2) throw InvalidArgument("terrain needs at least 2x2 nodes", "terrain.nx");
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_))
    throw InvalidArgument("terrain cell size must be positive", "terrain.cell_size_m");
  if (!std::isfinite(origin_east_) || !std::isfinite(origin_north_))
    throw InvalidArgument("terrain origin must be finite", "terrain.origin");
  if (heights_.size() != nx_ * ny_)
    throw InvalidArgument("terrain height count " + std::to_string(heights_.size()) +
                              " does not match " + std::to_string(nx_) + "x" + std::to_string(ny_),
                          "terrain.heights_m");
  for (double h : heights_)
    if (!std::isfinite(h)) throw InvalidArgument("terrain heights must be finite", "terrain.heights_m");
  if (!water_.empty() && water_.size() != (nx_ - 1) * (ny_ - 1))
    throw InvalidArgument("water mask must hold one flag per cell", "terrain.water");
}

Terrain Terrain::flat(std::size_t nx, std::size_t ny, double cell_size, double height) {
  return Terrain(nx, ny, cell_size, std::vector<double>(nx * ny, height));
}

bool Terrain::contains(double east, double north) const {
  return east >= origin_east_ && east <= max_east() && north >= origin_north_ &&
         north <= max_north();
}

double Terrain::signed_edge_distance(double east, double north) const {
  const double de = std::min(east - origin_east_, max_east() - east);
  const double dn = std::min(north - origin_north_, max_north() - north);
  if (de >= 0.0 && dn >= 0.0) return std::min(de, dn);
  return -std::hypot(std::min(de, 0.0), std::min(dn, 0.0));
}

namespace {

struct CellCoord {
  std::size_t i;
  std::size_t j;
  double fx;
  double fy;
};

CellCoord locate(const Terrain& t, double east, double north) {
  const double u = (east - t.origin_east()) / t.cell_size();
  const double v = (north - t.origin_north()) / t.cell_size();
  const auto i = std::min(static_cast<std::size_t>(std::floor(u)), t.nx() - 2);
  const auto j = std::min(static_cast<std::size_t>(std::floor(v)), t.ny() - 2);
  return {i, j, u - static_cast<double>(i), v - static_cast<double>(j)};
}

}  // namespace

bool Terrain::is_water(double east, double north) const {
  if (water_.empty() || !contains(east, north)) return false;
  const CellCoord c = locate(*this, east, north);
  return water_[c.j * (nx_ - 1) + c.i] != 0;
}

double terrain_height_at(const Terrain& terrain, double east, double north) {
  if (!terrain.contains(east, north))
    throw OutOfBounds("point (" + std::to_string(east) + ", " + std::to_string(north) +
                          ") lies outside the terrain",
                      "position");
  const CellCoord c = locate(terrain, east, north);
  const double h00 = terrain.node_height(c.i, c.j);
  const double h10 = terrain.node_height(c.i + 1, c.j);
  const double h01 = terrain.node_height(c.i, c.j + 1);
  const double h11 = terrain.node_height(c.i + 1, c.j + 1);
  const double gx = 1.0 - c.fx;
  const double gy = 1.0 - c.fy;
  return gx * gy * h00 + c.fx * gy * h10 + gx * c.fy * h01 + c.fx * c.fy * h11;
}

}  // namespace dronecine::sim
