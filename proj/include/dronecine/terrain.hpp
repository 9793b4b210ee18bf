#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dronecine::sim {

// Height lattice with `nx` nodes east and `ny` nodes north; node (i, j) sits at
// (origin_east + i * cell_size, origin_north + j * cell_size). Heights are
// row-major by north index. `water` is empty or holds one flag per cell.
class Terrain {
 public:
  Terrain(std::size_t nx, std::size_t ny, double cell_size, std::vector<double> heights,
          double origin_east = 0.0, double origin_north = 0.0,
          std::vector<std::uint8_t> water = {});

  static Terrain flat(std::size_t nx, std::size_t ny, double cell_size, double height = 0.0);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double cell_size() const { return cell_size_; }
  double origin_east() const { return origin_east_; }
  double origin_north() const { return origin_north_; }
  double max_east() const { return origin_east_ + cell_size_ * static_cast<double>(nx_ - 1); }
  double max_north() const { return origin_north_ + cell_size_ * static_cast<double>(ny_ - 1); }
  const std::vector<double>& heights() const { return heights_; }
  const std::vector<std::uint8_t>& water() const { return water_; }

  double node_height(std::size_t i, std::size_t j) const { return heights_[j * nx_ + i]; }
  bool contains(double east, double north) const;
  /// Positive inside the lattice, negative outside: distance to the nearest edge.
  double signed_edge_distance(double east, double north) const;
  bool is_water(double east, double north) const;

  friend bool operator==(const Terrain&, const Terrain&) = default;

 private:
  std::size_t nx_;
  std::size_t ny_;
  double cell_size_;
  double origin_east_;
  double origin_north_;
  std::vector<double> heights_;
  std::vector<std::uint8_t> water_;
};

/// Bilinear interpolation of the four lattice nodes around (east, north).
/// Throws OutOfBounds outside the lattice.
double terrain_height_at(const Terrain& terrain, double east, double north);

}  // namespace dronecine::sim
