#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tamelab {

using Point = std::array<double, 3>;

enum class Bc : std::uint8_t { Neumann, Dirichlet };

// How a lattice end is treated.
//   Wall:     out-of-lattice neighbour is domain complement (boundary face).
//   Periodic: wrap around.
//   Open:     artificial truncation; the missing edge is dropped but the node
//             is not part of the boundary.
enum class End : std::uint8_t { Wall, Periodic, Open };

struct DomainSpec {
  std::string geometry = "box";
  int dim = 1;
  std::array<int, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  std::array<double, 3> spacing{1, 1, 1};
  std::array<std::array<End, 2>, 3> ends{};  // default Wall
  std::function<bool(const Point&)> inside;  // empty = whole box
  std::vector<std::uint8_t> mask;            // lattice mask, overrides inside
  Bc bc = Bc::Neumann;
  std::function<Bc(const Point&)> bc_at;     // per boundary node override
};

struct GridDomain {
  int dim = 1;
  std::array<int, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  std::array<double, 3> spacing{1, 1, 1};
  std::array<std::array<End, 2>, 3> ends{};
  std::vector<std::uint8_t> active_mask;  // per lattice node
  std::vector<int> active;                // lattice index of active node k
  std::vector<int> index_of;              // lattice index -> active index or -1
  std::vector<int> boundary_set;          // active indices, increasing
  std::vector<Bc> bc;                     // per active node
  std::vector<int> exposed_faces;         // per active node
  std::vector<double> sigma_over_m;       // per active node, sum over exposed faces of 1/h_axis
  std::string geometry_tag;

  int size() const { return static_cast<int>(active.size()); }
  int lattice_size() const { return shape[0] * shape[1] * shape[2]; }
  std::array<int, 3> lattice_coords(int lattice) const;
  int lattice_index(const std::array<int, 3>& c) const;
  Point position(int k) const;
  // Lattice neighbour of active node k along axis/direction, -1 when there is
  // none inside the lattice (after periodic wrap).
  int lattice_neighbor(int k, int axis, int dir) const;
  bool is_boundary(int k) const { return exposed_faces[k] > 0; }
  double cell_volume() const;
};

GridDomain build_grid(const DomainSpec& spec);

// Convenience builders for the shapes used throughout.
DomainSpec box_spec(int dim, int n, double lo, double hi, Bc bc = Bc::Neumann);
DomainSpec torus_spec(int dim, int n, double length = 1.0);
// y >= 0 half-plane window: x periodic, bottom row is the boundary, top is open.
DomainSpec halfplane_spec(int nx, int ny, double h);

// Grey-map (P2) image of a 2D slice of the mask: 0 inactive, 128 interior,
// 255 boundary.
std::string export_pgm(const GridDomain& d, int slice = 0);
void write_pgm(const GridDomain& d, const std::string& path, int slice = 0);

}  // namespace tamelab
