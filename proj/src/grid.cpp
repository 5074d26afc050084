#include "tamelab/grid.hpp"

#include <fstream>
#include <sstream>

#include "tamelab/errors.hpp"

namespace tamelab {

std::array<int, 3> GridDomain::lattice_coords(int lattice) const {
  std::array<int, 3> c{};
  c[0] = lattice % shape[0];
  c[1] = (lattice / shape[0]) % shape[1];
  c[2] = lattice / (shape[0] * shape[1]);
  return c;
}

int GridDomain::lattice_index(const std::array<int, 3>& c) const {
  return c[0] + shape[0] * (c[1] + shape[1] * c[2]);
}

Point GridDomain::position(int k) const {
  auto c = lattice_coords(active[k]);
  Point p{0, 0, 0};
  for (int a = 0; a < dim; ++a) p[a] = origin[a] + c[a] * spacing[a];
  return p;
}

int GridDomain::lattice_neighbor(int k, int axis, int dir) const {
  auto c = lattice_coords(active[k]);
  c[axis] += dir;
  if (c[axis] < 0 || c[axis] >= shape[axis]) {
    if (ends[axis][c[axis] < 0 ? 0 : 1] != End::Periodic) return -1;
    c[axis] = (c[axis] + shape[axis]) % shape[axis];
  }
  return lattice_index(c);
}

double GridDomain::cell_volume() const {
  double v = 1;
  for (int a = 0; a < dim; ++a) v *= spacing[a];
  return v;
}

GridDomain build_grid(const DomainSpec& spec) {
  if (spec.dim < 1 || spec.dim > 3)
    throw EmptyDomain("dimension must be 1, 2 or 3");
  GridDomain d;
  d.dim = spec.dim;
  d.geometry_tag = spec.geometry;
  d.ends = spec.ends;
  for (int a = 0; a < 3; ++a) {
    if (a < spec.dim) {
      if (spec.shape[a] < 3) throw EmptyDomain("resolution must be at least 3 per axis");
      if (!(spec.spacing[a] > 0)) throw NonPositiveWeight("mesh width must be positive");
      d.shape[a] = spec.shape[a];
      d.spacing[a] = spec.spacing[a];
      d.origin[a] = spec.origin[a];
    } else {
      d.shape[a] = 1;
      d.spacing[a] = 1;
      d.origin[a] = 0;
      d.ends[a] = {End::Open, End::Open};
    }
  }

  const int nl = d.lattice_size();
  d.active_mask.assign(nl, 1);
  if (!spec.mask.empty()) {
    if (static_cast<int>(spec.mask.size()) != nl) throw EmptyDomain("mask size does not match lattice");
    d.active_mask = spec.mask;
  } else if (spec.inside) {
    for (int i = 0; i < nl; ++i) {
      auto c = d.lattice_coords(i);
      Point p{0, 0, 0};
      for (int a = 0; a < d.dim; ++a) p[a] = d.origin[a] + c[a] * d.spacing[a];
      d.active_mask[i] = spec.inside(p) ? 1 : 0;
    }
  }

  d.index_of.assign(nl, -1);
  for (int i = 0; i < nl; ++i)
    if (d.active_mask[i]) {
      d.index_of[i] = static_cast<int>(d.active.size());
      d.active.push_back(i);
    }
  if (d.active.empty()) throw EmptyDomain("mask has no active node");

  const int n = d.size();
  d.exposed_faces.assign(n, 0);
  d.sigma_over_m.assign(n, 0.0);
  d.bc.assign(n, Bc::Neumann);
  for (int k = 0; k < n; ++k) {
    auto c = d.lattice_coords(d.active[k]);
    for (int a = 0; a < d.dim; ++a)
      for (int s = 0; s < 2; ++s) {
        const int dir = s == 0 ? -1 : 1;
        const int nb = d.lattice_neighbor(k, a, dir);
        bool exposed;
        if (nb < 0) {
          const bool out_low = c[a] + dir < 0;
          exposed = d.ends[a][out_low ? 0 : 1] == End::Wall;
        } else {
          exposed = !d.active_mask[nb];
        }
        if (exposed) {
          d.exposed_faces[k] += 1;
          d.sigma_over_m[k] += 1.0 / d.spacing[a];
        }
      }
    if (d.exposed_faces[k] > 0) {
      d.boundary_set.push_back(k);
      d.bc[k] = spec.bc_at ? spec.bc_at(d.position(k)) : spec.bc;
    }
  }

  // flood fill over lattice edges
  std::vector<int> comp(n, -1), stack{0};
  comp[0] = 0;
  int seen = 1;
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    for (int a = 0; a < d.dim; ++a)
      for (int dir : {-1, 1}) {
        const int nb = d.lattice_neighbor(k, a, dir);
        if (nb < 0 || !d.active_mask[nb]) continue;
        const int j = d.index_of[nb];
        if (comp[j] < 0) {
          comp[j] = 0;
          ++seen;
          stack.push_back(j);
        }
      }
  }
  if (seen != n) {
    std::ostringstream os;
    os << seen << " of " << n << " active nodes reachable from node 0";
    throw DisconnectedDomain(os.str());
  }
  return d;
}

DomainSpec box_spec(int dim, int n, double lo, double hi, Bc bc) {
  DomainSpec s;
  s.geometry = "box";
  s.dim = dim;
  const double h = (hi - lo) / (n - 1);
  for (int a = 0; a < dim; ++a) {
    s.shape[a] = n;
    s.origin[a] = lo;
    s.spacing[a] = h;
  }
  s.bc = bc;
  return s;
}

DomainSpec torus_spec(int dim, int n, double length) {
  DomainSpec s;
  s.geometry = "torus";
  s.dim = dim;
  for (int a = 0; a < dim; ++a) {
    s.shape[a] = n;
    s.origin[a] = 0;
    s.spacing[a] = length / n;
    s.ends[a] = {End::Periodic, End::Periodic};
  }
  return s;
}

DomainSpec halfplane_spec(int nx, int ny, double h) {
  DomainSpec s;
  s.geometry = "halfplane";
  s.dim = 2;
  s.shape = {nx, ny, 1};
  s.spacing = {h, h, 1};
  s.origin = {0, 0, 0};
  s.ends[0] = {End::Periodic, End::Periodic};
  s.ends[1] = {End::Wall, End::Open};
  return s;
}

std::string export_pgm(const GridDomain& d, int slice) {
  const int w = d.shape[0];
  const int h = d.dim >= 2 ? d.shape[1] : 1;
  const int z = d.dim == 3 ? slice : 0;
  std::ostringstream os;
  os << "P2\n" << w << " " << h << "\n255\n";
  for (int j = h - 1; j >= 0; --j) {
    for (int i = 0; i < w; ++i) {
      const int li = d.lattice_index({i, j, z});
      int v = 0;
      if (d.active_mask[li]) v = d.is_boundary(d.index_of[li]) ? 255 : 128;
      os << v << (i + 1 < w ? ' ' : '\n');
    }
  }
  return os.str();
}

void write_pgm(const GridDomain& d, const std::string& path, int slice) {
  std::ofstream out(path);
  out << export_pgm(d, slice);
}

}  // namespace tamelab
