#include <queue>
#include <random>

#include "doctest.h"
#include "tamelab/errors.hpp"
#include "tamelab/examples.hpp"
#include "tamelab/grid.hpp"

using namespace tamelab;

namespace {

// Active nodes with an inactive or out-of-lattice (wall) neighbour, computed
// straight from the mask.
std::vector<int> boundary_oracle(const GridDomain& d) {
  std::vector<int> out;
  for (int k = 0; k < d.size(); ++k) {
    const auto c = d.lattice_coords(d.active[k]);
    bool exposed = false;
    for (int a = 0; a < d.dim && !exposed; ++a) {
      for (int dir : {-1, 1}) {
        auto q = c;
        q[a] += dir;
        const End e = d.ends[a][dir < 0 ? 0 : 1];
        if (q[a] < 0 || q[a] >= d.shape[a]) {
          if (e == End::Wall) exposed = true;
          if (e != End::Periodic) continue;
          q[a] = (q[a] + d.shape[a]) % d.shape[a];
        }
        if (!d.active_mask[d.lattice_index(q)]) exposed = true;
      }
    }
    if (exposed) out.push_back(k);
  }
  return out;
}

int flood_count(const GridDomain& d) {
  std::vector<char> seen(d.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 0;
  while (!q.empty()) {
    const int k = q.front();
    q.pop();
    ++count;
    for (int a = 0; a < d.dim; ++a)
      for (int dir : {-1, 1}) {
        const int l = d.lattice_neighbor(k, a, dir);
        if (l < 0 || d.index_of[l] < 0 || seen[d.index_of[l]]) continue;
        seen[d.index_of[l]] = 1;
        q.push(d.index_of[l]);
      }
  }
  return count;
}

// Connected blob grown by a lazy random walk from the lattice centre.
std::vector<std::uint8_t> random_blob(const std::array<int, 3>& shape, int dim, int steps, std::mt19937_64& g) {
  std::vector<std::uint8_t> mask(shape[0] * shape[1] * shape[2], 0);
  std::array<int, 3> c{shape[0] / 2, shape[1] / 2, shape[2] / 2};
  auto idx = [&](const std::array<int, 3>& p) { return p[0] + shape[0] * (p[1] + shape[1] * p[2]); };
  mask[idx(c)] = 1;
  std::uniform_int_distribution<int> ax(0, dim - 1), coin(0, 1);
  for (int s = 0; s < steps; ++s) {
    const int a = ax(g);
    auto q = c;
    q[a] += coin(g) ? 1 : -1;
    if (q[a] < 0 || q[a] >= shape[a]) continue;
    c = q;
    mask[idx(c)] = 1;
  }
  return mask;
}

}  // namespace

TEST_CASE("1D box of five nodes has its end points as boundary") {
  const GridDomain d = build_grid(box_spec(1, 5, 0, 1));
  CHECK(d.size() == 5);
  CHECK(d.boundary_set == std::vector<int>{0, 4});
  CHECK(d.sigma_over_m[0] == doctest::Approx(4.0));
  CHECK(d.sigma_over_m[2] == 0.0);
}

TEST_CASE("half-plane strip boundary is the bottom row") {
  const GridDomain d = build_grid(halfplane_spec(8, 6, 0.125));
  std::vector<int> bottom;
  for (int k = 0; k < d.size(); ++k)
    if (d.lattice_coords(d.active[k])[1] == 0) bottom.push_back(k);
  CHECK(d.boundary_set == bottom);
  for (int k : d.boundary_set) CHECK(d.exposed_faces[k] == 1);
}

TEST_CASE("cusp mask is connected with a nonempty boundary") {
  const CuspDomain c = cusp_domain(32, 0.5);
  CHECK(!c.grid.boundary_set.empty());
  CHECK(flood_count(c.grid) == c.grid.size());
  CHECK(c.grid.boundary_set == boundary_oracle(c.grid));
}

TEST_CASE("torus has no boundary") {
  const GridDomain d = build_grid(torus_spec(2, 8));
  CHECK(d.boundary_set.empty());
  CHECK(d.size() == 64);
}

TEST_CASE("malformed domains are rejected") {
  auto s = box_spec(2, 6, 0, 1);
  s.inside = [](const Point&) { return false; };
  CHECK_THROWS_AS(build_grid(s), EmptyDomain);

  auto two = box_spec(1, 9, 0, 1);
  two.inside = [](const Point& p) { return p[0] < 0.3 || p[0] > 0.7; };
  CHECK_THROWS_AS(build_grid(two), DisconnectedDomain);

  CHECK_THROWS_AS(build_grid(box_spec(1, 2, 0, 1)), EmptyDomain);
}

TEST_CASE("stair-stepped disk counts exposed faces") {
  auto s = box_spec(2, 20, -1, 1);
  s.inside = [](const Point& p) { return p[0] * p[0] + p[1] * p[1] <= 0.9; };
  const GridDomain d = build_grid(s);
  const double h = d.spacing[0];
  for (int k = 0; k < d.size(); ++k) CHECK(d.sigma_over_m[k] == doctest::Approx(d.exposed_faces[k] / h));
}

TEST_CASE("property: boundary set matches the mask oracle on random blobs") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + trial % 2;
    std::array<int, 3> shape{7 + trial % 5, 6 + trial % 4, dim == 3 ? 5 : 1};
    DomainSpec s;
    s.dim = dim;
    s.shape = shape;
    s.spacing = {0.1, 0.1, dim == 3 ? 0.1 : 1.0};
    s.mask = random_blob(shape, dim, 60 + 10 * trial, g);
    if (trial % 3 == 0) s.ends[0] = {End::Periodic, End::Periodic};
    if (trial % 4 == 1) s.ends[1] = {End::Wall, End::Open};
    const GridDomain d = build_grid(s);
    CHECK(d.boundary_set == boundary_oracle(d));
    CHECK(flood_count(d) == d.size());
    for (int k = 0; k < d.size(); ++k) CHECK(d.index_of[d.active[k]] == k);
  }
}

TEST_CASE("grey-map export") {
  const GridDomain d = build_grid(box_spec(2, 4, 0, 1));
  const std::string img = export_pgm(d);
  CHECK(img.rfind("P2\n4 4\n255\n", 0) == 0);
}
