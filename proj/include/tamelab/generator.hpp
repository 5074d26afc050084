#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "tamelab/grid.hpp"

namespace tamelab {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Edge {
  int a, b;
  double w;
};

// Functions live on all active nodes. Dirichlet nodes are the cemetery of the
// killed process: they are excluded from the domain of L, every semigroup
// returns 0 there, and pointwise checks skip them.
struct GeneratorContext {
  int dim = 1;
  double h = 1.0;  // smallest mesh width, sets the default time step scale
  Vec m;
  std::vector<Edge> edges;
  std::vector<int> adj_ptr, adj_idx;
  std::vector<double> adj_w;
  std::vector<std::uint8_t> dirichlet;
  std::vector<std::uint8_t> boundary;
  Vec leak;          // weight to Dirichlet neighbours, per free node
  Vec sigma_over_m;  // surface density, per node
  std::vector<int> free_nodes;
  std::vector<int> free_pos;  // node -> position in free_nodes or -1
  std::vector<Point> x;
  SpMat L;

  int n() const { return static_cast<int>(m.size()); }
  int n_free() const { return static_cast<int>(free_nodes.size()); }
  bool is_free(int i) const { return !dirichlet[i]; }
  bool has_dirichlet() const { return n_free() != n(); }
};

struct Weights {
  std::optional<Vec> psi_measure;  // m -> e^{2 psi} m
  std::optional<Vec> psi_edge;     // w_xy -> e^{psi_x + psi_y} w_xy
  double scale = 1.0;              // L -> scale * L
};

GeneratorContext build_generator(const GridDomain& domain, const Weights& weights = {});

// Explicit weighted graph, e.g. the two-point space.
GeneratorContext make_graph(const Vec& m, const std::vector<Edge>& edges,
                            const std::vector<std::uint8_t>& dirichlet = {});

Vec apply_L(const GeneratorContext& ctx, const Vec& f);
Vec apply_L_serial(const GeneratorContext& ctx, const Vec& f);

Vec gamma(const GeneratorContext& ctx, const Vec& f, const Vec& g);
Vec gamma_serial(const GeneratorContext& ctx, const Vec& f, const Vec& g);
inline Vec gamma(const GeneratorContext& ctx, const Vec& f) { return gamma(ctx, f, f); }

double energy(const GeneratorContext& ctx, const Vec& f, const Vec& g);
inline double energy(const GeneratorContext& ctx, const Vec& f) { return energy(ctx, f, f); }
// Same quantity summed edge by edge.
double energy_edges(const GeneratorContext& ctx, const Vec& f, const Vec& g);

double inner_m(const GeneratorContext& ctx, const Vec& f, const Vec& g);
double total_mass(const GeneratorContext& ctx);

// Zero the Dirichlet entries.
Vec restrict_free(const GeneratorContext& ctx, const Vec& f);
// Max over free nodes.
double max_free(const GeneratorContext& ctx, const Vec& f);
double min_free(const GeneratorContext& ctx, const Vec& f);

Vec coordinate(const GeneratorContext& ctx, int axis);

}  // namespace tamelab
