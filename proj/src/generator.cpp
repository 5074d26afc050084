#include "tamelab/generator.hpp"

#include <cmath>
#include <limits>

#include "tamelab/errors.hpp"

namespace tamelab {

namespace {

void finalize(GeneratorContext& c) {
  const int n = c.n();
  if (c.dirichlet.empty()) c.dirichlet.assign(n, 0);
  if (c.boundary.empty()) c.boundary.assign(n, 0);
  if (c.sigma_over_m.size() != n) c.sigma_over_m = Vec::Zero(n);
  if (c.x.size() != static_cast<size_t>(n)) c.x.assign(n, Point{0, 0, 0});
  for (int i = 0; i < n; ++i)
    if (!(c.m[i] > 0) || !std::isfinite(c.m[i])) throw NonPositiveWeight("node measure must be positive");

  std::vector<int> deg(n, 0);
  for (const auto& e : c.edges) {
    if (!(e.w > 0) || !std::isfinite(e.w)) throw NonPositiveWeight("edge weight must be positive");
    deg[e.a]++;
    deg[e.b]++;
  }
  c.adj_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) c.adj_ptr[i + 1] = c.adj_ptr[i] + deg[i];
  c.adj_idx.assign(c.adj_ptr[n], 0);
  c.adj_w.assign(c.adj_ptr[n], 0);
  std::vector<int> fill(c.adj_ptr.begin(), c.adj_ptr.end() - 1);
  for (const auto& e : c.edges) {
    c.adj_idx[fill[e.a]] = e.b;
    c.adj_w[fill[e.a]++] = e.w;
    c.adj_idx[fill[e.b]] = e.a;
    c.adj_w[fill[e.b]++] = e.w;
  }

  c.free_nodes.clear();
  c.free_pos.assign(n, -1);
  for (int i = 0; i < n; ++i)
    if (!c.dirichlet[i]) {
      c.free_pos[i] = static_cast<int>(c.free_nodes.size());
      c.free_nodes.push_back(i);
    }

  c.leak = Vec::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(c.adj_idx.size() + n);
  for (int i = 0; i < n; ++i) {
    if (c.dirichlet[i]) continue;
    double diag = 0;
    for (int p = c.adj_ptr[i]; p < c.adj_ptr[i + 1]; ++p) {
      const int j = c.adj_idx[p];
      diag += c.adj_w[p];
      if (c.dirichlet[j])
        c.leak[i] += c.adj_w[p];
      else
        trip.emplace_back(i, j, c.adj_w[p] / c.m[i]);
    }
    trip.emplace_back(i, i, -diag / c.m[i]);
  }
  c.L.resize(n, n);
  c.L.setFromTriplets(trip.begin(), trip.end());
  c.L.makeCompressed();
}

}  // namespace

GeneratorContext build_generator(const GridDomain& d, const Weights& wts) {
  GeneratorContext c;
  const int n = d.size();
  c.dim = d.dim;
  c.h = d.spacing[0];
  for (int a = 1; a < d.dim; ++a) c.h = std::min(c.h, d.spacing[a]);
  const double vol = d.cell_volume();

  if (wts.psi_measure && wts.psi_measure->size() != n) throw NonPositiveWeight("psi has wrong length");
  if (wts.psi_edge && wts.psi_edge->size() != n) throw NonPositiveWeight("psi has wrong length");
  if (!(wts.scale > 0)) throw NonPositiveWeight("generator scale must be positive");

  c.m = Vec::Constant(n, vol);
  if (wts.psi_measure) {
    for (int i = 0; i < n; ++i) {
      const double p = (*wts.psi_measure)[i];
      if (!std::isfinite(p)) throw NonPositiveWeight("psi not finite");
      c.m[i] *= std::exp(2 * p);
    }
  }
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < d.dim; ++a) {
      const int nb = d.lattice_neighbor(k, a, +1);
      if (nb < 0 || !d.active_mask[nb]) continue;
      const int j = d.index_of[nb];
      double w = wts.scale * vol / (d.spacing[a] * d.spacing[a]);
      if (wts.psi_edge) w *= std::exp((*wts.psi_edge)[k] + (*wts.psi_edge)[j]);
      c.edges.push_back({k, j, w});
    }

  c.dirichlet.assign(n, 0);
  c.boundary.assign(n, 0);
  c.sigma_over_m = Vec::Zero(n);
  c.x.resize(n);
  for (int k = 0; k < n; ++k) {
    c.x[k] = d.position(k);
    c.boundary[k] = d.is_boundary(k) ? 1 : 0;
    c.dirichlet[k] = (c.boundary[k] && d.bc[k] == Bc::Dirichlet) ? 1 : 0;
    c.sigma_over_m[k] = d.sigma_over_m[k];
  }
  if (wts.psi_measure)
    for (int k = 0; k < n; ++k) c.sigma_over_m[k] *= std::exp(-2 * (*wts.psi_measure)[k]);
  finalize(c);
  return c;
}

GeneratorContext make_graph(const Vec& m, const std::vector<Edge>& edges,
                            const std::vector<std::uint8_t>& dirichlet) {
  GeneratorContext c;
  c.m = m;
  c.edges = edges;
  c.dirichlet = dirichlet;
  c.h = 1.0;
  finalize(c);
  return c;
}

Vec apply_L(const GeneratorContext& c, const Vec& f) {
  const int n = c.n();
  Vec out(n);
  const int* outer = c.L.outerIndexPtr();
  const int* inner = c.L.innerIndexPtr();
  const double* val = c.L.valuePtr();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int p = outer[i]; p < outer[i + 1]; ++p) s += val[p] * f[inner[p]];
    out[i] = s;
  }
  return out;
}

Vec apply_L_serial(const GeneratorContext& c, const Vec& f) {
  const int n = c.n();
  Vec out(n);
  const int* outer = c.L.outerIndexPtr();
  const int* inner = c.L.innerIndexPtr();
  const double* val = c.L.valuePtr();
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int p = outer[i]; p < outer[i + 1]; ++p) s += val[p] * f[inner[p]];
    out[i] = s;
  }
  return out;
}

Vec gamma(const GeneratorContext& c, const Vec& f, const Vec& g) {
  const int n = c.n();
  Vec out(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int p = c.adj_ptr[i]; p < c.adj_ptr[i + 1]; ++p) {
      const int j = c.adj_idx[p];
      s += c.adj_w[p] * (f[j] - f[i]) * (g[j] - g[i]);
    }
    out[i] = s / (2 * c.m[i]);
  }
  return out;
}

Vec gamma_serial(const GeneratorContext& c, const Vec& f, const Vec& g) {
  const int n = c.n();
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int p = c.adj_ptr[i]; p < c.adj_ptr[i + 1]; ++p) {
      const int j = c.adj_idx[p];
      s += c.adj_w[p] * (f[j] - f[i]) * (g[j] - g[i]);
    }
    out[i] = s / (2 * c.m[i]);
  }
  return out;
}

double energy(const GeneratorContext& c, const Vec& f, const Vec& g) {
  const Vec G = gamma_serial(c, f, g);
  double s = 0;
  for (int i = 0; i < c.n(); ++i) s += c.m[i] * G[i];
  return 0.5 * s;
}

double energy_edges(const GeneratorContext& c, const Vec& f, const Vec& g) {
  double s = 0;
  for (const auto& e : c.edges) s += e.w * (f[e.b] - f[e.a]) * (g[e.b] - g[e.a]);
  return 0.5 * s;
}

double inner_m(const GeneratorContext& c, const Vec& f, const Vec& g) {
  double s = 0;
  for (int i : c.free_nodes) s += c.m[i] * f[i] * g[i];
  return s;
}

double total_mass(const GeneratorContext& c) { return c.m.sum(); }

Vec restrict_free(const GeneratorContext& c, const Vec& f) {
  Vec out = f;
  for (int i = 0; i < c.n(); ++i)
    if (c.dirichlet[i]) out[i] = 0;
  return out;
}

double max_free(const GeneratorContext& c, const Vec& f) {
  double v = -std::numeric_limits<double>::infinity();
  for (int i : c.free_nodes) v = std::max(v, f[i]);
  return v;
}

double min_free(const GeneratorContext& c, const Vec& f) {
  double v = std::numeric_limits<double>::infinity();
  for (int i : c.free_nodes) v = std::min(v, f[i]);
  return v;
}

Vec coordinate(const GeneratorContext& c, int axis) {
  Vec out(c.n());
  for (int i = 0; i < c.n(); ++i) out[i] = c.dirichlet[i] ? 0.0 : c.x[i][axis];
  return out;
}

}  // namespace tamelab
