#include "tamelab/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

#include "tamelab/errors.hpp"
#include "tamelab/rng.hpp"

namespace tamelab {

Scheme parse_scheme(const std::string& s) {
  if (s == "ctmc-exact" || s == "ctmc") return Scheme::CtmcExact;
  if (s == "euler-split" || s == "euler") return Scheme::EulerSplit;
  throw ConfigParse("unknown walker scheme '" + s + "'");
}

std::string to_string(Scheme s) { return s == Scheme::CtmcExact ? "ctmc-exact" : "euler-split"; }

nlohmann::json to_json(const WalkEstimate& e) {
  return {{"mean", e.mean},         {"stderr", e.stderr_},     {"log_mean", e.log_mean},
          {"n_effective", e.n_effective}, {"log_domain", e.log_domain}, {"seed", e.seed},
          {"n_walkers", e.n_walkers}};
}

double pairwise_sum(const double* v, long n) {
  if (n <= 16) {
    double s = 0;
    for (long i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const long h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

namespace {

struct Walk {
  double log_w;  // -A_t
  double fval;   // f(B_t), 0 when killed
  bool alive = true;
};

// Total jump rate out of i, in units of 1/time.
inline double rate(const GeneratorContext& ctx, int i) {
  double s = 0;
  for (int p = ctx.adj_ptr[i]; p < ctx.adj_ptr[i + 1]; ++p) s += ctx.adj_w[p];
  return s / ctx.m[i];
}

inline int pick_neighbor(const GeneratorContext& ctx, int i, double u) {
  double tot = 0;
  for (int p = ctx.adj_ptr[i]; p < ctx.adj_ptr[i + 1]; ++p) tot += ctx.adj_w[p];
  double target = u * tot, acc = 0;
  for (int p = ctx.adj_ptr[i]; p < ctx.adj_ptr[i + 1]; ++p) {
    acc += ctx.adj_w[p];
    if (target <= acc) return ctx.adj_idx[p];
  }
  return ctx.adj_idx[ctx.adj_ptr[i + 1] - 1];
}

Walk walk_ctmc(const GeneratorContext& ctx, const Vec& V, const Vec& f, int x0, double t, WalkerRng& rng) {
  int x = x0;
  double s = 0, A = 0;
  for (;;) {
    const double r = rate(ctx, x);
    const double hold = r > 0 ? rng.exponential() / r : kInf;
    if (s + hold >= t) {
      A += V[x] * (t - s);
      return {-A, f[x]};
    }
    A += V[x] * hold;
    s += hold;
    x = pick_neighbor(ctx, x, rng.uniform());
    if (ctx.dirichlet[x]) return {-A, 0.0, false};
  }
}

Walk walk_euler(const GeneratorContext& ctx, const Vec& V, const Vec& f, int x0, double t, double dt,
                WalkerRng& rng) {
  const long steps = std::max(1L, static_cast<long>(std::ceil(t / dt - 1e-12)));
  const double d = t / steps;
  int x = x0;
  double A = 0;
  for (long k = 0; k < steps; ++k) {
    A += V[x] * d;
    const double pj = 1.0 - std::exp(-rate(ctx, x) * d);
    if (rng.uniform() <= pj) {
      x = pick_neighbor(ctx, x, rng.uniform());
      if (ctx.dirichlet[x]) return {-A, 0.0, false};
    }
  }
  return {-A, f[x]};
}

WalkEstimate run(const GeneratorContext& ctx, const Vec& Vin, const Vec& f, int x0, double t,
                 const WalkerConfig& cfg, bool parallel) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.n_walkers < 1) throw std::invalid_argument("n_walkers must be >= 1");
  if (t < 0) throw NegativeTime("negative time");
  if (x0 < 0 || x0 >= ctx.n()) throw std::invalid_argument("start node out of range");
  const Vec V = Vin.size() ? Vin : Vec::Zero(ctx.n());
  double dt = cfg.dt > 0 ? cfg.dt : ctx.h * ctx.h;
  if (cfg.scheme == Scheme::EulerSplit && dt > ctx.h * ctx.h * (1 + 1e-12))
    throw StepTooLarge("euler-split step exceeds h^2");

  WalkEstimate est;
  est.seed = cfg.seed;
  est.n_walkers = cfg.n_walkers;
  const double vmax = V.cwiseAbs().maxCoeff();
  est.log_domain = vmax * t > 20;
  if (est.log_domain)
    std::cerr << "tamelab: max|V|*t = " << vmax * t << " > 20, accumulating in the log domain\n";

  const long n = cfg.n_walkers;
  std::vector<double> lw(n), fv(n);
  std::vector<char> live(n, 0);
  if (ctx.dirichlet[x0]) {
    std::fill(lw.begin(), lw.end(), 0.0);
    std::fill(fv.begin(), fv.end(), 0.0);
  } else if (parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      WalkerRng rng(cfg.seed, static_cast<std::uint64_t>(i));
      const Walk w = cfg.scheme == Scheme::CtmcExact ? walk_ctmc(ctx, V, f, x0, t, rng)
                                                     : walk_euler(ctx, V, f, x0, t, dt, rng);
      lw[i] = w.log_w;
      fv[i] = w.fval;
      live[i] = w.alive;
    }
  } else {
    for (long i = 0; i < n; ++i) {
      WalkerRng rng(cfg.seed, static_cast<std::uint64_t>(i));
      const Walk w = cfg.scheme == Scheme::CtmcExact ? walk_ctmc(ctx, V, f, x0, t, rng)
                                                     : walk_euler(ctx, V, f, x0, t, dt, rng);
      lw[i] = w.log_w;
      fv[i] = w.fval;
      live[i] = w.alive;
    }
  }

  double shift = 0;
  long alive = 0;
  for (long i = 0; i < n; ++i)
    if (live[i]) ++alive;
  if (est.log_domain) {
    shift = -kInf;
    for (long i = 0; i < n; ++i)
      if (fv[i] != 0) shift = std::max(shift, lw[i]);
    if (!std::isfinite(shift)) shift = 0;
  }
  std::vector<double> v(n);
  for (long i = 0; i < n; ++i) v[i] = fv[i] == 0 ? 0.0 : std::exp(lw[i] - shift) * fv[i];
  const double mean_s = pairwise_sum(v.data(), n) / n;
  for (long i = 0; i < n; ++i) v[i] = (v[i] - mean_s) * (v[i] - mean_s);
  const double var_s = n > 1 ? pairwise_sum(v.data(), n) / (n - 1) : 0.0;
  const double scale = std::exp(shift);
  est.mean = mean_s * scale;
  est.stderr_ = std::sqrt(var_s / n) * scale;
  est.log_mean = std::log(std::abs(mean_s)) + shift;
  est.n_effective = alive;
  est.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return est;
}

}  // namespace

WalkEstimate mc_feynman_kac(const GeneratorContext& ctx, const Vec& V, const Vec& f, int x0, double t,
                            const WalkerConfig& cfg) {
  return run(ctx, V, f, x0, t, cfg, true);
}

WalkEstimate mc_feynman_kac(const GeneratorContext& ctx, const TamingMeasure& kappa, const Vec& f, int x0,
                            double t, const WalkerConfig& cfg) {
  return run(ctx, node_potential(ctx, kappa), f, x0, t, cfg, true);
}

WalkEstimate mc_feynman_kac_serial(const GeneratorContext& ctx, const Vec& V, const Vec& f, int x0, double t,
                                   const WalkerConfig& cfg) {
  return run(ctx, V, f, x0, t, cfg, false);
}

ModeratenessEstimate mc_moderateness(const GeneratorContext& ctx, const Vec& V, double t,
                                     const std::vector<int>& starts, const WalkerConfig& cfg) {
  if (starts.empty()) throw std::invalid_argument("empty start set");
  ModeratenessEstimate out;
  const Vec one = Vec::Ones(ctx.n());
  for (size_t s = 0; s < starts.size(); ++s) {
    WalkerConfig c = cfg;
    c.seed = cfg.seed + s;
    out.per_start.push_back(run(ctx, V, one, starts[s], t, c, true));
    if (out.argmax < 0 || out.per_start.back().mean > out.best.mean) {
      out.argmax = starts[s];
      out.best = out.per_start.back();
    }
  }
  return out;
}

InequalityReport mc_vs_matrix(const GeneratorContext& ctx, const Vec& Vin, const std::vector<McCase>& battery,
                              const WalkerConfig& cfg, PropagatorOptions opt) {
  InequalityReport r;
  r.check_name = "mc_vs_matrix";
  r.tolerance = 0;
  r.parameters["n_walkers"] = cfg.n_walkers;
  r.parameters["seed"] = cfg.seed;
  r.parameters["scheme"] = to_string(cfg.scheme);
  r.parameters["z_max"] = 3.5;
  const Vec V = Vin.size() ? Vin : Vec::Zero(ctx.n());
  Propagator P(ctx, V, opt);
  nlohmann::json cases = nlohmann::json::array();
  int ok = 0;
  for (size_t c = 0; c < battery.size(); ++c) {
    const auto& b = battery[c];
    WalkerConfig wc = cfg;
    wc.seed = cfg.seed + 7919 * c;
    const WalkEstimate e = run(ctx, V, b.f, b.x0, b.t, wc, true);
    const double exact = P.apply(b.f, b.t)[b.x0];
    const double diff = std::abs(e.mean - exact);
    double z;
    if (e.stderr_ > 0)
      z = diff / e.stderr_;
    else
      z = diff <= 1e-12 * std::max(1.0, std::abs(exact)) ? 0.0 : kInf;
    if (z <= 3.5) ++ok;
    const double margin = 3.5 - z;
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_node = b.x0;
      r.worst_test = static_cast<int>(c);
      r.worst_time = 0;
    }
    cases.push_back({{"x0", b.x0}, {"t", b.t}, {"mc", e.mean}, {"stderr", e.stderr_}, {"matrix", exact}, {"z", z}});
  }
  const double frac = battery.empty() ? 1.0 : static_cast<double>(ok) / battery.size();
  r.meta["cases"] = cases;
  r.meta["fraction_within"] = frac;
  r.verdict = frac >= 0.99 ? Verdict::Pass : Verdict::Fail;
  return r;
}

std::pair<double, double> mc_holding_time(const GeneratorContext& ctx, int x, long n, std::uint64_t seed) {
  const double r = rate(ctx, x);
  std::vector<double> v(n);
  for (long i = 0; i < n; ++i) {
    WalkerRng rng(seed, static_cast<std::uint64_t>(i));
    v[i] = rng.exponential() / r;
  }
  const double mean = pairwise_sum(v.data(), n) / n;
  for (long i = 0; i < n; ++i) v[i] = (v[i] - mean) * (v[i] - mean);
  const double var = pairwise_sum(v.data(), n) / (n - 1);
  return {mean, std::sqrt(var / n)};
}

}  // namespace tamelab
