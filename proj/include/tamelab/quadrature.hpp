#pragma once

#include <functional>
#include <vector>

#include "tamelab/generator.hpp"

namespace tamelab {

struct QuadInfo {
  int points = 0;
  double rel_change = 0;
  bool converged = false;
};

// Composite Simpson on [a,b], interval count doubled until successive values
// differ by less than rel_tol (sup norm), starting from min_points nodes and
// capped at max_points.
Vec simpson(const std::function<Vec(double)>& F, double a, double b, double rel_tol = 1e-8,
            int min_points = 3, int max_points = 4097, QuadInfo* info = nullptr);

double simpson_scalar(const std::function<double(double)>& F, double a, double b,
                      double rel_tol = 1e-8, int min_points = 3, int max_points = 4097,
                      QuadInfo* info = nullptr);

// Gauss-Laguerre nodes and weights for int_0^inf e^{-x} g(x) dx.
void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace tamelab
