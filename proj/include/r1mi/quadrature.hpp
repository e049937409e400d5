#pragma once

#include <functional>
#include <vector>

namespace r1mi {

// Gauss-Hermite rule rescaled to the standard normal measure:
//   sum_i weights[i] * f(nodes[i])  ~=  E_{z ~ N(0,1)}[ f(z) ].
// Weights are normalized to sum to one; nodes are symmetric about zero.
// Exact for polynomials up to degree 2*order - 1.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  static Quadrature gauss_hermite(int order);
};

// Shared order-61 rule (the default for all bound evaluations).
const Quadrature& default_quadrature();

// Cached rule of a given order. Thread-safe, lives for the process.
const Quadrature& quadrature_of_order(int order);

// E_z[f(z)] over the rule. Throws if f is non-finite at some node, naming it.
double gauss_expect(const std::function<double(double)>& f, const Quadrature& q);

}  // namespace r1mi
