#include "r1mi/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace r1mi {
namespace {

// Roots and weights of the physicists' Hermite polynomial H_n (weight
// function e^{-x^2}) by Newton iteration on the three-term recurrence.
void gauss_hermite_physicists(int n, std::vector<double>& x, std::vector<double>& w) {
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 64;
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}

  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;

  double z = 0.0, z1 = 0.0, z2 = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * z2;  // z2 holds the root found two steps back
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * z2;
    } else {
      z = 2.0 * z - z2;
    }

    double pp = 0.0;
    int it = 0;
    for (; it < kMaxIter; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= kEps * std::max(1.0, std::abs(z))) break;
    }
    if (it == kMaxIter) throw std::runtime_error("gauss_hermite: Newton iteration failed");

    z2 = z1;
    z1 = z;
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

Quadrature Quadrature::gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("Quadrature: order must be positive");
  std::vector<double> x, w;
  gauss_hermite_physicists(order, x, w);

  Quadrature q;
  q.order = order;
  q.nodes.resize(order);
  q.weights.resize(order);
  // Map weight e^{-x^2} to the standard normal: z = sqrt(2) x.
  const double sqrt2 = std::sqrt(2.0);
  double total = 0.0;
  for (int i = 0; i < order; ++i) total += w[i];
  for (int i = 0; i < order; ++i) {
    q.nodes[i] = sqrt2 * x[order - 1 - i];  // ascending
    q.weights[i] = w[order - 1 - i] / total;
  }
  return q;
}

const Quadrature& default_quadrature() { return quadrature_of_order(61); }

const Quadrature& quadrature_of_order(int order) {
  static std::mutex mu;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, Quadrature::gauss_hermite(order)).first;
  return it->second;
}

double gauss_expect(const std::function<double(double)>& f, const Quadrature& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    double v = f(q.nodes[i]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "gauss_expect: non-finite integrand at node " << q.nodes[i];
      throw std::runtime_error(msg.str());
    }
    acc += q.weights[i] * v;
  }
  return acc;
}

}  // namespace r1mi
