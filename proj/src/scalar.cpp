#include "r1mi/scalar.hpp"

#include <cmath>

namespace r1mi {
namespace {

// Tilted weights w_k exp(e_k - max_e) and their sums with x and x^2.
struct Tilted {
  double z = 0.0;   // sum w_k exp(...)
  double zx = 0.0;  // sum w_k s_k exp(...)
  double zxx = 0.0; // sum w_k s_k^2 exp(...)
  double max_e = 0.0;
};

Tilted tilt(const Prior& p, double A, double B) {
  const auto& atoms = p.atoms();
  double max_e = -HUGE_VAL;
  for (const Atom& a : atoms) {
    double e = B * a.value - 0.5 * A * a.value * a.value;
    if (e > max_e) max_e = e;
  }
  Tilted t;
  t.max_e = max_e;
  for (const Atom& a : atoms) {
    double e = B * a.value - 0.5 * A * a.value * a.value;
    double w = a.weight * std::exp(e - max_e);
    t.z += w;
    t.zx += w * a.value;
    t.zxx += w * a.value * a.value;
  }
  return t;
}

}  // namespace

double j_func(const Prior& p, double A, double B) {
  Tilted t = tilt(p, A, B);
  return t.max_e + std::log(t.z);
}

double denoiser(const Prior& p, double A, double B) {
  Tilted t = tilt(p, A, B);
  return t.zx / t.z;
}

double denoiser_variance(const Prior& p, double A, double B) {
  Tilted t = tilt(p, A, B);
  double mean = t.zx / t.z;
  double var = t.zxx / t.z - mean * mean;
  return var > 0.0 ? var : 0.0;
}

}  // namespace r1mi
