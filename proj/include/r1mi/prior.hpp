#pragma once

#include <string>
#include <vector>

namespace r1mi {

struct Atom {
  double value;
  double weight;
};

// Finite-support prior p(x). Canonical after construction: atom values
// strictly increasing, duplicates merged (weights summed), zero-weight
// atoms dropped, weights normalized to sum to one. Immutable.
class Prior {
 public:
  explicit Prior(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double second_moment() const { return second_moment_; }
  double support_bound() const { return support_bound_; }

  // E[x^k], k >= 0.
  double moment(int k) const;

  // {"atoms": [[value, weight], ...]}
  std::string to_json() const;
  static Prior from_json(const std::string& text);

 private:
  std::vector<Atom> atoms_;
  double second_moment_ = 0.0;
  double support_bound_ = 0.0;
};

// Atoms {(0, 1-rho), (+1, rho/2), (-1, rho/2)}; the zero atom is omitted
// at rho = 1. Requires 0 < rho <= 1.
Prior make_sparse_rademacher(double rho);

inline double moment(const Prior& p, int k) { return p.moment(k); }

}  // namespace r1mi
