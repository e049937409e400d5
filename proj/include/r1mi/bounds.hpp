#pragma once

#include <vector>

#include "r1mi/prior.hpp"
#include "r1mi/quadrature.hpp"

namespace r1mi {

// A prior together with the Gaussian channel noise it is estimated under.
struct ModelPoint {
  Prior prior;
  double delta;

  ModelPoint(Prior p, double d);
};

struct Candidate {
  double m;
  double value;
};

struct MinimizeResult {
  double m_star;
  double value;
  std::vector<Candidate> candidates;  // stationary points within tie tolerance
};

// Variational upper bound on the mutual information per variable:
//   i_B(m) = (m^2 + E[x^2]^2) / (4 delta)
//            - E_{x,z}[ J(m/delta, m x/delta + sqrt(m/delta) z) ].
double i_bethe(const ModelPoint& mp, double m, const Quadrature& q = default_quadrature());

// Interpolation lower-bound functional, anchored at m_hat:
//   i_L(m) = (2 m^2 - m_hat^2 + E[x^2]^2) / (4 delta)
//            - E_{x,z}[ J(m_hat/delta, m x/delta + sqrt(m_hat/delta) z) ].
// At m = m_hat this equals i_bethe(mp, m_hat) exactly.
double i_lower(const ModelPoint& mp, double m, double m_hat,
               const Quadrature& q = default_quadrature());

// Global minimum over m in [0, E[x^2]]: coarse 401-point grid, then
// golden-section refinement of every grid-local minimum to |dm| < 1e-9.
// Candidates within 1e-9 of the best value are reported; ties break toward
// smaller m.
MinimizeResult minimize_bound_bethe(const ModelPoint& mp,
                                    const Quadrature& q = default_quadrature());
MinimizeResult minimize_bound_lower(const ModelPoint& mp, double m_hat,
                                    const Quadrature& q = default_quadrature());

// One step of the scalar overlap recursion:
//   m  ->  E_{x,z}[ x * denoiser(m/delta, m x/delta + sqrt(m/delta) z) ],
// clamped to [0, E[x^2]]. Its fixed points are the stationary points of i_B.
double state_evolution_step(const ModelPoint& mp, double m,
                            const Quadrature& q = default_quadrature());

// I/n = f + E[x^2]^2 / (4 delta), f the free energy per variable.
double mi_from_free_energy(const ModelPoint& mp, double f);

struct BoundResult {
  double m_hat;
  double i_b_min;
  double m_tilde;
  double i_l_min;
  bool bounds_match;
  std::vector<Candidate> bethe_candidates;
  std::vector<Candidate> lower_candidates;
};

// bounds_match tolerances: |i_l_min - i_b_min| < kMatchEpsilon and
// |m_tilde - m_hat| < kMEpsilon. Well above quadrature error, well below
// the physical gaps in the mismatch region.
inline constexpr double kMatchEpsilon = 1e-6;
inline constexpr double kMEpsilon = 1e-4;

// Minimize both bounds, set the match flag, and run internal consistency
// checks (i_l_min <= i_b_min + 1e-9 and |i_L'(m_hat)| < 1e-6); a failed
// check throws, signalling a quadrature or optimizer bug.
BoundResult evaluate_point(const ModelPoint& mp, const Quadrature& q = default_quadrature());

}  // namespace r1mi
