#pragma once

#include <vector>

#include "r1mi/bounds.hpp"

namespace r1mi {

// The sparse Rademacher family (atoms 0, +1, -1 with weights 1-rho, rho/2,
// rho/2) is swept on a reduced noise axis: a family point (rho, delta) maps
// to the model ModelPoint{ sparse_rademacher(rho), delta * rho^{3/2} }.
// On this axis the trivial fixed point of the overlap recursion destabilises
// at exactly sqrt(rho) for every rho, so algorithmic and detection
// thresholds are directly comparable across densities.
ModelPoint sparse_model_point(double rho, double delta);

// Reduced-axis noise below which polynomial-time methods achieve nontrivial
// overlap: sqrt(rho).
double delta_algo(double rho);

// Bisection on the reduced axis for the predicate "the global minimizer of
// i_B exceeds 1e-6", over the initial bracket [1e-3, 4]. Returns the final
// bracket midpoint; the bracket is shrunk to width tol (tol >= 1e-6).
double find_delta_detect(double rho, double tol, const Quadrature& q = default_quadrature());

struct MatchThreshold {
  double delta;           // bracket midpoint, or the lower bracket edge
  bool match_everywhere;  // bounds already match at the lower bracket edge
};

// Bisection on the bounds_match flag of evaluate_point over [1e-3, 4].
MatchThreshold find_delta_match(double rho, double tol,
                                const Quadrature& q = default_quadrature());

// Bisection on rho over [0.01, 0.5] for the predicate
// "delta_detect(rho) > delta_algo(rho) + 2 * bracket_width" with
// bracket_width = 1e-3 (tol >= 1e-4). Below the returned density the
// detection threshold separates from the algorithmic one.
double find_rho_star(double tol, const Quadrature& q = default_quadrature());

struct ThresholdSet {
  double rho;
  double delta_algo;
  double delta_detect;
  double delta_match;
  double bracket_width;
  bool match_everywhere;
};

enum class Regime { easy, hard, impossible_trivial };

// Cell label at reduced-axis noise delta: easy below the algorithmic
// threshold, hard between it and the detection threshold, trivial above.
Regime classify(const ThresholdSet& ts, double delta);
const char* regime_name(Regime r);

struct PhaseDiagram {
  std::vector<ThresholdSet> rows;  // ordered by rho
  double rho_star;
  double bracket_width;
};

// rho from 0.02 to 1.0 in steps of 0.02.
std::vector<double> default_rho_grid();

// Thresholds for every rho in the grid plus rho_star. Rows are computed
// independently (optionally on `threads` workers) and always returned in
// grid order.
PhaseDiagram phase_diagram(const std::vector<double>& rho_grid, double tol,
                           int threads = 1, const Quadrature& q = default_quadrature());

struct CurveRow {
  double delta;  // reduced axis
  double i_b_min;
  double i_l_min;
  double m_hat;
  double m_tilde;
  bool bounds_match;
};

// Bound curves along a sorted reduced-axis noise grid at fixed rho.
std::vector<CurveRow> figure_curve(double rho, const std::vector<double>& delta_grid,
                                   const Quadrature& q = default_quadrature());

}  // namespace r1mi
