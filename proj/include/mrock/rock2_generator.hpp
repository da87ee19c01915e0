#pragma once

#include <optional>

#include "mrock/rock2.hpp"

namespace mrock {

/// Construction of ROCK2 coefficients for one degree s.
///
/// For a trial interval length L the polynomial variable is mapped as
/// x = 1 + 2z/L, and the degree s-2 polynomial is orthogonal on [-1, 1] with
/// respect to w(x)^2/sqrt(1 - x^2) (discrete Stieltjes procedure on
/// Gauss-Chebyshev nodes). Given that polynomial, the two order conditions
/// fix (sigma1, sigma2) linearly, which in turn changes the weight; the pair
/// is the fixed point of that map, found with a damped Newton iteration.
/// L is then pushed up by bisection to the largest value with
/// |R_s| <= 1 on [-L, 0].
struct Rock2GeneratorOptions {
  int bisection_steps = 40;
  double newton_tol = 1e-14;
  int newton_max_iter = 60;
  double lower_factor = 0.5;  // L = factor * s^2 bracket
  double upper_factor = 1.0;
};

/// Coefficients for the fixed mapping length L. Empty if the fixed point
/// does not converge.
std::optional<Rock2Tableau> rock2_tableau_for_mapping(int s, double length,
                                                      const Rock2GeneratorOptions& opts = {});

/// Largest |R_s(z)| on [-length, 0], located by dense sampling and local
/// refinement around sampled maxima.
double rock2_max_abs_on(const Rock2Tableau& tab, double length);

/// Full construction with the interval length maximized.
Rock2Tableau generate_rock2_tableau(int s, const Rock2GeneratorOptions& opts = {});

}  // namespace mrock
