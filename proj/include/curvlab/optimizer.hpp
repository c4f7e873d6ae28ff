#pragma once

// Quasi-Newton search over low-degree zonal conformal factors.

#include <cstdint>
#include <string>
#include <vector>

#include "curvlab/spectral_sphere.hpp"

namespace curvlab {

enum class Objective {
  total_iab,  // normalised total I_{a,b} of u^{8/(n-4)} g; maximised when n = 3
  f_gamma,    // F_gamma(w), dimension 4
  dj,         // volume-normalised int (J^)^2 of e^{2w} g
};

std::string to_string(Objective o);
Objective parse_objective(const std::string& name);

struct ObjectiveParams {
  double a = 0;
  double b = 0;
  double gamma1 = 0;
  double gamma2 = 1;
  double gamma3 = 0;
};

struct OptimizeOptions {
  std::uint64_t seed = 1;
  int max_iter = 1000;
  int nodes = 128;
  double init_amplitude = 0.4;
  double fd_step = 1e-5;
  /// Stop once an iteration improves the value by less than this (relative).
  double rel_tolerance = 1e-13;
};

struct OptimizeResult {
  Objective objective = Objective::total_iab;
  bool maximize = false;
  /// Orthonormal modal coefficients, degree 0..degree (torus: 2 degree + 1 modes).
  std::vector<double> coefficients;
  double value = 0;
  std::vector<double> trace;  // value after each iteration (trace[0] = start)
  int iterations = 0;
  bool converged = false;
};

/// Value of the objective at a conformal factor (u > 0 for total_iab, w
/// otherwise).
double objective_value(Objective o, const ZonalField& f, const ObjectiveParams& p);

/// Quasi-Newton descent with central-difference gradients over zonal factors
/// of degree <= `degree` (>= 1).  The constant mode is pinned (u has mean
/// mode 1, w mean mode 0) since every objective is scale/shift invariant; for
/// total_iab, min u >= 0.05 is enforced by shrinking the non-constant part.
/// Deterministic in (seed, options).  Non-convergence within max_iter is
/// reported, not thrown.
OptimizeResult minimize_functional(Objective o, const EinsteinModel& model, const ObjectiveParams& p, int degree,
                                   const OptimizeOptions& opts = {});

/// Field with the given low-degree coefficients on `grid`.
ZonalField field_from_coefficients(const GridPtr& grid, const std::vector<double>& coefficients);

}  // namespace curvlab
