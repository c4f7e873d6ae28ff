#pragma once

// Conformally variational functionals on Einstein models, evaluated on zonal
// conformal factors by spectral quadrature.

#include <map>
#include <string>

#include "curvlab/zonal.hpp"

namespace curvlab {

enum class Orientation {
  lower_bound,  // value >= reference expected
  upper_bound,  // value <= reference expected
  equality,
};

std::string to_string(Orientation o);

struct FunctionalReport {
  std::string name;
  std::string anchor;
  std::string model;
  double value = 0;
  double reference = 0;
  double gap = 0;  // value - reference
  double scale = 1;
  double tolerance = 0;  // relative to scale
  Orientation orientation = Orientation::lower_bound;
  bool verdict_applies = true;
  bool pass = true;
  std::string warning;
  std::map<std::string, double> params;

  /// Sets gap and pass from value/reference/scale/tolerance/orientation.
  void decide();
};

/// (1 + t cos theta)^exponent on a sphere grid.
ZonalField moebius_factor(GridPtr grid, double t, double exponent);

/// log of the conformal factor of a Moebius map of the round sphere:
/// e^w = sqrt(1-t^2)/(1 + t cos theta).
ZonalField moebius_log_factor(GridPtr grid, double t);

/// Pieces of the energy on an Einstein background (n != 4).
struct EnergyTerms {
  double rhs = 0;        // integrand of the energy, term by term
  double paneitz = 0;    // int u^2 L4(u^2)
  double sigma2 = 0;     // int u L_sigma2(u)
  double weyl = 0;       // int |W|^2 u^4
  double decomposed = 0; // paneitz + 32a/(n-4)^2 sigma2 + (n-4)/2 b weyl
};

EnergyTerms energy_terms(const ZonalField& u, double a, double b);

/// (n-4)/2 times the total I_{a,b}-curvature of u^{8/(n-4)} g.
double energy_rhs(const ZonalField& u, double a, double b);

/// Volume-normalised total I_{a,b}-curvature of u^{8/(n-4)} g.
double normalized_total_iab(const ZonalField& u, double a, double b);

/// Sharp Sobolev inequality; gap = rhs - lhs, expected >= 0.
FunctionalReport sobolev_check(const ZonalField& u, double a, double b, double tolerance = 1e-9);

/// J of e^{2w} g.
ZonalField conformal_scalar(const ZonalField& w);

/// int (J^)^2 dvol^ / Vol^^{(n-4)/n} against J^2 Vol^{4/n}.
FunctionalReport dj_functional(const ZonalField& w, double tolerance = 1e-9);

/// Volume-normalised total |W|^2 of e^{2w} g against |W|^2 Vol^{4/n}
/// (upper bound).
FunctionalReport weyl_yamabe_check(const ZonalField& w, double tolerance = 1e-9);

ZonalField paneitz_apply(const ZonalField& u);
double paneitz_lower_bound(const EinsteinModel& model);
/// (2/(n-4)) int u L4 u against n(n^2-4)/8 lambda^2 int u^2.
FunctionalReport paneitz_estimate(const ZonalField& u, double tolerance = 1e-9);

ZonalField conformal_laplacian_apply(const ZonalField& u);
/// Smallest eigenvalue of L2 on the zonal sector resolved by the grid.
double conformal_laplacian_first_eigenvalue(const ZonalGrid& grid);

/// int u L_sigma2(u) dvol = ((n-4)/4)^3 int sigma2 of u^{8/(n-4)} g.
double sigma2_operator(const ZonalField& u);

struct Dim4Functionals {
  double i = 0;
  double ii = 0;
  double iii = 0;
  // Sums of absolute values of the constituent integrals.
  double i_scale = 0;
  double ii_scale = 0;
  double iii_scale = 0;
};

Dim4Functionals functionals_dim4(const ZonalField& w);

/// gamma1 I + gamma2 II + gamma3 III with reference 0 (lower bound).
FunctionalReport f_gamma(const ZonalField& w, double g1, double g2, double g3, double tolerance = 1e-8);

struct Residual {
  double residual = 0;
  double scale = 1;
};

/// |III(w) - 12 [int (J^)^2 dvol^ - int J^2 dvol]|.
Residual iii_identity_residual(const ZonalField& w);

}  // namespace curvlab
