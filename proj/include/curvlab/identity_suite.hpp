#pragma once

// Divergence identities on arbitrary chart metrics, integration-by-parts
// identities against Einstein scales on the round sphere.  The exact
// coefficient algebra that combines them lives in exact_algebra.hpp.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "curvlab/spectral_sphere.hpp"
#include "curvlab/tensor_engine.hpp"

namespace curvlab {

// ---------------------------------------------------------------------------
// Pointwise divergence identities.

struct IdentityResidual {
  std::string name;
  double residual = 0;  // sup norm with the configured (extrapolated) stencil
  double scale = 0;     // sup norm of the largest term
  // Order probe: outer stencil with two Richardson levels at steps 2h and h,
  // h = 8 * step.
  double coarse = 0;
  double fine = 0;
  double order = 0;            // log2(coarse / fine)
  bool order_resolved = true;  // false when `fine` sits at the rounding floor
};

struct DivergenceCheck {
  std::vector<IdentityResidual> identities;

  double max_residual() const;
  /// Smallest observed order among resolved identities (infinity if none).
  double min_order() const;
};

/// Residuals of
///   bianchi:         div P - dJ
///   ricci:           div Hess u - d Lap u - Ric(grad u), u a random polynomial
///   div-tracefree-jp div(JP - J^2 g/n) - E(grad J) - (n-1)/n J dJ
///   div-jp:          div(JP) - E(grad J) - (n+1)/n J dJ
///   div-hessian-j:   div(Hess J - Lap J g) - (n-2)E(grad J) - 2(n-1)/n J dJ
/// at `point`.  None of these needs any curvature condition.  With
/// `with_order`, each is also evaluated by the order probe described in
/// IdentityResidual.
DivergenceCheck check_divergence_identities(const ChartMetric& metric, const VecR& point,
                                            const StencilOptions& opts = {}, std::uint64_t seed = 0,
                                            bool with_order = true);

// ---------------------------------------------------------------------------
// Einstein scales on the unit sphere.

/// u = c + b cos(theta) on the unit n-sphere, for which u^{-2} g is Einstein
/// with P = (lambda_hat/2) u^{-2} g.
struct EinsteinScale {
  int n = 0;
  double c = 1;
  double b = 0;
  double lambda_hat = 1;
  double u_min = 1;
  /// Sup over nodes of |Hess u + u P - (1/2) u^{-1}(|grad u|^2 + lambda_hat) g|.
  double residual = 0;
  /// Sup over nodes of |Hess u + (u - c) g|.
  double affine_residual = 0;
};

EinsteinScale einstein_scale_affine(int n, double c, double b_norm, int nodes = 64);

/// u as a field on a unit-sphere grid of matching dimension.
ZonalField scale_field(const EinsteinScale& s, GridPtr grid);

struct PreIbpResult {
  double integral = 0;
  double scale = 0;  // sum of |integral| of the three constituent terms
  std::array<double, 3> terms{};
};

/// int <div T, grad u> - u <T, P> + (1/2) u^{-1}(|grad u|^2 + lambda_hat) tr T
/// over the unit sphere, for the zonal tensor with eigenvalue
/// alpha = f + (1-x^2) h on d theta^2 and beta = f on the orthogonal
/// complement (x = cos theta).
PreIbpResult check_pre_ibp(const ZonalField& f, const ZonalField& h, const EinsteinScale& s);

struct ObataSides {
  double lhs = 0;  // int u |E|^2
  double rhs = 0;  // -int <E, Hess u>
  double residual() const;
};

/// Weighted sums over chart points; E from the tensor engine.
ObataSides obata_sides(const ChartMetric& metric, const ScalarField& u, const std::vector<VecR>& points,
                       const std::vector<double>& weights, const StencilOptions& opts = {});

/// Both sides for an Einstein scale on a round sphere (quadrature over
/// stereographic charts), or for u = c on a flat torus.
ObataSides check_obata(const EinsteinScale& s, const EinsteinModel& model, int nodes = 16);

}  // namespace curvlab
