#pragma once

// Cross-checks between the zonal calculus and the chart tensor engine:
// conformally rescaled round metrics in stereographic coordinates.

#include <functional>

#include "curvlab/spectral_sphere.hpp"
#include "curvlab/tensor_engine.hpp"

namespace curvlab {

/// Conformal factor as a function of cos(theta).
using ZonalProfile = std::function<Real(Real)>;

/// phi(cos theta) * g_round in the stereographic chart centred at the north
/// pole (south pole when `south`, where cos theta is replaced by -cos theta).
ChartMetric conformal_sphere_chart(const EinsteinModel& model, ZonalProfile phi, bool south = false);

/// Chart point at polar angle theta (on the first axis), in the chart whose
/// pole is nearest.  Returns whether the south chart is used.
bool chart_point_for(const EinsteinModel& model, double cos_theta, VecR& point);

struct ChartTotals {
  double total_q = 0;
  double total_sigma2 = 0;
  double total_weyl = 0;
  double total_iab = 0;
  double volume = 0;
};

/// Integrals over S^n of the curvature of phi g_round, with curvature from the
/// tensor engine at the nodes of a `nodes`-point zonal rule.
ChartTotals chart_totals(const EinsteinModel& model, const ZonalProfile& phi, double a, double b,
                         int nodes = 24, const StencilOptions& opts = {});

/// Sup over sample angles of the conformal transformation law of Q:
///   n = 4:  |e^{4w} Q^ - Q - L4 w|        for g^ = e^{2w} g
///   n != 4: |u^{(n+4)/(n-4)} Q^ - 2/(n-4) L4 u|   for g^ = u^{4/(n-4)} g
/// scale = max |Q|, resp. max |2/(n-4) L4 u|.
Residual q_transform_residual(const ZonalField& f, int samples = 9, const StencilOptions& opts = {});

/// Sup relative difference between conformal_scalar(w) and the chart J of
/// e^{2w} g.
Residual conformal_scalar_chart_residual(const ZonalField& w, int samples = 7,
                                         const StencilOptions& opts = {});

}  // namespace curvlab
