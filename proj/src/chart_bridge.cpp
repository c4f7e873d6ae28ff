#include "curvlab/chart_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab {

ChartMetric conformal_sphere_chart(const EinsteinModel& model, ZonalProfile phi, bool south) {
  ChartMetric base = stereographic_chart(model);
  const Real r2 = 1.0L / static_cast<Real>(model.lambda);
  const Real sign = south ? -1 : 1;
  auto round = base.eval;
  base.eval = [round, phi = std::move(phi), r2, sign](const VecR& x) {
    const Real s = x.squaredNorm();
    const Real c = sign * (r2 - s) / (r2 + s);
    return MatR(round(x) * phi(c));
  };
  return base;
}

bool chart_point_for(const EinsteinModel& model, double cos_theta, VecR& point) {
  const bool south = cos_theta < 0;
  const Real c = std::abs(static_cast<Real>(cos_theta));
  const Real r = 1 / std::sqrt(static_cast<Real>(model.lambda));
  point = VecR::Zero(model.dim);
  point[0] = r * std::sqrt((1 - c) / (1 + c));
  return south;
}

ChartTotals chart_totals(const EinsteinModel& model, const ZonalProfile& phi, double a, double b, int nodes,
                         const StencilOptions& opts) {
  if (model.kind != ModelKind::sphere) throw UnsupportedError("chart_totals: needs a round sphere");
  const ZonalGrid grid(model, nodes);
  const ChartMetric north = conformal_sphere_chart(model, phi, false);
  const ChartMetric south = conformal_sphere_chart(model, phi, true);
  const std::size_t size = static_cast<std::size_t>(nodes);
  std::vector<double> q(size), s2(size), w2(size), iab(size), vol(size);
  const double half_n = model.dim / 2.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double c = grid.abscissa()[i];
    VecR x;
    const bool use_south = chart_point_for(model, c, x);
    const CurvatureBundle cb = full_curvature(use_south ? south : north, x, a, b, opts);
    const double dv = std::pow(static_cast<double>(phi(c)), half_n);
    q[i] = static_cast<double>(cb.q) * dv;
    s2[i] = static_cast<double>(cb.sigma2) * dv;
    w2[i] = static_cast<double>(cb.weyl_norm2) * dv;
    iab[i] = static_cast<double>(*cb.i_ab) * dv;
    vol[i] = dv;
  }
  ChartTotals t;
  t.total_q = grid.integrate(q);
  t.total_sigma2 = grid.integrate(s2);
  t.total_weyl = grid.integrate(w2);
  t.total_iab = grid.integrate(iab);
  t.volume = grid.integrate(vol);
  return t;
}

namespace {

std::vector<double> sample_angles(int samples) {
  std::vector<double> c;
  for (int j = 0; j < samples; ++j) c.push_back(std::cos(std::numbers::pi * (j + 0.5) / samples));
  return c;
}

}  // namespace

Residual q_transform_residual(const ZonalField& f, int samples, const StencilOptions& opts) {
  const EinsteinModel& model = f.grid->model();
  if (model.kind != ModelKind::sphere) throw UnsupportedError("q_transform_residual: needs a round sphere");
  const int n = model.dim;
  const auto value = f.interpolant();
  const auto l4 = paneitz_apply(f).interpolant();
  const double q0 = einstein_pointwise(model).q;

  ZonalProfile phi;
  if (n == 4) {
    phi = [value](Real c) { return std::exp(2 * value(c)); };
  } else {
    if (!(f.min() > 0)) throw std::invalid_argument("q_transform_residual: u must be positive");
    const Real p = 4.0L / (n - 4);
    phi = [value, p](Real c) { return std::pow(value(c), p); };
  }
  const ChartMetric north = conformal_sphere_chart(model, phi, false);
  const ChartMetric south = conformal_sphere_chart(model, phi, true);

  Residual r;
  r.residual = 0;
  r.scale = n == 4 ? std::abs(q0) : 0;
  for (double c : sample_angles(samples)) {
    VecR x;
    const bool use_south = chart_point_for(model, c, x);
    const CurvatureBundle cb = full_curvature(use_south ? south : north, x, 0, 0, opts);
    const long double qhat = cb.q;
    const long double v = value(c), lv = l4(c);
    long double lhs, rhs;
    if (n == 4) {
      lhs = std::exp(4 * v) * qhat;
      rhs = q0 + lv;
    } else {
      lhs = std::pow(v, static_cast<long double>(n + 4) / (n - 4)) * qhat;
      rhs = 2.0L / (n - 4) * lv;
      r.scale = std::max(r.scale, static_cast<double>(std::abs(rhs)));
    }
    r.residual = std::max(r.residual, static_cast<double>(std::abs(lhs - rhs)));
  }
  if (r.scale == 0) r.scale = 1;
  return r;
}

Residual conformal_scalar_chart_residual(const ZonalField& w, int samples, const StencilOptions& opts) {
  const EinsteinModel& model = w.grid->model();
  if (model.kind != ModelKind::sphere) throw UnsupportedError("conformal_scalar_chart_residual: needs a round sphere");
  const auto value = w.interpolant();
  const auto jhat = conformal_scalar(w).interpolant();
  ZonalProfile phi = [value](Real c) { return std::exp(2 * value(c)); };
  const ChartMetric north = conformal_sphere_chart(model, phi, false);
  const ChartMetric south = conformal_sphere_chart(model, phi, true);
  Residual r;
  r.residual = 0;
  r.scale = 0;
  for (double c : sample_angles(samples)) {
    VecR x;
    const bool use_south = chart_point_for(model, c, x);
    const CurvatureBundle cb = pointwise_curvature(use_south ? south : north, x, opts);
    r.residual = std::max(r.residual, static_cast<double>(std::abs(cb.j - jhat(c))));
    r.scale = std::max(r.scale, static_cast<double>(std::abs(jhat(c))));
  }
  if (r.scale == 0) r.scale = 1;
  return r;
}

}  // namespace curvlab
