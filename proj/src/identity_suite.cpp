#include "curvlab/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "curvlab/chart_bridge.hpp"
#include "curvlab/errors.hpp"

namespace curvlab {

double DivergenceCheck::max_residual() const {
  double m = 0;
  for (const auto& r : identities) m = std::max(m, r.residual);
  return m;
}

double DivergenceCheck::min_order() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : identities)
    if (r.order_resolved) m = std::min(m, r.order);
  return m;
}

namespace {

// Below this the halved-step residual is rounding noise, not truncation error.
constexpr double kOrderFloor = 1e-11;
// The order probe uses a two-level outer stencil (formal order 4) at steps
// wide enough that truncation error dominates the ~1e-9 accuracy of the
// nested Hess J field.
constexpr int kOrderLevels = 2;
constexpr Real kOrderStepFactor = 8;

double sup(const VecR& v) { return v.size() ? static_cast<double>(v.cwiseAbs().maxCoeff()) : 0; }

std::vector<Real> key(const VecR& x) { return {x.data(), x.data() + x.size()}; }

// Memoised curvature at chart points.
class BundleCache {
 public:
  BundleCache(const ChartMetric& metric, const StencilOptions& opts, bool full)
      : metric_(metric), opts_(opts), full_(full) {}

  const CurvatureBundle& at(const VecR& x) {
    auto k = key(x);
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    CurvatureBundle cb = full_ ? full_curvature(metric_, x, 0, 0, opts_) : pointwise_curvature(metric_, x, opts_);
    return cache_.emplace(std::move(k), std::move(cb)).first->second;
  }

 private:
  const ChartMetric& metric_;
  StencilOptions opts_;
  bool full_;
  std::map<std::vector<Real>, CurvatureBundle> cache_;
};

// E(grad J) as a covector: E_ij g^{ik} d_k J.
VecR e_of(const CurvatureBundle& cb, const VecR& dj) { return cb.e * (cb.g_inv * dj); }

}  // namespace

DivergenceCheck check_divergence_identities(const ChartMetric& metric, const VecR& point,
                                            const StencilOptions& opts, std::uint64_t seed, bool with_order) {
  const int n = metric.dim;
  const Real rn = n;
  const CurvatureBundle center = full_curvature(metric, point, 0, 0, opts);
  const VecR& dj = center.grad_j;
  const VecR edj = e_of(center, dj);
  const VecR jdj = center.j * dj;
  const ScalarField u = random_polynomial(n, seed);
  const HessianResult hu = hessian_laplacian(u, metric, point, opts);
  const VecR ric_du = center.ric * (center.g_inv * hu.grad);

  BundleCache pointwise(metric, opts, false);
  BundleCache full(metric, opts, true);
  const Sym2Field p_field = [&](const VecR& x) { return pointwise.at(x).schouten; };
  const Sym2Field tf_jp = [&](const VecR& x) {
    const auto& cb = pointwise.at(x);
    return MatR(cb.j * cb.schouten - cb.j * cb.j / rn * cb.g);
  };
  const Sym2Field jp = [&](const VecR& x) {
    const auto& cb = pointwise.at(x);
    return MatR(cb.j * cb.schouten);
  };
  const Sym2Field hess_j = [&](const VecR& x) {
    const auto& cb = x == point ? center : full.at(x);
    return MatR(cb.hess_j - cb.lap_j * cb.g);
  };
  const Sym2Field hess_u = [&](const VecR& x) { return hessian_laplacian(u, metric, x, opts).hess; };
  const ScalarField lap_u = [&](const VecR& x) { return hessian_laplacian(u, metric, x, opts).lap; };

  struct Spec {
    const char* name;
    std::function<VecR(const StencilOptions&)> lhs;
    VecR rhs;
  };
  const std::vector<Spec> specs = {
      {"bianchi", [&](const StencilOptions& o) { return divergence_sym2(p_field, metric, point, o); }, dj},
      {"ricci",
       [&](const StencilOptions& o) {
         return VecR(divergence_sym2(hess_u, metric, point, o) - fd_gradient(lap_u, point, o.step, o.richardson_levels));
       },
       ric_du},
      {"div-tracefree-jp", [&](const StencilOptions& o) { return divergence_sym2(tf_jp, metric, point, o); },
       edj + (rn - 1) / rn * jdj},
      {"div-jp", [&](const StencilOptions& o) { return divergence_sym2(jp, metric, point, o); },
       edj + (rn + 1) / rn * jdj},
      {"div-hessian-j", [&](const StencilOptions& o) { return divergence_sym2(hess_j, metric, point, o); },
       (rn - 2) * edj + 2 * (rn - 1) / rn * jdj},
  };

  DivergenceCheck out;
  StencilOptions probe = opts;
  probe.richardson_levels = kOrderLevels;
  for (const Spec& s : specs) {
    IdentityResidual r;
    r.name = s.name;
    const VecR lhs = s.lhs(opts);
    r.residual = sup(lhs - s.rhs);
    r.scale = std::max(sup(lhs), sup(s.rhs));
    if (with_order) {
      probe.step = 2 * kOrderStepFactor * opts.step;
      r.coarse = sup(s.lhs(probe) - s.rhs);
      probe.step = kOrderStepFactor * opts.step;
      r.fine = sup(s.lhs(probe) - s.rhs);
      r.order_resolved = r.fine > kOrderFloor;
      r.order = r.order_resolved ? std::log2(r.coarse / r.fine) : 0;
    }
    out.identities.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

EinsteinScale einstein_scale_affine(int n, double c, double b_norm, int nodes) {
  if (n < 3) throw std::invalid_argument("einstein_scale_affine: n must be >= 3");
  if (!(b_norm >= 0) || !(b_norm < c)) {
    throw std::invalid_argument("einstein_scale_affine: need 0 <= |b| < c so that u > 0");
  }
  EinsteinScale s;
  s.n = n;
  s.c = c;
  s.b = b_norm;
  s.lambda_hat = c * c - b_norm * b_norm;
  s.u_min = c - b_norm;

  const GridPtr grid = make_grid(round_sphere(n, 1), nodes);
  const ZonalField u = scale_field(s, grid);
  const ZonalCalculus zc = zonal_calculus(u);
  for (int i = 0; i < grid->size(); ++i) {
    const double ui = u.values[i];
    const double rhs = -ui / 2 + (zc.grad_norm2[i] + s.lambda_hat) / (2 * ui);
    s.residual = std::max({s.residual, std::abs(zc.hess_rad[i] - rhs), std::abs(zc.hess_tan[i] - rhs)});
    const double affine = -(ui - c);
    s.affine_residual = std::max({s.affine_residual, std::abs(zc.hess_rad[i] - affine), std::abs(zc.hess_tan[i] - affine)});
  }
  return s;
}

ZonalField scale_field(const EinsteinScale& s, GridPtr grid) {
  const EinsteinModel& m = grid->model();
  if (m.kind != ModelKind::sphere || m.dim != s.n || m.lambda != 1) {
    throw std::invalid_argument("scale_field: needs the unit sphere of matching dimension");
  }
  return ZonalField::sample(std::move(grid), [&](double x) { return s.c + s.b * x; });
}

PreIbpResult check_pre_ibp(const ZonalField& f, const ZonalField& h, const EinsteinScale& s) {
  const GridPtr& grid = f.grid;
  if (h.grid != grid) throw std::invalid_argument("check_pre_ibp: fields on different grids");
  const int n = s.n;
  const ZonalField u = scale_field(s, grid);
  const std::vector<double>& x = grid->abscissa();
  ZonalField alpha = f;
  for (int i = 0; i < grid->size(); ++i) alpha.values[i] += (1 - x[i] * x[i]) * h.values[i];
  const ZonalCalculus da = zonal_calculus(alpha);
  const ZonalCalculus du = zonal_calculus(u);

  // Radial unit direction N = d/d theta.  T = beta g + (alpha - beta) N N, so
  // (div T)(N) = d_N alpha + (n-1) cot(theta) (alpha - beta); the last factor is
  // (n-1) x sin(theta) h since alpha - beta = sin^2(theta) h.
  std::vector<double> pairing(grid->size()), tp(grid->size()), tr(grid->size());
  for (int i = 0; i < grid->size(); ++i) {
    const double sin_t = std::sqrt(std::max(0.0, 1 - x[i] * x[i]));
    const double div_n = da.ds[i] + (n - 1) * x[i] * sin_t * h.values[i];
    pairing[i] = div_n * du.ds[i];
    const double trace = alpha.values[i] + (n - 1) * f.values[i];
    tp[i] = -u.values[i] * 0.5 * trace;  // P = g/2 on the unit sphere
    tr[i] = 0.5 * (du.grad_norm2[i] + s.lambda_hat) / u.values[i] * trace;
  }
  PreIbpResult r;
  r.terms = {grid->integrate(pairing), grid->integrate(tp), grid->integrate(tr)};
  r.integral = r.terms[0] + r.terms[1] + r.terms[2];
  r.scale = std::abs(r.terms[0]) + std::abs(r.terms[1]) + std::abs(r.terms[2]);
  return r;
}

double ObataSides::residual() const { return std::abs(lhs) + std::abs(rhs); }

ObataSides obata_sides(const ChartMetric& metric, const ScalarField& u, const std::vector<VecR>& points,
                       const std::vector<double>& weights, const StencilOptions& opts) {
  if (points.size() != weights.size()) throw std::invalid_argument("obata_sides: size mismatch");
  ObataSides s;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CurvatureBundle cb = pointwise_curvature(metric, points[i], opts);
    const HessianResult hu = hessian_laplacian(u, metric, points[i], opts);
    const MatR e_up = cb.g_inv * cb.e * cb.g_inv;
    s.lhs += weights[i] * static_cast<double>(u(points[i]) * (e_up.array() * cb.e.array()).sum());
    s.rhs -= weights[i] * static_cast<double>((e_up.array() * hu.hess.array()).sum());
  }
  return s;
}

ObataSides check_obata(const EinsteinScale& s, const EinsteinModel& model, int nodes) {
  if (model.kind == ModelKind::torus) {
    if (s.b != 0) throw std::invalid_argument("check_obata: only constant u on a torus");
    const ChartMetric chart = torus_chart(model);
    std::vector<VecR> points;
    std::vector<double> weights;
    for (int i = 0; i < nodes; ++i) {
      VecR x = 0.5 * (chart.lower + chart.upper);
      x[0] = chart.lower[0] + (chart.upper[0] - chart.lower[0]) * (0.25L + 0.5L * i / nodes);
      points.push_back(x);
      weights.push_back(model.volume / nodes);
    }
    const Real c = s.c;
    return obata_sides(chart, [c](const VecR&) { return c; }, points, weights);
  }
  if (model.kind != ModelKind::sphere) throw UnsupportedError("check_obata: sphere or torus models only");

  const ZonalGrid grid(model, nodes);
  const ChartMetric chart = stereographic_chart(model);
  const Real r2 = 1.0L / static_cast<Real>(model.lambda);
  ObataSides total;
  for (int i = 0; i < grid.size(); ++i) {
    VecR x;
    const bool south = chart_point_for(model, grid.abscissa()[i], x);
    const Real sign = south ? -1 : 1;
    const Real c = s.c, b = s.b;
    const ScalarField u = [=](const VecR& y) {
      const Real q = y.squaredNorm();
      return c + b * sign * (r2 - q) / (r2 + q);
    };
    // One-point rule at this node; integrate() turns nodal values into the
    // integral over the sphere.
    const ObataSides one = obata_sides(chart, u, {x}, {1.0});
    std::vector<double> lv(grid.size(), 0.0), rv(grid.size(), 0.0);
    lv[i] = one.lhs;
    rv[i] = one.rhs;
    total.lhs += grid.integrate(lv);
    total.rhs += grid.integrate(rv);
  }
  return total;
}

}  // namespace curvlab
