#include "curvlab/spectral_sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "curvlab/errors.hpp"

namespace curvlab {

std::string to_string(Orientation o) {
  switch (o) {
    case Orientation::lower_bound:
      return "lower_bound";
    case Orientation::upper_bound:
      return "upper_bound";
    case Orientation::equality:
      return "equality";
  }
  return "unknown";
}

void FunctionalReport::decide() {
  gap = value - reference;
  const double allowed = tolerance * scale;
  switch (orientation) {
    case Orientation::lower_bound:
      pass = gap >= -allowed;
      break;
    case Orientation::upper_bound:
      pass = gap <= allowed;
      break;
    case Orientation::equality:
      pass = std::abs(gap) <= allowed;
      break;
  }
  if (!std::isfinite(value) || !std::isfinite(reference)) pass = false;
  if (!verdict_applies) pass = true;
}

namespace {

struct Background {
  int n;
  double lambda;
  double j;
  double q;
  double sigma2;
  double weyl;
  double scal;
};

Background background(const ZonalField& f) {
  const EinsteinModel& m = f.grid->model();
  const EinsteinPointwise p = einstein_pointwise(m);
  return {m.dim, m.lambda, p.j, p.q, p.sigma2, p.weyl_norm2, m.dim * (m.dim - 1) * m.lambda};
}

ZonalField from_nodes(const ZonalField& like, std::vector<double> v) {
  return ZonalField(like.grid, std::move(v));
}

void require_positive(const ZonalField& u, const char* what) {
  if (!(u.min() > 0)) throw std::invalid_argument(std::string(what) + ": conformal factor must be positive");
}

double integral(const ZonalField& like, const std::vector<double>& v) { return like.grid->integrate(v); }

}  // namespace

ZonalField moebius_factor(GridPtr grid, double t, double exponent) {
  if (grid->model().kind != ModelKind::sphere) throw UnsupportedError("moebius_factor: needs a round-sphere grid");
  if (!(t >= 0 && t < 1)) throw std::invalid_argument("moebius_factor: t must lie in [0, 1)");
  return ZonalField::sample(std::move(grid), [=](double x) { return std::pow(1 + t * x, exponent); });
}

ZonalField moebius_log_factor(GridPtr grid, double t) {
  if (grid->model().kind != ModelKind::sphere) throw UnsupportedError("moebius_log_factor: needs a round-sphere grid");
  if (!(t >= 0 && t < 1)) throw std::invalid_argument("moebius_log_factor: t must lie in [0, 1)");
  const double half_log = 0.5 * std::log1p(-t * t);
  return ZonalField::sample(std::move(grid), [=](double x) { return half_log - std::log1p(t * x); });
}

// ---------------------------------------------------------------------------

EnergyTerms energy_terms(const ZonalField& u, double a, double b) {
  const Background bg = background(u);
  const int n = bg.n;
  if (n == 4) throw UnsupportedError("energy_rhs: dimension 4 has no power-type energy");
  require_positive(u, "energy_rhs");
  const double nm4 = n - 4;
  const std::size_t size = u.values.size();

  const ZonalField v = u * u;
  const ZonalCalculus cu = zonal_calculus(u);
  const ZonalCalculus cv = zonal_calculus(v);

  const double c_grad4 = -16 * a / (nm4 * nm4);
  const double c_mixed = -4 * a / nm4;
  const double c_gradv = ((n * n - 2.0 * n - 4) / 2 + (n - 1) * a / 2) * bg.lambda;
  const double c_u4 = nm4 / 2 * (bg.q + a * bg.sigma2 + b * bg.weyl);

  std::vector<double> rhs(size), grad4(size), mixed(size), gradv(size), u4(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double g2 = cu.grad_norm2[i];
    const double lv = cv.lap[i];
    grad4[i] = g2 * g2;
    mixed[i] = g2 * lv;
    gradv[i] = cv.grad_norm2[i];
    u4[i] = v.values[i] * v.values[i];
    rhs[i] = lv * lv + c_grad4 * grad4[i] + c_mixed * mixed[i] + c_gradv * gradv[i] + c_u4 * u4[i];
  }

  EnergyTerms out;
  out.rhs = integral(u, rhs);
  out.paneitz = pairing(v, paneitz_apply(v));
  const double i_grad4 = integral(u, grad4), i_mixed = integral(u, mixed), i_gradv = integral(u, gradv),
               i_u4 = integral(u, u4);
  out.sigma2 = -0.5 * i_grad4 - nm4 / 8 * i_mixed + nm4 * nm4 * (n - 1) * bg.lambda / 64 * i_gradv +
               std::pow(nm4 / 4, 3) * bg.sigma2 * i_u4;
  out.weyl = bg.weyl * i_u4;
  out.decomposed = out.paneitz + 32 * a / (nm4 * nm4) * out.sigma2 + nm4 / 2 * b * out.weyl;
  return out;
}

double energy_rhs(const ZonalField& u, double a, double b) { return energy_terms(u, a, b).rhs; }

double sigma2_operator(const ZonalField& u) { return energy_terms(u, 0, 0).sigma2; }

namespace {

// Vol(u^{8/(n-4)} g)^{(n-4)/n}
double normalized_volume(const ZonalField& u) {
  const int n = u.grid->model().dim;
  const double p = 4.0 * n / (n - 4);
  const double vol = u.map([p](double x) { return std::pow(x, p); }).integrate();
  return std::pow(vol, (n - 4.0) / n);
}

}  // namespace

double normalized_total_iab(const ZonalField& u, double a, double b) {
  const int n = u.grid->model().dim;
  return energy_rhs(u, a, b) / ((n - 4.0) / 2) / normalized_volume(u);
}

FunctionalReport sobolev_check(const ZonalField& u, double a, double b, double tolerance) {
  const EinsteinModel& m = u.grid->model();
  const int n = m.dim;
  FunctionalReport r;
  r.name = "sobolev";
  r.anchor = n == 3 ? "sobolev-dim3" : "sobolev-dim5+";
  r.model = m.describe();
  r.params = {{"a", a}, {"b", b}};
  const double c = yamabe_constant_iab(m, a, b);
  r.value = energy_rhs(u, a, b);
  r.reference = (n - 4.0) / 2 * c * normalized_volume(u);
  r.scale = std::max(std::abs(r.value), std::numeric_limits<double>::min());
  r.tolerance = tolerance;
  r.orientation = Orientation::lower_bound;
  if (a < -4 || a > 0 || b > 0) {
    r.verdict_applies = false;
    r.warning = "parameters outside a in [-4,0], b <= 0; verdict suppressed";
  }
  r.decide();
  return r;
}

// ---------------------------------------------------------------------------

ZonalField conformal_scalar(const ZonalField& w) {
  const Background bg = background(w);
  const ZonalCalculus cw = zonal_calculus(w);
  std::vector<double> out(w.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(-2 * w.values[i]) * (bg.j - cw.lap[i] - (bg.n - 2) / 2.0 * cw.grad_norm2[i]);
  }
  return from_nodes(w, std::move(out));
}

FunctionalReport dj_functional(const ZonalField& w, double tolerance) {
  const Background bg = background(w);
  const int n = bg.n;
  const ZonalField jhat = conformal_scalar(w);
  std::vector<double> num(w.values.size()), vol(w.values.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    const double e = std::exp(n * w.values[i]);
    num[i] = jhat.values[i] * jhat.values[i] * e;
    vol[i] = e;
  }
  FunctionalReport r;
  r.name = "dj";
  r.anchor = "dj-yamabe";
  r.model = w.grid->model().describe();
  r.value = integral(w, num) / std::pow(integral(w, vol), (n - 4.0) / n);
  r.reference = bg.j * bg.j * std::pow(w.grid->volume(), 4.0 / n);
  r.scale = std::max({std::abs(r.value), std::abs(r.reference), std::numeric_limits<double>::min()});
  r.tolerance = tolerance;
  r.orientation = Orientation::lower_bound;
  r.decide();
  return r;
}

FunctionalReport weyl_yamabe_check(const ZonalField& w, double tolerance) {
  const Background bg = background(w);
  const int n = bg.n;
  std::vector<double> num(w.values.size()), vol(w.values.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    num[i] = bg.weyl * std::exp((n - 4) * w.values[i]);
    vol[i] = std::exp(n * w.values[i]);
  }
  FunctionalReport r;
  r.name = "weyl_yamabe";
  r.anchor = "weyl-yamabe";
  r.model = w.grid->model().describe();
  r.value = integral(w, num) / std::pow(integral(w, vol), (n - 4.0) / n);
  r.reference = bg.weyl * std::pow(w.grid->volume(), 4.0 / n);
  r.scale = std::max({std::abs(r.value), std::abs(r.reference), std::numeric_limits<double>::min()});
  r.tolerance = tolerance;
  r.orientation = Orientation::upper_bound;
  r.decide();
  return r;
}

// ---------------------------------------------------------------------------

ZonalField paneitz_apply(const ZonalField& u) {
  const Background bg = background(u);
  const double n = bg.n;
  const double s1 = n * (n - 2) / 4 * bg.lambda, s2 = (n + 2) * (n - 4) / 4 * bg.lambda;
  return spectral_apply(u, [=](double mu) { return (mu + s1) * (mu + s2); });
}

double paneitz_lower_bound(const EinsteinModel& model) {
  const double n = model.dim;
  return n * (n - 2) * (n + 2) * (n - 4) * model.lambda * model.lambda / 16;
}

FunctionalReport paneitz_estimate(const ZonalField& u, double tolerance) {
  const Background bg = background(u);
  const int n = bg.n;
  if (n < 5) throw UnsupportedError("paneitz_estimate: dimension must be >= 5");
  FunctionalReport r;
  r.name = "paneitz_estimate";
  r.anchor = "paneitz-estimate";
  r.model = u.grid->model().describe();
  r.value = 2.0 / (n - 4) * pairing(u, paneitz_apply(u));
  r.reference = bg.q * pairing(u, u);
  r.scale = std::max(std::abs(r.value), std::numeric_limits<double>::min());
  r.tolerance = tolerance;
  r.orientation = Orientation::lower_bound;
  r.decide();
  return r;
}

ZonalField conformal_laplacian_apply(const ZonalField& u) {
  const Background bg = background(u);
  const double shift = (bg.n - 2) * bg.j / 2;
  return spectral_apply(u, [=](double mu) { return mu + shift; });
}

double conformal_laplacian_first_eigenvalue(const ZonalGrid& grid) {
  const EinsteinPointwise p = einstein_pointwise(grid.model());
  const double shift = (grid.model().dim - 2) * p.j / 2;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid.size(); ++k) best = std::min(best, grid.laplace_eigenvalue(k) + shift);
  return best;
}

// ---------------------------------------------------------------------------

Dim4Functionals functionals_dim4(const ZonalField& w) {
  const Background bg = background(w);
  if (bg.n != 4) throw UnsupportedError("functionals_dim4: dimension must be 4");
  const double vol = w.grid->volume();
  const ZonalCalculus cw = zonal_calculus(w);
  const double int_w = w.integrate();
  // log of the average of e^{4w}, exact (0) at w = 0.
  const double log_avg = std::log1p(w.map([](double x) { return std::expm1(4 * x); }).integrate() / vol);
  const double delta_scal = 0;  // R is constant on the models

  Dim4Functionals f;
  const double i1 = 4 * bg.weyl * int_w, i2 = bg.weyl * vol * log_avg;
  f.i = i1 - i2;
  f.i_scale = std::abs(i1) + std::abs(i2);

  const double ii1 = pairing(w, paneitz_apply(w)), ii2 = 2 * bg.q * int_w, ii3 = 0.5 * bg.q * vol * log_avg;
  f.ii = ii1 + ii2 - ii3;
  f.ii_scale = std::abs(ii1) + std::abs(ii2) + std::abs(ii3);

  std::vector<double> sq(w.values.size()), gr(w.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double s = cw.lap[i] + cw.grad_norm2[i];
    sq[i] = 12 * s * s;
    gr[i] = 4 * bg.scal * cw.grad_norm2[i] + 4 * w.values[i] * delta_scal;
  }
  const double iii1 = integral(w, sq), iii2 = integral(w, gr);
  f.iii = iii1 - iii2;
  f.iii_scale = std::abs(iii1) + std::abs(iii2);
  return f;
}

FunctionalReport f_gamma(const ZonalField& w, double g1, double g2, double g3, double tolerance) {
  const Dim4Functionals f = functionals_dim4(w);
  FunctionalReport r;
  r.name = "f_gamma";
  r.anchor = "functional-determinant-extremal";
  r.model = w.grid->model().describe();
  r.params = {{"gamma1", g1}, {"gamma2", g2}, {"gamma3", g3}};
  r.value = g1 * f.i + g2 * f.ii + g3 * f.iii;
  r.reference = 0;
  r.scale = std::max(std::abs(g1) * f.i_scale + std::abs(g2) * f.ii_scale + std::abs(g3) * f.iii_scale,
                     std::numeric_limits<double>::min());
  r.tolerance = tolerance;
  r.orientation = Orientation::lower_bound;
  if (g1 > 0 || g2 < 0 || g3 < 0) {
    r.verdict_applies = false;
    r.warning = "gamma outside gamma1 <= 0, gamma2, gamma3 >= 0; verdict suppressed";
  }
  r.decide();
  return r;
}

Residual iii_identity_residual(const ZonalField& w) {
  const Background bg = background(w);
  if (bg.n != 4) throw UnsupportedError("iii_identity_residual: dimension must be 4");
  const Dim4Functionals f = functionals_dim4(w);
  const ZonalCalculus cw = zonal_calculus(w);
  // In dimension four (J^)^2 dvol^ = (J - Lap w - |grad w|^2)^2 dvol.
  std::vector<double> sq(w.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double s = bg.j - cw.lap[i] - cw.grad_norm2[i];
    sq[i] = s * s;
  }
  const double hat = integral(w, sq), base = bg.j * bg.j * w.grid->volume();
  Residual r;
  r.residual = std::abs(f.iii - 12 * (hat - base));
  r.scale = std::max(f.iii_scale + 12 * (hat + base), std::numeric_limits<double>::min());
  return r;
}

}  // namespace curvlab
