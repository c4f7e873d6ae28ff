#include "curvlab/tensor_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "curvlab/errors.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
  std::size_t size = 1;
  for (int r = 0; r < rank; ++r) size *= static_cast<std::size_t>(dim);
  data_.assign(size, 0);
}

Real& Tensor::operator()(int a, int b, int c) { return data_[(a * dim_ + b) * dim_ + c]; }
Real Tensor::operator()(int a, int b, int c) const { return data_[(a * dim_ + b) * dim_ + c]; }
Real& Tensor::operator()(int a, int b, int c, int d) {
  return data_[((a * dim_ + b) * dim_ + c) * dim_ + d];
}
Real Tensor::operator()(int a, int b, int c, int d) const {
  return data_[((a * dim_ + b) * dim_ + c) * dim_ + d];
}

Real Tensor::squared_sum() const {
  Real s = 0;
  for (Real v : data_) s += v * v;
  return s;
}

Real Tensor::max_abs() const {
  Real m = 0;
  for (Real v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool ChartMetric::contains(const VecR& x, Real radius) const {
  for (int i = 0; i < dim; ++i) {
    if (x[i] - radius < lower[i] || x[i] + radius > upper[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Finite differences

namespace {

struct Stencil1D {
  std::vector<int> offsets;
  std::vector<Real> weights;
};

// Second-order central stencils for the m-th derivative (unit step).  Their
// error expansions are even in h, which is what Richardson relies on.
const Stencil1D& central_stencil(int m) {
  static const std::array<Stencil1D, 5> table = {{
      {{0}, {1}},
      {{-1, 1}, {-0.5L, 0.5L}},
      {{-1, 0, 1}, {1, -2, 1}},
      {{-2, -1, 1, 2}, {-0.5L, 1, -1, 0.5L}},
      {{-2, -1, 0, 1, 2}, {1, -4, 6, -4, 1}},
  }};
  return table.at(static_cast<std::size_t>(m));
}

// Richardson tableau over steps h, 2h, 4h, ... (value(k) evaluated at h*2^k).
template <typename T, typename F>
T richardson(F&& value, int levels) {
  std::vector<T> column;
  column.reserve(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) column.push_back(value(k));
  Real factor = 1;
  for (int j = 1; j < levels; ++j) {
    factor *= 4;
    for (int k = 0; k + j < levels; ++k) {
      column[k] = (column[k] * factor - column[k + 1]) / (factor - 1);
    }
  }
  return column.front();
}

void check_spd(const MatR& g, const VecR& x) {
  const Real scale = g.cwiseAbs().maxCoeff();
  if (!((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12L * std::max<Real>(scale, 1))) {
    std::ostringstream os;
    os << "metric not symmetric at point " << x.transpose().cast<double>();
    throw MetricError(os.str());
  }
  Eigen::LLT<MatR> llt(g);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "metric not positive definite at point " << x.transpose().cast<double>();
    throw MetricError(os.str());
  }
}

// Memoised metric samples on the lattice point + h * offset.
class LatticeSampler {
 public:
  LatticeSampler(const ChartMetric& metric, const VecR& point, Real h)
      : metric_(metric), point_(point), h_(h) {}

  const MatR& at(const std::vector<int>& offset) {
    auto it = cache_.find(offset);
    if (it != cache_.end()) return it->second;
    VecR x = point_;
    for (int i = 0; i < metric_.dim; ++i) x[i] += h_ * offset[i];
    MatR g = metric_.eval(x);
    check_spd(g, x);
    return cache_.emplace(offset, std::move(g)).first->second;
  }

 private:
  const ChartMetric& metric_;
  VecR point_;
  Real h_;
  std::map<std::vector<int>, MatR> cache_;
};

// Derivative of the metric along the multiset `dirs` at lattice step h.
MatR lattice_derivative(LatticeSampler& sampler, int dim, const std::vector<int>& dirs,
                        Real h) {
  std::vector<int> counts(dim, 0);
  for (int d : dirs) ++counts[d];
  std::vector<int> active;
  for (int d = 0; d < dim; ++d)
    if (counts[d] > 0) active.push_back(d);

  MatR acc;
  std::vector<std::size_t> pos(active.size(), 0);
  std::vector<int> offset(dim, 0);
  while (true) {
    Real w = 1;
    std::fill(offset.begin(), offset.end(), 0);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const Stencil1D& s = central_stencil(counts[active[a]]);
      offset[active[a]] = s.offsets[pos[a]];
      w *= s.weights[pos[a]];
    }
    const MatR& g = sampler.at(offset);
    if (acc.size() == 0) {
      acc = w * g;
    } else {
      acc += w * g;
    }
    std::size_t a = 0;
    for (; a < active.size(); ++a) {
      if (++pos[a] < central_stencil(counts[active[a]]).offsets.size()) break;
      pos[a] = 0;
    }
    if (a == active.size()) break;
  }
  return acc / std::pow(h, static_cast<Real>(dirs.size()));
}

void for_each_multiset(int dim, int size, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(size, 0);
  while (true) {
    fn(idx);
    int pos = size - 1;
    while (pos >= 0 && idx[pos] == dim - 1) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int q = pos + 1; q < size; ++q) idx[q] = idx[pos];
  }
}

void for_each_permutation(std::vector<int> idx, const std::function<void(const std::vector<int>&)>& fn) {
  std::sort(idx.begin(), idx.end());
  do {
    fn(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
}

std::size_t flat_index(const std::vector<int>& idx, int dim) {
  std::size_t k = 0;
  for (int i : idx) k = k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
  return k;
}

}  // namespace

MetricJet build_jet(const ChartMetric& metric, const VecR& point, const StencilOptions& opts,
                    int order) {
  const int n = metric.dim;
  if (order < 0 || order > 4) throw std::invalid_argument("jet order must be in [0, 4]");
  if (!(opts.step > 0)) throw std::invalid_argument("finite-difference step must be positive");
  if (opts.richardson_levels < 1) throw std::invalid_argument("richardson_levels must be >= 1");
  if (point.size() != n) throw std::invalid_argument("point dimension mismatch");

  const int reach = order >= 3 ? 2 : (order >= 1 ? 1 : 0);
  const Real radius = reach * opts.step * std::ldexp(Real(1), opts.richardson_levels - 1);
  if (!metric.contains(point, radius)) {
    std::ostringstream os;
    os << "stencil of radius " << static_cast<double>(radius) << " around "
       << point.transpose().cast<double>() << " leaves the chart domain";
    throw DomainError(os.str());
  }

  MetricJet jet;
  jet.dim = n;
  jet.order = order;
  jet.point = point;
  jet.step = opts.step;
  jet.richardson_levels = opts.richardson_levels;

  std::vector<LatticeSampler> samplers;
  samplers.reserve(static_cast<std::size_t>(opts.richardson_levels));
  for (int k = 0; k < opts.richardson_levels; ++k) {
    samplers.emplace_back(metric, point, opts.step * std::ldexp(Real(1), k));
  }

  jet.g = samplers.front().at(std::vector<int>(n, 0));
  std::array<std::vector<MatR>*, 5> slots = {nullptr, &jet.d1, &jet.d2, &jet.d3, &jet.d4};
  std::size_t count = 1;
  for (int m = 1; m <= order; ++m) {
    count *= static_cast<std::size_t>(n);
    slots[m]->assign(count, MatR::Zero(n, n));
    for_each_multiset(n, m, [&](const std::vector<int>& dirs) {
      MatR d = richardson<MatR>(
          [&](int k) {
            return lattice_derivative(samplers[k], n, dirs, opts.step * std::ldexp(Real(1), k));
          },
          opts.richardson_levels);
      d = (0.5L * (d + d.transpose())).eval();
      for_each_permutation(dirs, [&](const std::vector<int>& p) { (*slots[m])[flat_index(p, n)] = d; });
    });
  }
  return jet;
}

void MetricJet::taylor_metric(const VecR& y, MatR& g_out, std::vector<MatR>& d1_out,
                              std::vector<MatR>& d2_out) const {
  const int n = dim;
  if (order < 4) throw std::logic_error("taylor_metric needs an order-4 jet");
  const auto at = [n](int k, int l) { return static_cast<std::size_t>(k * n + l); };
  // t3[kl] = y^m d3_klm, s4[kl] = y^m y^p d4_klmp; symmetric in (k, l).
  std::vector<MatR> t3(at(n, 0)), s4(at(n, 0));
  for (int k = 0; k < n; ++k)
    for (int l = k; l < n; ++l) {
      MatR a = MatR::Zero(n, n), b = MatR::Zero(n, n);
      for (int m = 0; m < n; ++m) {
        a += y[m] * dddg(k, l, m);
        b += (y[m] * y[m]) * ddddg(k, l, m, m);
        for (int p = m + 1; p < n; ++p) b += (2 * y[m] * y[p]) * ddddg(k, l, m, p);
      }
      t3[at(k, l)] = t3[at(l, k)] = a;
      s4[at(k, l)] = s4[at(l, k)] = b;
    }
  d2_out.resize(at(n, 0));
  d1_out.resize(n);
  g_out = g;
  for (int k = 0; k < n; ++k) {
    MatR d1k = dg(k), gk = dg(k);
    for (int l = 0; l < n; ++l) {
      const MatR& d2kl = ddg(k, l);
      d2_out[at(k, l)] = d2kl + t3[at(k, l)] + 0.5L * s4[at(k, l)];
      d1k += y[l] * (d2kl + 0.5L * t3[at(k, l)] + s4[at(k, l)] / 6);
      gk += y[l] * (0.5L * d2kl + t3[at(k, l)] / 6 + s4[at(k, l)] / 24);
    }
    d1_out[k] = std::move(d1k);
    g_out += y[k] * gk;
  }
}

// ---------------------------------------------------------------------------
// Curvature

namespace {

Tensor christoffel(const MatR& g_inv, const std::vector<MatR>& d1) {
  const int n = static_cast<int>(g_inv.rows());
  Tensor gamma(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Real s = 0;
        for (int l = 0; l < n; ++l) s += g_inv(k, l) * (d1[i](j, l) + d1[j](i, l) - d1[l](i, j));
        gamma(k, i, j) = 0.5L * s;
        gamma(k, j, i) = 0.5L * s;
      }
  return gamma;
}

// dgamma(c, a, i, j) = d_c Gamma^a_{ij}
Tensor christoffel_derivative(const MatR& g_inv, const std::vector<MatR>& d1,
                              const std::vector<MatR>& d2) {
  const int n = static_cast<int>(g_inv.rows());
  Tensor out(n, 4);
  for (int c = 0; c < n; ++c) {
    const MatR dginv = -g_inv * d1[c] * g_inv;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        VecR lower(n), dlower(n);
        for (int l = 0; l < n; ++l) {
          lower[l] = d1[i](j, l) + d1[j](i, l) - d1[l](i, j);
          dlower[l] = d2[c * n + i](j, l) + d2[c * n + j](i, l) - d2[c * n + l](i, j);
        }
        for (int a = 0; a < n; ++a) {
          Real s = 0;
          for (int l = 0; l < n; ++l) s += dginv(a, l) * lower[l] + g_inv(a, l) * dlower[l];
          out(c, a, i, j) = 0.5L * s;
          out(c, a, j, i) = 0.5L * s;
        }
      }
  }
  return out;
}

// Raise every index of a rank-4 tensor.
Tensor raise_all(const Tensor& t, const MatR& g_inv) {
  const int n = t.dim();
  Tensor cur = t;
  for (int slot = 0; slot < 4; ++slot) {
    Tensor next(n, 4);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            std::array<int, 4> idx = {a, b, c, d};
            Real s = 0;
            for (int e = 0; e < n; ++e) {
              std::array<int, 4> src = idx;
              src[slot] = e;
              s += g_inv(idx[slot], e) * cur(src[0], src[1], src[2], src[3]);
            }
            next(a, b, c, d) = s;
          }
    cur = std::move(next);
  }
  return cur;
}

Real contract4(const Tensor& lower, const Tensor& upper) {
  const int n = lower.dim();
  Real s = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) s += lower(a, b, c, d) * upper(a, b, c, d);
  return s;
}

// Scalar curvature only, for the outer stencil.
Real scalar_j(const MatR& g, const std::vector<MatR>& d1, const std::vector<MatR>& d2) {
  const int n = static_cast<int>(g.rows());
  const MatR g_inv = g.inverse();
  const Tensor gamma = christoffel(g_inv, d1);
  const Tensor dgamma = christoffel_derivative(g_inv, d1, d2);
  Real scal = 0;
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      Real ric = 0;
      for (int a = 0; a < n; ++a) {
        ric += dgamma(a, a, d, b) - dgamma(d, a, a, b);
        for (int e = 0; e < n; ++e) ric += gamma(a, a, e) * gamma(e, d, b) - gamma(a, d, e) * gamma(e, a, b);
      }
      scal += g_inv(b, d) * ric;
    }
  return scal / (2 * (n - 1));
}

}  // namespace

CurvatureBundle curvature_from_2jet(const MatR& g, const std::vector<MatR>& d1,
                                    const std::vector<MatR>& d2) {
  const int n = static_cast<int>(g.rows());
  if (n < 3) throw UnsupportedError("curvature requires dimension >= 3");
  if (static_cast<int>(d1.size()) != n || static_cast<int>(d2.size()) != n * n) {
    throw std::invalid_argument("curvature needs first and second metric derivatives");
  }

  CurvatureBundle cb;
  cb.dim = n;
  cb.g = g;
  cb.g_inv = g.inverse();
  cb.gamma = christoffel(cb.g_inv, d1);
  const Tensor dgamma = christoffel_derivative(cb.g_inv, d1, d2);

  // R^a_{bcd}
  Tensor up(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Real s = dgamma(c, a, d, b) - dgamma(d, a, c, b);
          for (int e = 0; e < n; ++e) {
            s += cb.gamma(a, c, e) * cb.gamma(e, d, b) - cb.gamma(a, d, e) * cb.gamma(e, c, b);
          }
          up(a, b, c, d) = s;
        }
  cb.riem = Tensor(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Real s = 0;
          for (int e = 0; e < n; ++e) s += g(a, e) * up(e, b, c, d);
          cb.riem(a, b, c, d) = s;
        }

  cb.ric = MatR::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d)
      for (int a = 0; a < n; ++a) cb.ric(b, d) += up(a, b, a, d);
  cb.scal = (cb.g_inv.array() * cb.ric.array()).sum();
  cb.j = cb.scal / (2 * (n - 1));
  cb.schouten = (cb.ric - cb.j * g) / (n - 2);
  cb.e = cb.schouten - (cb.j / n) * g;
  const MatR p_mixed = cb.g_inv * cb.schouten;
  cb.p_norm2 = (p_mixed * p_mixed).trace();
  const MatR e_mixed = cb.g_inv * cb.e;
  cb.e_norm2 = (e_mixed * e_mixed).trace();
  cb.sigma2 = 0.5L * (cb.j * cb.j - cb.p_norm2);

  const MatR& P = cb.schouten;
  cb.weyl = Tensor(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cb.weyl(a, b, c, d) = cb.riem(a, b, c, d) -
                                (P(a, c) * g(b, d) + P(b, d) * g(a, c) - P(a, d) * g(b, c) -
                                 P(b, c) * g(a, d));
        }
  cb.weyl_norm2 = contract4(cb.weyl, raise_all(cb.weyl, cb.g_inv));
  return cb;
}

CurvatureBundle curvature(const MetricJet& jet, Real a, Real b, const StencilOptions& opts) {
  if (jet.dim < 3) throw UnsupportedError("curvature requires dimension >= 3");
  if (jet.order < 4) throw std::invalid_argument("full curvature needs an order-4 jet");
  const int n = jet.dim;
  CurvatureBundle cb = curvature_from_2jet(jet.g, jet.d1, jet.d2);

  // J on the outer stencil of the jet's quartic Taylor metric.
  MatR gy;
  std::vector<MatR> d1y, d2y;
  auto j_at = [&](const VecR& y) {
    jet.taylor_metric(y, gy, d1y, d2y);
    return scalar_j(gy, d1y, d2y);
  };

  struct JDerivs {
    VecR grad;
    MatR hess;
    JDerivs operator*(Real s) const { return {grad * s, hess * s}; }
    JDerivs operator-(const JDerivs& o) const { return {grad - o.grad, hess - o.hess}; }
    JDerivs operator/(Real s) const { return {grad / s, hess / s}; }
  };
  const Real j0 = cb.j;
  JDerivs d = richardson<JDerivs>(
      [&](int k) {
        const Real h = opts.taylor_step * std::ldexp(Real(1), k);
        JDerivs r{VecR::Zero(n), MatR::Zero(n, n)};
        std::vector<Real> plus(n), minus(n);
        for (int i = 0; i < n; ++i) {
          VecR y = VecR::Zero(n);
          y[i] = h;
          plus[i] = j_at(y);
          y[i] = -h;
          minus[i] = j_at(y);
          r.grad[i] = (plus[i] - minus[i]) / (2 * h);
          r.hess(i, i) = (plus[i] - 2 * j0 + minus[i]) / (h * h);
        }
        for (int i = 0; i < n; ++i)
          for (int l = i + 1; l < n; ++l) {
            VecR y = VecR::Zero(n);
            y[i] = h;
            y[l] = h;
            const Real pp = j_at(y);
            y[l] = -h;
            const Real pm = j_at(y);
            y[i] = -h;
            const Real mm = j_at(y);
            y[l] = h;
            const Real mp = j_at(y);
            r.hess(i, l) = r.hess(l, i) = (pp - pm - mp + mm) / (4 * h * h);
          }
        return r;
      },
      opts.taylor_levels);

  cb.grad_j = d.grad;
  cb.hess_j = d.hess;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) cb.hess_j(k, l) -= cb.gamma(m, k, l) * d.grad[m];
  cb.lap_j = (cb.g_inv.array() * cb.hess_j.array()).sum();
  cb.q = -cb.lap_j - 2 * cb.p_norm2 + (static_cast<Real>(n) / 2) * cb.j * cb.j;
  cb.i_ab = cb.q + a * cb.sigma2 + b * cb.weyl_norm2;
  return cb;
}

CurvatureBundle pointwise_curvature(const ChartMetric& metric, const VecR& point,
                                    const StencilOptions& opts) {
  const MetricJet jet = build_jet(metric, point, opts, 2);
  return curvature_from_2jet(jet.g, jet.d1, jet.d2);
}

CurvatureBundle full_curvature(const ChartMetric& metric, const VecR& point, Real a, Real b,
                               const StencilOptions& opts) {
  return curvature(build_jet(metric, point, opts, 4), a, b, opts);
}

// ---------------------------------------------------------------------------
// Covariant differencing of fields

namespace {

void require_inside(const ChartMetric& metric, const VecR& point, Real radius) {
  if (!metric.contains(point, radius)) {
    std::ostringstream os;
    os << "stencil of radius " << static_cast<double>(radius) << " around "
       << point.transpose().cast<double>() << " leaves the chart domain";
    throw DomainError(os.str());
  }
}

}  // namespace

VecR divergence_sym2(const Sym2Field& field, const ChartMetric& metric, const VecR& point,
                     const StencilOptions& opts) {
  const int n = metric.dim;
  require_inside(metric, point, opts.step * std::ldexp(Real(1), opts.richardson_levels - 1));
  const MetricJet jet = build_jet(metric, point, opts, 1);
  const MatR g_inv = jet.g.inverse();
  const Tensor gamma = christoffel(g_inv, jet.d1);
  const MatR t = field(point);

  std::vector<MatR> dt(n);
  for (int k = 0; k < n; ++k) {
    dt[k] = richardson<MatR>(
        [&](int lvl) {
          const Real h = opts.step * std::ldexp(Real(1), lvl);
          VecR xp = point, xm = point;
          xp[k] += h;
          xm[k] -= h;
          return MatR((field(xp) - field(xm)) / (2 * h));
        },
        opts.richardson_levels);
  }

  VecR div = VecR::Zero(n);
  for (int j = 0; j < n; ++j) {
    Real s = 0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        Real cov = dt[k](i, j);
        for (int l = 0; l < n; ++l) cov -= gamma(l, k, i) * t(l, j) + gamma(l, k, j) * t(i, l);
        s += g_inv(i, k) * cov;
      }
    div[j] = s;
  }
  return div;
}

VecR fd_gradient(const ScalarField& scalar, const VecR& point, Real step, int levels) {
  const int n = static_cast<int>(point.size());
  VecR grad(n);
  for (int k = 0; k < n; ++k) {
    grad[k] = richardson<Real>(
        [&](int lvl) {
          const Real h = step * std::ldexp(Real(1), lvl);
          VecR xp = point, xm = point;
          xp[k] += h;
          xm[k] -= h;
          return (scalar(xp) - scalar(xm)) / (2 * h);
        },
        levels);
  }
  return grad;
}

HessianResult hessian_laplacian(const ScalarField& scalar, const ChartMetric& metric,
                                const VecR& point, const StencilOptions& opts) {
  const int n = metric.dim;
  require_inside(metric, point, opts.step * std::ldexp(Real(1), opts.richardson_levels - 1));
  const MetricJet jet = build_jet(metric, point, opts, 1);
  const MatR g_inv = jet.g.inverse();
  const Tensor gamma = christoffel(g_inv, jet.d1);
  const Real u0 = scalar(point);

  struct Derivs {
    VecR grad;
    MatR hess;
    Derivs operator*(Real s) const { return {grad * s, hess * s}; }
    Derivs operator-(const Derivs& o) const { return {grad - o.grad, hess - o.hess}; }
    Derivs operator/(Real s) const { return {grad / s, hess / s}; }
  };
  Derivs d = richardson<Derivs>(
      [&](int lvl) {
        const Real h = opts.step * std::ldexp(Real(1), lvl);
        Derivs r{VecR::Zero(n), MatR::Zero(n, n)};
        auto at = [&](int i, Real si, int l, Real sl) {
          VecR x = point;
          x[i] += si * h;
          if (l >= 0) x[l] += sl * h;
          return scalar(x);
        };
        for (int i = 0; i < n; ++i) {
          const Real p = at(i, 1, -1, 0), m = at(i, -1, -1, 0);
          r.grad[i] = (p - m) / (2 * h);
          r.hess(i, i) = (p - 2 * u0 + m) / (h * h);
          for (int l = i + 1; l < n; ++l) {
            r.hess(i, l) = r.hess(l, i) =
                (at(i, 1, l, 1) - at(i, 1, l, -1) - at(i, -1, l, 1) + at(i, -1, l, -1)) / (4 * h * h);
          }
        }
        return r;
      },
      opts.richardson_levels);

  HessianResult out;
  out.grad = d.grad;
  out.hess = d.hess;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) out.hess(k, l) -= gamma(m, k, l) * d.grad[m];
  out.lap = (g_inv.array() * out.hess.array()).sum();
  out.grad_norm2 = d.grad.dot(g_inv * d.grad);
  return out;
}

// ---------------------------------------------------------------------------
// Test metrics

ChartMetric euclidean_metric(int dim, Real half_width) {
  ChartMetric m;
  m.dim = dim;
  m.eval = [dim](const VecR&) { return MatR::Identity(dim, dim); };
  m.lower = VecR::Constant(dim, -half_width);
  m.upper = VecR::Constant(dim, half_width);
  return m;
}

namespace {

struct Monomial {
  Real coeff;
  std::vector<int> powers;
};

Real eval_monomials(const std::vector<Monomial>& terms, const VecR& x) {
  Real s = 0;
  for (const Monomial& t : terms) {
    Real v = t.coeff;
    for (std::size_t i = 0; i < t.powers.size(); ++i)
      for (int p = 0; p < t.powers[i]; ++p) v *= x[static_cast<Eigen::Index>(i)];
    s += v;
  }
  return s;
}

}  // namespace

ChartMetric perturbed_metric(int dim, std::uint64_t seed, Real amplitude) {
  constexpr int kTermsPerEntry = 6;
  constexpr int kMaxDegree = 4;
  Rng rng(seed);
  std::vector<std::vector<Monomial>> entries;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      std::vector<Monomial> terms;
      Real total = 0;
      for (int t = 0; t < kTermsPerEntry; ++t) {
        Monomial m{static_cast<Real>(rng.uniform(-1, 1)), std::vector<int>(dim, 0)};
        const int degree = static_cast<int>(rng.below(kMaxDegree + 1));
        for (int p = 0; p < degree; ++p) ++m.powers[rng.below(static_cast<std::uint64_t>(dim))];
        total += std::abs(m.coeff);
        terms.push_back(std::move(m));
      }
      // |x_i| <= 1 on the box, so sum |coeff| bounds the entry.
      for (Monomial& m : terms) m.coeff *= amplitude / total;
      entries.push_back(std::move(terms));
    }

  ChartMetric m;
  m.dim = dim;
  m.eval = [dim, entries](const VecR& x) {
    MatR g = MatR::Identity(dim, dim);
    std::size_t e = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        const Real v = eval_monomials(entries[e++], x);
        g(i, j) += v;
        if (i != j) g(j, i) += v;
      }
    return g;
  };
  m.lower = VecR::Constant(dim, -1);
  m.upper = VecR::Constant(dim, 1);
  return m;
}

ScalarField random_polynomial(int dim, std::uint64_t seed, int degree, Real amplitude) {
  constexpr int kTerms = 8;
  Rng rng(seed, 0x9017);
  std::vector<Monomial> terms;
  Real total = 0;
  for (int t = 0; t < kTerms; ++t) {
    Monomial m{static_cast<Real>(rng.uniform(-1, 1)), std::vector<int>(dim, 0)};
    const int d = static_cast<int>(rng.below(static_cast<std::uint64_t>(degree) + 1));
    for (int p = 0; p < d; ++p) ++m.powers[rng.below(static_cast<std::uint64_t>(dim))];
    total += std::abs(m.coeff);
    terms.push_back(std::move(m));
  }
  for (Monomial& m : terms) m.coeff *= amplitude / total;
  return [terms](const VecR& x) { return eval_monomials(terms, x); };
}

VecR random_point(int dim, std::uint64_t seed, Real spread) {
  Rng rng(seed, 0x5EED);
  VecR x(dim);
  for (int i = 0; i < dim; ++i) x[i] = static_cast<Real>(rng.uniform(-1, 1)) * spread;
  return x;
}

Real BundleInvariants::max_relative() const {
  const Real m = std::max({trace_p, trace_e, riem_antisym, riem_pair, bianchi, weyl_trace});
  return m / std::max<Real>(1, riem_scale);
}

BundleInvariants bundle_invariants(const CurvatureBundle& cb) {
  const int n = cb.dim;
  BundleInvariants r;
  r.trace_p = std::abs((cb.g_inv * cb.schouten).trace() - cb.j);
  r.trace_e = std::abs((cb.g_inv * cb.e).trace());
  r.riem_scale = cb.riem.max_abs();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const Real x = cb.riem(a, b, c, d);
          r.riem_antisym = std::max({r.riem_antisym, std::abs(x + cb.riem(b, a, c, d)), std::abs(x + cb.riem(a, b, d, c))});
          r.riem_pair = std::max(r.riem_pair, std::abs(x - cb.riem(c, d, a, b)));
          r.bianchi = std::max(r.bianchi, std::abs(x + cb.riem(a, c, d, b) + cb.riem(a, d, b, c)));
        }
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      Real t = 0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) t += cb.g_inv(a, c) * cb.weyl(a, b, c, d);
      r.weyl_trace = std::max(r.weyl_trace, std::abs(t));
    }
  return r;
}

}  // namespace curvlab
