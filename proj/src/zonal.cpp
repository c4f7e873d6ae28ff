#include "curvlab/zonal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "curvlab/errors.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

namespace {

// Recurrence coefficient beta_k of the monic orthogonal polynomials for
// (1-x^2)^{(m-2)/2}; k >= 1.
double gegenbauer_beta(int m, int k) {
  const double kk = k;
  return kk * (kk + m - 2) / ((2 * kk + m - 1) * (2 * kk + m - 3));
}

// Orthonormal p_0..p_{count-1} and derivatives at x.
template <typename T>
void orthonormal_values(int m, int count, T x, T* p, T* dp, T* ddp) {
  const T p0 = 1 / std::sqrt(static_cast<T>(gegenbauer_mass(m)));
  p[0] = p0;
  if (dp) dp[0] = 0;
  if (ddp) ddp[0] = 0;
  if (count == 1) return;
  // x p_k = b_{k+1} p_{k+1} + b_k p_{k-1}
  T b1 = std::sqrt(static_cast<T>(gegenbauer_beta(m, 1)));
  p[1] = x * p0 / b1;
  if (dp) dp[1] = p0 / b1;
  if (ddp) ddp[1] = 0;
  for (int k = 1; k + 1 < count; ++k) {
    const T bk = std::sqrt(static_cast<T>(gegenbauer_beta(m, k)));
    const T bk1 = std::sqrt(static_cast<T>(gegenbauer_beta(m, k + 1)));
    p[k + 1] = (x * p[k] - bk * p[k - 1]) / bk1;
    if (dp) dp[k + 1] = (x * dp[k] + p[k] - bk * dp[k - 1]) / bk1;
    if (ddp) ddp[k + 1] = (x * ddp[k] + 2 * dp[k] - bk * ddp[k - 1]) / bk1;
  }
}

}  // namespace

double gegenbauer_mass(int m) {
  return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * m) / std::tgamma(0.5 * (m + 1));
}

void gauss_gegenbauer_ld(int m, int count, std::vector<long double>& nodes,
                         std::vector<long double>& weights) {
  if (m < 2) throw std::invalid_argument("gauss_gegenbauer: m must be >= 2");
  if (count < 1) throw std::invalid_argument("gauss_gegenbauer: need at least one node");
  // Golub-Welsch for the starting values.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    const double b = std::sqrt(gegenbauer_beta(m, k));
    jacobi(k, k - 1) = jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);
  nodes.resize(static_cast<std::size_t>(count));
  weights.resize(static_cast<std::size_t>(count));
  std::vector<long double> p(static_cast<std::size_t>(count) + 1), dp(p.size());
  for (int i = 0; i < count; ++i) {
    long double x = eig.eigenvalues()[i];
    // Newton on p_count in extended precision.
    for (int it = 0; it < 8; ++it) {
      orthonormal_values<long double>(m, count + 1, x, p.data(), dp.data(), nullptr);
      const long double step = p[count] / dp[count];
      x -= step;
      if (std::abs(step) < 1e-19L) break;
    }
    orthonormal_values<long double>(m, count, x, p.data(), nullptr, nullptr);
    long double s = 0;
    for (int k = 0; k < count; ++k) s += p[k] * p[k];
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 1 / s;
  }
}

GaussRule gauss_gegenbauer(int m, int count) {
  std::vector<long double> x, w;
  gauss_gegenbauer_ld(m, count, x, w);
  return {std::vector<double>(x.begin(), x.end()), std::vector<double>(w.begin(), w.end())};
}

// ---------------------------------------------------------------------------

ZonalGrid::ZonalGrid(const EinsteinModel& model, int nodes) : model_(model), size_(nodes) {
  if (nodes < 4) throw std::invalid_argument("ZonalGrid: need at least 4 nodes");
  const std::size_t n = static_cast<std::size_t>(nodes);
  basis_.assign(n * n, 0);
  basis_d1_.assign(n * n, 0);
  basis_d2_.assign(n * n, 0);
  eigen_.assign(n, 0);

  if (model.kind == ModelKind::torus) {
    if (nodes % 2 != 0) throw std::invalid_argument("ZonalGrid: torus grid needs an even node count");
    zonal_dim_ = 1;
    const double len = model.periods.front();
    mass_factor_ = model.volume / len;
    abscissa_.resize(n);
    weights_.assign(n, static_cast<long double>(len) / nodes);
    exact_nodes_.resize(n);
    for (int i = 0; i < nodes; ++i) {
      exact_nodes_[static_cast<std::size_t>(i)] = static_cast<long double>(len) * i / nodes;
      abscissa_[static_cast<std::size_t>(i)] = static_cast<double>(exact_nodes_[static_cast<std::size_t>(i)]);
    }
    std::vector<long double> p(n), dp(n);
    for (int i = 0; i < nodes; ++i) {
      basis_at(exact_nodes_[static_cast<std::size_t>(i)], p, &dp);
      for (int k = 0; k < nodes; ++k) {
        const std::size_t at = static_cast<std::size_t>(k) * n + static_cast<std::size_t>(i);
        const double freq = 2 * std::numbers::pi * mode_degree(k) / len;
        basis_[at] = p[static_cast<std::size_t>(k)];
        basis_d1_[at] = dp[static_cast<std::size_t>(k)];
        basis_d2_[at] = -freq * freq * basis_[at];
      }
    }
    for (int k = 0; k < nodes; ++k) {
      const double freq = 2 * std::numbers::pi * mode_degree(k) / len;
      eigen_[static_cast<std::size_t>(k)] = freq * freq;
    }
    // The Nyquist cosine has no well-defined derivative on the grid.
    for (int i = 0; i < nodes; ++i) {
      basis_d1_[(n - 1) * n + static_cast<std::size_t>(i)] = 0;
    }
    return;
  }

  zonal_dim_ = model.kind == ModelKind::sphere ? model.dim : 2;
  const double curv = model.kind == ModelKind::sphere ? model.lambda : 3 * model.lambda;
  const double r = 1 / std::sqrt(curv);
  const double extra = model.kind == ModelKind::s2xs2 ? 4 * std::numbers::pi / curv : 1.0;
  mass_factor_ = extra * unit_sphere_volume(zonal_dim_ - 1) * std::pow(r, zonal_dim_);

  gauss_gegenbauer_ld(zonal_dim_, nodes, exact_nodes_, weights_);
  abscissa_.assign(exact_nodes_.begin(), exact_nodes_.end());
  std::vector<long double> p(n), dp(n), ddp(n);
  for (int i = 0; i < nodes; ++i) {
    orthonormal_values<long double>(zonal_dim_, nodes, exact_nodes_[static_cast<std::size_t>(i)],
                                    p.data(), dp.data(), ddp.data());
    for (int k = 0; k < nodes; ++k) {
      const std::size_t at = static_cast<std::size_t>(k) * n + static_cast<std::size_t>(i);
      basis_[at] = p[static_cast<std::size_t>(k)];
      basis_d1_[at] = dp[static_cast<std::size_t>(k)];
      basis_d2_[at] = ddp[static_cast<std::size_t>(k)];
    }
  }
  for (int k = 0; k < nodes; ++k) {
    eigen_[static_cast<std::size_t>(k)] = static_cast<double>(k) * (k + zonal_dim_ - 1) * curv;
  }
}

double ZonalGrid::theta(int i) const {
  if (model_.kind == ModelKind::torus) throw UnsupportedError("torus grid has no polar angle");
  return std::acos(abscissa_.at(static_cast<std::size_t>(i)));
}

double ZonalGrid::integrate(const std::vector<double>& values) const {
  if (static_cast<int>(values.size()) != size_) throw std::invalid_argument("integrate: size mismatch");
  long double s = 0;
  for (int i = 0; i < size_; ++i) s += weights_[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(i)];
  return static_cast<double>(s * mass_factor_);
}

double ZonalGrid::volume() const { return model_.volume; }

int ZonalGrid::mode_degree(int k) const {
  if (model_.kind == ModelKind::torus) return (k + 1) / 2;
  return k;
}

double ZonalGrid::laplace_eigenvalue(int k) const { return eigen_.at(static_cast<std::size_t>(k)); }

std::vector<double> ZonalGrid::to_modes(const std::vector<double>& values) const {
  if (static_cast<int>(values.size()) != size_) throw std::invalid_argument("to_modes: size mismatch");
  const std::size_t n = static_cast<std::size_t>(size_);
  std::vector<long double> wf(n);
  for (std::size_t i = 0; i < n; ++i) wf[i] = weights_[i] * values[i];
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double s = 0;
    const long double* row = &basis_[k * n];
    for (std::size_t i = 0; i < n; ++i) s += row[i] * wf[i];
    out[k] = static_cast<double>(s);
  }
  return out;
}

std::vector<double> ZonalGrid::from_modes(const std::vector<double>& modes) const {
  const std::size_t n = static_cast<std::size_t>(size_);
  std::vector<long double> acc(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (modes[k] == 0) continue;
    const long double* row = &basis_[k * n];
    for (std::size_t i = 0; i < n; ++i) acc[i] += modes[k] * row[i];
  }
  return std::vector<double>(acc.begin(), acc.end());
}

void ZonalGrid::basis_at(long double x, std::vector<long double>& p, std::vector<long double>* dp,
                         int count) const {
  if (count < 0 || count > size_) count = size_;
  const std::size_t n = static_cast<std::size_t>(count);
  p.resize(n);
  if (dp) dp->resize(n);
  if (model_.kind == ModelKind::torus) {
    const long double len = model_.periods.front();
    const long double w = 2 * std::numbers::pi_v<long double> / len;
    const long double c0 = 1 / std::sqrt(len), c1 = std::sqrt(2 / len);
    for (int k = 0; k < count; ++k) {
      const int j = mode_degree(k);
      long double v, d;
      if (k == 0) {
        v = c0;
        d = 0;
      } else if (k == size_ - 1) {
        v = c0 * std::cos(w * j * x);
        d = -c0 * w * j * std::sin(w * j * x);
      } else if (k % 2 == 1) {
        v = c1 * std::cos(w * j * x);
        d = -c1 * w * j * std::sin(w * j * x);
      } else {
        v = c1 * std::sin(w * j * x);
        d = c1 * w * j * std::cos(w * j * x);
      }
      p[static_cast<std::size_t>(k)] = v;
      if (dp) (*dp)[static_cast<std::size_t>(k)] = d;
    }
    return;
  }
  if (count == 0) return;
  orthonormal_values<long double>(zonal_dim_, count, x, p.data(), dp ? dp->data() : nullptr, nullptr);
}

GridPtr make_grid(const EinsteinModel& model, int nodes) {
  return std::make_shared<const ZonalGrid>(model, nodes);
}

// ---------------------------------------------------------------------------

ZonalField::ZonalField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid->size()) throw std::invalid_argument("ZonalField: size mismatch");
}

ZonalField ZonalField::constant(GridPtr g, double c) {
  const int n = g->size();
  return ZonalField(std::move(g), std::vector<double>(static_cast<std::size_t>(n), c));
}

ZonalField ZonalField::sample(GridPtr g, const std::function<double(double)>& f) {
  std::vector<double> v;
  v.reserve(g->abscissa().size());
  for (double x : g->abscissa()) v.push_back(f(x));
  return ZonalField(std::move(g), std::move(v));
}

double ZonalField::min() const { return *std::min_element(values.begin(), values.end()); }
double ZonalField::max() const { return *std::max_element(values.begin(), values.end()); }

long double ZonalField::evaluate(long double x) const {
  const std::vector<double> c = modes();
  std::vector<long double> p;
  grid->basis_at(x, p);
  long double s = 0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * p[k];
  return s;
}

std::function<long double(long double)> ZonalField::interpolant() const {
  std::vector<double> c = modes();
  long double norm2 = 0;
  for (double v : c) norm2 += static_cast<long double>(v) * v;
  const double cut = 1e-15 * static_cast<double>(std::sqrt(norm2));
  std::size_t keep = 0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (std::abs(c[k]) >= cut) keep = k + 1;
  c.resize(keep);
  auto coeffs = std::make_shared<const std::vector<double>>(std::move(c));
  GridPtr g = grid;
  return [coeffs, g](long double x) {
    std::vector<long double> p;
    g->basis_at(x, p, nullptr, static_cast<int>(coeffs->size()));
    long double s = 0;
    for (std::size_t k = 0; k < coeffs->size(); ++k) s += (*coeffs)[k] * p[k];
    return s;
  };
}

double ZonalField::tail_ratio() const {
  const std::vector<double> c = modes();
  const std::size_t start = c.size() - c.size() / 4;
  long double all = 0, tail = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    all += static_cast<long double>(c[k]) * c[k];
    if (k >= start) tail += static_cast<long double>(c[k]) * c[k];
  }
  if (all == 0) return 0;
  return static_cast<double>(std::sqrt(tail / all));
}

ZonalField ZonalField::map(const std::function<double(double)>& f) const {
  std::vector<double> v(values.size());
  std::transform(values.begin(), values.end(), v.begin(), f);
  return ZonalField(grid, std::move(v));
}

namespace {

void require_same_grid(const ZonalField& a, const ZonalField& b) {
  if (a.grid != b.grid) throw std::invalid_argument("zonal fields live on different grids");
}

template <typename Op>
ZonalField combine(const ZonalField& a, const ZonalField& b, Op op) {
  require_same_grid(a, b);
  std::vector<double> v(a.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a.values[i], b.values[i]);
  return ZonalField(a.grid, std::move(v));
}

}  // namespace

ZonalField operator+(const ZonalField& a, const ZonalField& b) { return combine(a, b, std::plus<>()); }
ZonalField operator-(const ZonalField& a, const ZonalField& b) { return combine(a, b, std::minus<>()); }
ZonalField operator*(const ZonalField& a, const ZonalField& b) { return combine(a, b, std::multiplies<>()); }
ZonalField operator*(double s, const ZonalField& a) {
  return a.map([s](double v) { return s * v; });
}

// ---------------------------------------------------------------------------

namespace {

// Drop round-off modes before differentiating; otherwise k^2-amplified noise
// in the highest modes dominates the pointwise Laplacian near the poles.
std::vector<double> chopped_modes(const ZonalField& f) {
  std::vector<double> c = f.grid->to_modes(f.values);
  long double norm2 = 0;
  for (double v : c) norm2 += static_cast<long double>(v) * v;
  const double cut = 1e-15 * static_cast<double>(std::sqrt(norm2));
  for (double& v : c)
    if (std::abs(v) < cut) v = 0;
  return c;
}

}  // namespace

ZonalCalculus zonal_calculus(const ZonalField& f, bool strict) {
  const ZonalGrid& g = *f.grid;
  if (strict) {
    const double tail = f.tail_ratio();
    if (tail > 1e-10) {
      std::ostringstream os;
      os << "zonal field under-resolved: spectral tail ratio " << tail << " with " << g.size() << " nodes";
      throw ResolutionError(os.str());
    }
  }
  const std::size_t n = static_cast<std::size_t>(g.size());
  const std::vector<double> c = chopped_modes(f);
  std::vector<long double> d1(n, 0), d2(n, 0), lap(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (c[k] == 0) continue;
    const long double ck = c[k];
    const long double ev = g.laplace_eigenvalue(static_cast<int>(k));
    const long double* b0 = &g.basis()[k * n];
    const long double* b1 = &g.basis_d1()[k * n];
    const long double* b2 = &g.basis_d2()[k * n];
    for (std::size_t i = 0; i < n; ++i) {
      d1[i] += ck * b1[i];
      d2[i] += ck * b2[i];
      lap[i] -= ck * ev * b0[i];
    }
  }

  ZonalCalculus out;
  out.ds.resize(n);
  out.grad_norm2.resize(n);
  out.hess_rad.resize(n);
  out.hess_tan.resize(n);
  out.lap.resize(n);
  const EinsteinModel& m = g.model();
  if (m.kind == ModelKind::torus) {
    for (std::size_t i = 0; i < n; ++i) {
      out.ds[i] = static_cast<double>(d1[i]);
      out.grad_norm2[i] = static_cast<double>(d1[i] * d1[i]);
      out.hess_rad[i] = static_cast<double>(d2[i]);
      out.hess_tan[i] = 0;
      out.lap[i] = static_cast<double>(lap[i]);
    }
    return out;
  }
  const long double curv = m.kind == ModelKind::sphere ? m.lambda : 3.0L * m.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    const long double x = g.exact_abscissa()[i];
    const long double s2 = 1 - x * x;
    out.ds[i] = static_cast<double>(-std::sqrt(curv * s2) * d1[i]);
    out.grad_norm2[i] = static_cast<double>(curv * s2 * d1[i] * d1[i]);
    out.hess_rad[i] = static_cast<double>(curv * (s2 * d2[i] - x * d1[i]));
    out.hess_tan[i] = static_cast<double>(-curv * x * d1[i]);
    out.lap[i] = static_cast<double>(lap[i]);
  }
  return out;
}

ZonalField spectral_apply(const ZonalField& f, const std::function<double(double)>& symbol) {
  const ZonalGrid& g = *f.grid;
  std::vector<double> c = chopped_modes(f);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= symbol(g.laplace_eigenvalue(static_cast<int>(k)));
  return ZonalField(f.grid, g.from_modes(c));
}

ZonalField laplacian(const ZonalField& f) {
  return spectral_apply(f, [](double ev) { return -ev; });
}

double pairing(const ZonalField& f, const ZonalField& g) { return (f * g).integrate(); }

// ---------------------------------------------------------------------------

ZonalField random_zonal(GridPtr grid, int degree, std::uint64_t seed, double amplitude) {
  if (degree < 0) throw std::invalid_argument("random_zonal: negative degree");
  Rng rng(seed);
  std::vector<double> cos_c(static_cast<std::size_t>(degree) + 1), sin_c(cos_c.size());
  double total = 0;
  for (int k = 0; k <= degree; ++k) {
    cos_c[static_cast<std::size_t>(k)] = rng.uniform(-1, 1);
    sin_c[static_cast<std::size_t>(k)] = k == 0 ? 0 : rng.uniform(-1, 1);
    total += std::abs(cos_c[static_cast<std::size_t>(k)]) + std::abs(sin_c[static_cast<std::size_t>(k)]);
  }
  const double scale = total > 0 ? amplitude / total : 0;
  const EinsteinModel& m = grid->model();
  if (m.kind == ModelKind::torus) {
    const double w = 2 * std::numbers::pi / m.periods.front();
    return ZonalField::sample(grid, [&](double s) {
      double v = 0;
      for (int k = 0; k <= degree; ++k)
        v += cos_c[static_cast<std::size_t>(k)] * std::cos(w * k * s) + sin_c[static_cast<std::size_t>(k)] * std::sin(w * k * s);
      return scale * v;
    });
  }
  // Sphere kinds ignore the sine draws; rescale so sum |c_k| = amplitude.
  double l1 = 0;
  for (double c : cos_c) l1 += std::abs(c);
  const double s = l1 > 0 ? amplitude / l1 : 0;
  return ZonalField::sample(grid, [&](double x) {
    double v = 0;
    for (int k = degree; k >= 0; --k) v = v * x + cos_c[static_cast<std::size_t>(k)];
    return s * v;
  });
}

ZonalField random_positive(GridPtr grid, int degree, std::uint64_t seed, double amplitude) {
  if (!(amplitude >= 0 && amplitude < 1)) throw std::invalid_argument("random_positive: amplitude must lie in [0, 1)");
  Rng rng(seed, 0xC0FFEE);
  const double scale = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));
  const ZonalField r = random_zonal(grid, degree, seed, amplitude);
  return r.map([scale](double v) { return scale * (1 + v); });
}

// ---------------------------------------------------------------------------

void write_csv(std::ostream& out, const ZonalField& f) {
  const ZonalGrid& g = *f.grid;
  const bool torus = g.model().kind == ModelKind::torus;
  out << (torus ? "s,value\n" : "theta,value\n");
  out.precision(17);
  for (int i = 0; i < g.size(); ++i) {
    const double a = torus ? g.abscissa()[static_cast<std::size_t>(i)] : g.theta(i);
    out << a << ',' << f.values[static_cast<std::size_t>(i)] << '\n';
  }
}

ZonalField read_csv(std::istream& in, GridPtr grid) {
  const bool torus = grid->model().kind == ModelKind::torus;
  std::string line;
  std::vector<double> xs, vs;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.find_first_of("abcdefghijklmnopqrstuvwxyz") != std::string::npos) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("zonal csv: expected two columns: " + line);
    const double a = std::stod(line.substr(0, comma));
    xs.push_back(torus ? a : std::cos(a));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.empty()) throw std::invalid_argument("zonal csv: no data rows");
  const int rows = static_cast<int>(xs.size());
  const int modes = std::min(rows, grid->size());
  Eigen::MatrixXd a(rows, modes);
  Eigen::VectorXd b(rows);
  std::vector<long double> p;
  for (int r = 0; r < rows; ++r) {
    grid->basis_at(xs[static_cast<std::size_t>(r)], p);
    for (int k = 0; k < modes; ++k) a(r, k) = static_cast<double>(p[static_cast<std::size_t>(k)]);
    b[r] = vs[static_cast<std::size_t>(r)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  std::vector<double> full(static_cast<std::size_t>(grid->size()), 0);
  for (int k = 0; k < modes; ++k) full[static_cast<std::size_t>(k)] = c[k];
  return ZonalField(grid, grid->from_modes(full));
}

}  // namespace curvlab
