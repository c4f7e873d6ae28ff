#include "curvlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "curvlab/rng.hpp"

namespace curvlab {

std::string to_string(Objective o) {
  switch (o) {
    case Objective::total_iab: return "total_iab";
    case Objective::f_gamma: return "f_gamma";
    case Objective::dj: return "dj";
  }
  return "?";
}

Objective parse_objective(const std::string& name) {
  if (name == "total_iab") return Objective::total_iab;
  if (name == "f_gamma") return Objective::f_gamma;
  if (name == "dj") return Objective::dj;
  throw std::invalid_argument("unknown objective '" + name + "' (expected total_iab, f_gamma, dj)");
}

double objective_value(Objective o, const ZonalField& f, const ObjectiveParams& p) {
  switch (o) {
    case Objective::total_iab: return normalized_total_iab(f, p.a, p.b);
    case Objective::f_gamma: return f_gamma(f, p.gamma1, p.gamma2, p.gamma3).value;
    case Objective::dj: return dj_functional(f).value;
  }
  throw std::logic_error("objective_value: bad objective");
}

ZonalField field_from_coefficients(const GridPtr& grid, const std::vector<double>& coefficients) {
  std::vector<double> modes(static_cast<std::size_t>(grid->size()), 0.0);
  std::copy(coefficients.begin(), coefficients.end(), modes.begin());
  return ZonalField(grid, grid->from_modes(modes));
}

namespace {

constexpr double kPositivityFloor = 0.05;  // min u >= floor * mean u

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Every objective is invariant under u -> s u (total_iab) or w -> w + s, so
// the constant mode is pinned and only the higher modes are free.
class Problem {
 public:
  Problem(Objective o, GridPtr grid, const ObjectiveParams& p, bool maximize, int count)
      : o_(o), grid_(std::move(grid)), p_(p), sign_(maximize ? -1 : 1), count_(count) {
    unit0_ = field_from_coefficients(grid_, {1.0}).values.front();
    c0_ = o_ == Objective::total_iab ? 1 / unit0_ : 0;
  }

  int free_count() const { return count_ - 1; }

  std::vector<double> coefficients(const VectorXd& z) const {
    std::vector<double> c(static_cast<std::size_t>(count_), c0_);
    for (int k = 1; k < count_; ++k) c[k] = z[k - 1];
    return c;
  }

  // Signed objective (always minimised); +inf where it cannot be evaluated.
  double eval(const VectorXd& z) const {
    try {
      const double v = sign_ * objective_value(o_, field_from_coefficients(grid_, coefficients(z)), p_);
      return std::isfinite(v) ? v : INFINITY;
    } catch (const std::exception&) {
      return INFINITY;
    }
  }

  // Shrinks the non-constant part toward the constant until min u >= floor.
  void project(VectorXd& z) const {
    if (o_ != Objective::total_iab) return;
    const ZonalField u = field_from_coefficients(grid_, coefficients(z));
    const double lo = u.min();
    if (lo >= kPositivityFloor) return;
    // u = 1 + r with min r = lo - 1 < 0; scale r so that its minimum is floor - 1.
    z *= (1 - kPositivityFloor) / (1 - lo);
  }

  VectorXd gradient(const VectorXd& z, double step) const {
    VectorXd g(z.size());
    for (int k = 0; k < z.size(); ++k) {
      VectorXd zp = z, zm = z;
      const double h = step * std::max(1.0, std::abs(z[k]));
      zp[k] += h;
      zm[k] -= h;
      g[k] = (eval(zp) - eval(zm)) / (2 * h);
    }
    return g;
  }

  double unit0() const { return unit0_; }

 private:
  Objective o_;
  GridPtr grid_;
  ObjectiveParams p_;
  double sign_;
  int count_;
  double unit0_ = 1;
  double c0_ = 0;
};

}  // namespace

OptimizeResult minimize_functional(Objective o, const EinsteinModel& model, const ObjectiveParams& p, int degree,
                                   const OptimizeOptions& opts) {
  if (degree < 1) throw std::invalid_argument("minimize_functional: degree must be >= 1");
  if (model.kind == ModelKind::s2xs2) throw std::invalid_argument("minimize_functional: S2xS2 has no zonal optimizer");
  if (o == Objective::total_iab && model.dim == 4) {
    throw std::invalid_argument("minimize_functional: total_iab needs n != 4 (use f_gamma in dimension 4)");
  }
  if (o == Objective::f_gamma && model.dim != 4) throw std::invalid_argument("minimize_functional: f_gamma needs n = 4");
  if (o == Objective::total_iab && model.dim == 3 && p.b != 0) {
    throw std::invalid_argument("minimize_functional: b must be 0 in dimension 3");
  }

  const GridPtr grid = make_grid(model, opts.nodes);
  const int count = model.kind == ModelKind::torus ? 2 * degree + 1 : degree + 1;
  if (count > grid->size()) throw std::invalid_argument("minimize_functional: degree exceeds grid resolution");

  OptimizeResult res;
  res.objective = o;
  res.maximize = o == Objective::total_iab && model.dim == 3;
  const Problem prob(o, grid, p, res.maximize, count);
  const int m = prob.free_count();

  Rng rng(opts.seed, 0x0971);
  VectorXd z(m);
  for (int k = 0; k < m; ++k) z[k] = rng.uniform(-1, 1) * opts.init_amplitude / prob.unit0() / (k + 1);
  prob.project(z);

  // Inverse Hessian seeded with the Sobolev preconditioner 1/(1 + mu_k)^2.
  MatrixXd h = MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    const double mu = grid->laplace_eigenvalue(k + 1);
    h(k, k) = 1 / ((1 + mu) * (1 + mu));
  }
  const MatrixXd h0 = h;

  double f = prob.eval(z);
  if (!std::isfinite(f)) throw std::runtime_error("minimize_functional: objective undefined at the start point");
  res.trace.push_back(res.maximize ? -f : f);
  VectorXd g = prob.gradient(z, opts.fd_step);
  int quiet = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    VectorXd dir = -h * g;
    double slope = g.dot(dir);
    if (!(slope < 0)) {
      h = h0;
      dir = -h * g;
      slope = g.dot(dir);
    }
    if (!(slope < 0)) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    VectorXd trial;
    double f_new = f;
    for (double alpha = 1; alpha > 1e-12; alpha /= 2) {
      trial = z + alpha * dir;
      prob.project(trial);
      f_new = prob.eval(trial);
      if (f_new <= f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
    }
    res.iterations = it + 1;
    if (!accepted) {
      if (h != h0) {
        h = h0;
        continue;
      }
      // No descent along the preconditioned gradient: stationary to working precision.
      res.converged = true;
      break;
    }
    const VectorXd g_new = prob.gradient(trial, opts.fd_step);
    const VectorXd s = trial - z, y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const VectorXd hy = h * y;
      const double yhy = y.dot(hy);
      h += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) - (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    const double gain = f - f_new;
    z = trial;
    f = f_new;
    g = g_new;
    res.trace.push_back(res.maximize ? -f : f);
    quiet = gain <= opts.rel_tolerance * std::max(1.0, std::abs(f)) ? quiet + 1 : 0;
    if (quiet >= 3) {
      res.converged = true;
      break;
    }
  }
  res.coefficients = prob.coefficients(z);
  res.value = res.maximize ? -f : f;
  return res;
}

}  // namespace curvlab
