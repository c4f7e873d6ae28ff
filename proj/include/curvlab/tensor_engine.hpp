#pragma once

// Coordinate-chart Riemannian tensor calculus.
//
// Metrics are arbitrary callables on an axis-aligned chart box.  All
// derivatives come from central finite differences combined by Richardson
// extrapolation, carried out in extended precision (long double) so that
// nested stencils (curvature differenced again) keep enough digits.
//
// Conventions:
//   R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db}
//               - Gamma^a_{de} Gamma^e_{cb},   Ric_{bd} = R^a_{bad},
//   so the unit sphere has R_{abcd} = g_ac g_bd - g_ad g_bc.
//   P = (Ric - J g)/(n-2), J = R/(2(n-1)), E = P - (J/n) g.
//   Laplacian = trace of the covariant Hessian (nonpositive spectrum).
//   (div T)_j = g^{ik} nabla_k T_{ij}.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace curvlab {

using Real = long double;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense tensor with `rank` indices each ranging over [0, dim).
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int rank);

  int dim() const { return dim_; }
  int rank() const { return rank_; }

  Real& operator()(int a, int b, int c);
  Real operator()(int a, int b, int c) const;
  Real& operator()(int a, int b, int c, int d);
  Real operator()(int a, int b, int c, int d) const;

  /// Sum of squared entries (no index raising).
  Real squared_sum() const;
  Real max_abs() const;

 private:
  int dim_ = 0;
  int rank_ = 0;
  std::vector<Real> data_;
};

struct ChartMetric {
  int dim = 0;
  std::function<MatR(const VecR&)> eval;
  VecR lower;
  VecR upper;

  bool contains(const VecR& x, Real radius = 0) const;
};

/// Finite-difference settings shared by every differencing routine.
struct StencilOptions {
  Real step = 1e-2L;
  int richardson_levels = 3;
  /// Step of the outer stencil that differences curvature of the local
  /// quartic Taylor metric (used for grad J, Hess J, Lap J).
  Real taylor_step = 2e-3L;
  int taylor_levels = 2;
};

/// Metric components and partial derivatives to order 4 at a chart point.
/// Derivative arrays are stored in full and are exactly symmetric in the
/// derivative slots.
struct MetricJet {
  int dim = 0;
  int order = 0;
  VecR point;
  Real step = 0;
  int richardson_levels = 0;
  MatR g;
  std::vector<MatR> d1;  // [k]
  std::vector<MatR> d2;  // [k*n + l]
  std::vector<MatR> d3;  // [(k*n + l)*n + m]
  std::vector<MatR> d4;  // [((k*n + l)*n + m)*n + p]

  const MatR& dg(int k) const { return d1[k]; }
  const MatR& ddg(int k, int l) const { return d2[k * dim + l]; }
  const MatR& dddg(int k, int l, int m) const { return d3[(k * dim + l) * dim + m]; }
  const MatR& ddddg(int k, int l, int m, int p) const {
    return d4[((k * dim + l) * dim + m) * dim + p];
  }

  /// Metric and its first two derivatives at chart offset y from the jet
  /// point, taken from the quartic Taylor polynomial of the jet.
  void taylor_metric(const VecR& y, MatR& g_out, std::vector<MatR>& d1_out,
                     std::vector<MatR>& d2_out) const;
};

/// Every pointwise curvature quantity.  Fields after `sigma2` need an
/// order-4 jet.
struct CurvatureBundle {
  int dim = 0;
  MatR g;
  MatR g_inv;
  Tensor gamma;  // Gamma^k_{ij} stored as (k, i, j)
  Tensor riem;   // R_{abcd}
  MatR ric;
  Real scal = 0;
  Tensor weyl;   // W_{abcd}
  Real weyl_norm2 = 0;
  MatR schouten;
  Real j = 0;
  MatR e;
  Real p_norm2 = 0;
  Real e_norm2 = 0;
  Real sigma2 = 0;
  Real q = 0;
  Real lap_j = 0;
  VecR grad_j;   // dJ (covector)
  MatR hess_j;   // covariant Hessian of J
  std::optional<Real> i_ab;
};

MetricJet build_jet(const ChartMetric& metric, const VecR& point,
                    const StencilOptions& opts = {}, int order = 4);

/// Algebraic curvature from g and its first two derivatives.  Leaves Q,
/// grad J, Hess J and Lap J unset.
CurvatureBundle curvature_from_2jet(const MatR& g, const std::vector<MatR>& d1,
                                    const std::vector<MatR>& d2);

/// Full bundle; I_{a,b} = Q + a sigma2 + b |W|^2.  Requires jet.order == 4.
CurvatureBundle curvature(const MetricJet& jet, Real a = 0, Real b = 0,
                          const StencilOptions& opts = {});

/// Convenience: jet of order 2 and the algebraic bundle at a point.
CurvatureBundle pointwise_curvature(const ChartMetric& metric, const VecR& point,
                                    const StencilOptions& opts = {});

/// Convenience: order-4 jet and the full bundle.
CurvatureBundle full_curvature(const ChartMetric& metric, const VecR& point, Real a = 0,
                               Real b = 0, const StencilOptions& opts = {});

using Sym2Field = std::function<MatR(const VecR&)>;
using ScalarField = std::function<Real(const VecR&)>;

/// (div T)_j = g^{ik}(d_k T_ij - Gamma^l_ki T_lj - Gamma^l_kj T_il).
VecR divergence_sym2(const Sym2Field& field, const ChartMetric& metric, const VecR& point,
                     const StencilOptions& opts = {});

/// Algebraic consistency of a bundle (sup norms; each vanishes identically).
struct BundleInvariants {
  Real trace_p = 0;     // tr P - J
  Real trace_e = 0;     // tr E
  Real riem_antisym = 0;  // R_abcd + R_bacd, R_abcd + R_abdc
  Real riem_pair = 0;   // R_abcd - R_cdab
  Real bianchi = 0;     // R_abcd + R_acdb + R_adbc
  Real weyl_trace = 0;  // g^{ac} W_abcd
  /// Largest of the above, relative to max(1, |Riem|).
  Real max_relative() const;
  Real riem_scale = 0;
};

BundleInvariants bundle_invariants(const CurvatureBundle& cb);

struct HessianResult {
  MatR hess;
  Real lap = 0;
  VecR grad;
  Real grad_norm2 = 0;
};

HessianResult hessian_laplacian(const ScalarField& scalar, const ChartMetric& metric,
                                const VecR& point, const StencilOptions& opts = {});

/// Central-difference gradient of a scalar with Richardson extrapolation.
VecR fd_gradient(const ScalarField& scalar, const VecR& point, Real step, int levels);

// ---------------------------------------------------------------------------
// Test metrics.

ChartMetric euclidean_metric(int dim, Real half_width = 1);

/// g = I + A(x) with A symmetric, each entry a sparse random polynomial of
/// degree <= 4 whose sup over the box [-1,1]^n is at most `amplitude`.
ChartMetric perturbed_metric(int dim, std::uint64_t seed, Real amplitude = 0.1L);

/// Random polynomial scalar of degree <= `degree` with sum |coeff| = amplitude.
ScalarField random_polynomial(int dim, std::uint64_t seed, int degree = 4, Real amplitude = 1);

/// Box-centred random point with coordinates in [-spread, spread].
VecR random_point(int dim, std::uint64_t seed, Real spread = 0.25L);

}  // namespace curvlab
