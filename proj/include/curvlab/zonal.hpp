#pragma once

// Rotationally symmetric fields on model geometries.
//
// sphere: functions of x = cos(theta) on S^n(lambda).  Nodes are Gauss points
//   for the weight (1-x^2)^{(n-2)/2}, so sum_i w_i f(x_i) integrates against
//   sin^{n-1}(theta) dtheta exactly for polynomials of degree <= 2N-1.
// s2xs2: functions of cos(theta) on the first S^2 factor only.
// torus: functions of the first coordinate s in [0, L_1), Fourier nodes.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "curvlab/model_geometries.hpp"

namespace curvlab {

struct GaussRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;
};

/// Gauss rule on [-1,1] for the weight (1-x^2)^{(m-2)/2}, m >= 2.
GaussRule gauss_gegenbauer(int m, int count);

void gauss_gegenbauer_ld(int m, int count, std::vector<long double>& nodes,
                         std::vector<long double>& weights);

/// Integral of (1-x^2)^{(m-2)/2} over [-1,1].
double gegenbauer_mass(int m);

class ZonalGrid {
 public:
  ZonalGrid(const EinsteinModel& model, int nodes = 256);

  const EinsteinModel& model() const { return model_; }
  int size() const { return size_; }
  /// Dimension of the sphere the field lives on (n, 2, or 1 for the torus).
  int zonal_dim() const { return zonal_dim_; }
  /// Abscissa: cos(theta) (sphere kinds) or s (torus).
  const std::vector<double>& abscissa() const { return abscissa_; }
  /// Polar angle at each node (sphere kinds).
  double theta(int i) const;

  /// Integral over the whole model of a nodal function.
  double integrate(const std::vector<double>& values) const;
  double volume() const;

  /// Orthonormal modal coefficients (discrete transform).
  std::vector<double> to_modes(const std::vector<double>& values) const;
  std::vector<double> from_modes(const std::vector<double>& modes) const;
  /// Polynomial degree (sphere) or frequency (torus) of mode k.
  int mode_degree(int k) const;
  /// Eigenvalue of -Delta on mode k.
  double laplace_eigenvalue(int k) const;

  /// First `count` basis functions (all when negative) and their abscissa
  /// derivatives at x, in long double.
  void basis_at(long double x, std::vector<long double>& p, std::vector<long double>* dp = nullptr,
                int count = -1) const;

  const std::vector<long double>& exact_abscissa() const { return exact_nodes_; }

  // Basis values and derivatives at the nodes, row k = mode.
  const std::vector<long double>& basis() const { return basis_; }
  const std::vector<long double>& basis_d1() const { return basis_d1_; }
  const std::vector<long double>& basis_d2() const { return basis_d2_; }

 private:
  EinsteinModel model_;
  int size_ = 0;
  int zonal_dim_ = 0;
  double mass_factor_ = 1;  // converts quadrature sums to integrals over M
  std::vector<double> abscissa_;
  std::vector<long double> exact_nodes_;
  std::vector<long double> weights_;
  std::vector<long double> basis_, basis_d1_, basis_d2_;
  std::vector<double> eigen_;
};

using GridPtr = std::shared_ptr<const ZonalGrid>;

GridPtr make_grid(const EinsteinModel& model, int nodes = 256);

/// Nodal values on a shared grid.
struct ZonalField {
  GridPtr grid;
  std::vector<double> values;

  ZonalField() = default;
  ZonalField(GridPtr g, std::vector<double> v);

  static ZonalField constant(GridPtr g, double c);
  /// Sample f(x) with x the grid abscissa (cos theta or s).
  static ZonalField sample(GridPtr g, const std::function<double(double)>& f);

  int size() const { return static_cast<int>(values.size()); }
  double integrate() const { return grid->integrate(values); }
  double min() const;
  double max() const;
  std::vector<double> modes() const { return grid->to_modes(values); }

  /// Modal interpolant at an arbitrary abscissa, evaluated in long double.
  long double evaluate(long double x) const;
  std::function<long double(long double)> interpolant() const;

  /// Relative l2 size of the upper quarter of the spectrum.
  double tail_ratio() const;

  ZonalField map(const std::function<double(double)>& f) const;
};

ZonalField operator+(const ZonalField& a, const ZonalField& b);
ZonalField operator-(const ZonalField& a, const ZonalField& b);
ZonalField operator*(const ZonalField& a, const ZonalField& b);
ZonalField operator*(double s, const ZonalField& a);

/// Spectral derivatives of a zonal field, at the nodes.
struct ZonalCalculus {
  std::vector<double> ds;         // derivative along the unit-speed radial direction
  std::vector<double> grad_norm2; // |grad f|^2
  std::vector<double> hess_rad;   // Hessian on the radial unit vector
  std::vector<double> hess_tan;   // Hessian on each tangential unit vector of the zonal sphere
  std::vector<double> lap;        // Laplacian (spectral, exact on the basis)
};

/// Throws ResolutionError when `strict` and the spectral tail exceeds 1e-10.
ZonalCalculus zonal_calculus(const ZonalField& f, bool strict = true);

/// Spectral Laplacian as a field.
ZonalField laplacian(const ZonalField& f);

/// Apply a function of -Delta mode by mode.
ZonalField spectral_apply(const ZonalField& f, const std::function<double(double)>& symbol);

/// Quadrature pairing integral of f g.
double pairing(const ZonalField& f, const ZonalField& g);

// Random fields.  Deterministic in (seed); polynomials in cos theta (sphere
// kinds) or trigonometric polynomials (torus).

/// f = sum_{k<=degree} c_k x^k with sum |c_k| = amplitude (sphere kinds), or
/// sum of cos/sin modes with the same l1 bound (torus).
ZonalField random_zonal(GridPtr grid, int degree, std::uint64_t seed, double amplitude);

/// scale * (1 + r) with r from random_zonal(amplitude < 1), scale in [0.5, 2].
ZonalField random_positive(GridPtr grid, int degree, std::uint64_t seed, double amplitude = 0.6);

// CSV: header "theta,value" (sphere kinds) or "s,value" (torus).
void write_csv(std::ostream& out, const ZonalField& f);
/// Reads (theta|s, value) pairs and resamples on the grid by modal fitting at
/// the given points (least squares in the orthonormal basis up to degree
/// rows-1).
ZonalField read_csv(std::istream& in, GridPtr grid);

}  // namespace curvlab
