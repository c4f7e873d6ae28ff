#pragma once

// Closed Einstein model geometries with closed-form invariants, plus chart
// bridges into the tensor engine.

#include <string>
#include <vector>

#include "curvlab/tensor_engine.hpp"

namespace curvlab {

enum class ModelKind { sphere, torus, s2xs2 };

std::string to_string(ModelKind kind);

/// Closed Einstein manifold with Ric = (n-1) lambda g.
struct EinsteinModel {
  ModelKind kind = ModelKind::sphere;
  int dim = 0;
  double lambda = 0;
  double weyl_norm2 = 0;
  double volume = 0;
  std::vector<double> periods;  // torus only

  /// Radius of the round sphere (sphere) or of each 2-sphere factor (s2xs2).
  double radius() const;
  /// e.g. "sphere:n=5,lambda=1"
  std::string describe() const;
};

EinsteinModel round_sphere(int n, double lambda);
EinsteinModel flat_torus(int n, const std::vector<double>& periods);
/// S^2 x S^2 with both factors of Gauss curvature 3 lambda.
EinsteinModel product_s2_s2(double lambda);

/// Parses "sphere:n=5,lambda=1", "torus:n=4,periods=1;2;3;4" (or
/// "torus:n=4,period=6.283"), "s2xs2:lambda=0.333".
EinsteinModel parse_model(const std::string& descriptor);

/// Volume of the unit n-sphere.
double unit_sphere_volume(int n);

struct EinsteinPointwise {
  double j = 0;
  double p_norm2 = 0;
  double sigma2 = 0;
  double q = 0;
  double weyl_norm2 = 0;
};

/// J = n lambda/2, |P|^2 = n lambda^2/4, sigma2 = n(n-1) lambda^2/8,
/// Q = n(n^2-4) lambda^2/8.
EinsteinPointwise einstein_pointwise(const EinsteinModel& model);

/// (Q + a sigma2 + b|W|^2) Vol^{4/n}: infimum (n >= 5) or supremum (n = 3)
/// of the volume-normalised total I_{a,b}-curvature.
double yamabe_constant_iab(const EinsteinModel& model, double a, double b);

/// Gamma((n+4)/2)/Gamma((n-4)/2) lambda^2 Vol^{4/n}, the alternative
/// normalisation of the total-Q infimum; equals (n-4)/2 times
/// yamabe_constant_iab(model, 0, 0).
double q_constant_gamma_form(const EinsteinModel& model);

/// g_ij(x) = 4 r^4 delta_ij / (r^2 + |x|^2)^2 on the box [-4r, 4r]^n.
ChartMetric stereographic_chart(const EinsteinModel& model);

/// Block-diagonal product of two stereographic 2-sphere charts.
ChartMetric product_chart(const EinsteinModel& model);

/// Identity metric on [0, period_i].
ChartMetric torus_chart(const EinsteinModel& model);

}  // namespace curvlab
