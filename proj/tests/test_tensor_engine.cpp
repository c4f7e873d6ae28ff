#include "doctest.h"

#include <cmath>

#include "curvlab/errors.hpp"
#include "curvlab/model_geometries.hpp"
#include "curvlab/tensor_engine.hpp"

using namespace curvlab;

namespace {

ChartMetric diagonal_metric(int n, std::function<Real(const VecR&)> f) {
  ChartMetric m;
  m.dim = n;
  m.lower = VecR::Constant(n, -1);
  m.upper = VecR::Constant(n, 1);
  m.eval = [n, f](const VecR& x) -> MatR { return f(x) * MatR::Identity(n, n); };
  return m;
}

double as_d(Real x) { return static_cast<double>(x); }

// |W|^2 of a product of two surfaces of Gauss curvature k, from the
// Kulkarni-Nomizu decomposition in an orthonormal frame.
double product_weyl_norm2(double k) {
  const int n = 4;
  auto block = [](int a) { return a < 2 ? 0 : 1; };
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  auto riem = [&](int a, int b, int c, int d) {
    if (block(a) != block(b) || block(a) != block(c) || block(a) != block(d)) return 0.0;
    return k * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c));
  };
  // Ric = k g, R = 4k, J = 2k/3, P = (Ric - J g)/2 = (k/6) g.
  const double p = k / 6;
  double sum = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double kn = p * (delta(a, c) * delta(b, d) + delta(b, d) * delta(a, c) - delta(a, d) * delta(b, c) -
                                 delta(b, c) * delta(a, d));
          const double w = riem(a, b, c, d) - kn;
          sum += w * w;
        }
  return sum;
}

}  // namespace

TEST_CASE("euclidean jet and curvature vanish") {
  const ChartMetric e = euclidean_metric(4);
  const VecR x = VecR::Constant(4, 0.1L);
  const MetricJet jet = build_jet(e, x);
  for (const auto& d : jet.d1) CHECK(as_d(d.cwiseAbs().maxCoeff()) < 1e-14);
  for (const auto& d : jet.d2) CHECK(as_d(d.cwiseAbs().maxCoeff()) < 1e-12);
  const CurvatureBundle cb = full_curvature(e, x);
  CHECK(as_d(cb.riem.max_abs()) < 1e-10);
  CHECK(std::abs(as_d(cb.q)) < 1e-8);
  CHECK(std::abs(as_d(cb.scal)) < 1e-10);
}

TEST_CASE("jet reproduces polynomial metric derivatives") {
  const ChartMetric m = diagonal_metric(3, [](const VecR& x) { return 1 + x[0] * x[0]; });
  VecR x = VecR::Zero(3);
  x[0] = 0.2L;
  const MetricJet jet = build_jet(m, x);
  CHECK(as_d(jet.g(0, 0)) == doctest::Approx(1.04).epsilon(1e-15));
  CHECK(as_d(jet.dg(0)(1, 1)) == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(as_d(jet.ddg(0, 0)(0, 0)) == doctest::Approx(2).epsilon(1e-10));
  CHECK(std::abs(as_d(jet.ddg(0, 1)(0, 0))) < 1e-10);
  CHECK(std::abs(as_d(jet.dddg(0, 0, 0)(2, 2))) < 1e-8);
  // Symmetric in derivative slots by construction.
  CHECK(jet.ddg(0, 1) == jet.ddg(1, 0));
}

TEST_CASE("stereographic chart at the pole") {
  const ChartMetric c = stereographic_chart(round_sphere(3, 1));
  const MetricJet jet = build_jet(c, VecR::Zero(3), {}, 1);
  CHECK(as_d((jet.g - 4 * MatR::Identity(3, 3)).cwiseAbs().maxCoeff()) < 1e-14);
  for (const auto& d : jet.d1) CHECK(as_d(d.cwiseAbs().maxCoeff()) < 1e-12);
}

TEST_CASE("round 4-sphere has Q = 6") {
  const CurvatureBundle cb = full_curvature(stereographic_chart(round_sphere(4, 1)), VecR::Constant(4, 0.15L));
  CHECK(as_d(cb.q) == doctest::Approx(6).epsilon(1e-7));
  CHECK(as_d(cb.j) == doctest::Approx(2).epsilon(1e-9));
  CHECK(as_d(cb.weyl_norm2) < 1e-10);
  CHECK(as_d(cb.e_norm2) < 1e-10);
}

TEST_CASE("product of 2-spheres: Weyl norm against a frame computation") {
  const EinsteinModel m = product_s2_s2(1.0 / 3);  // factors of curvature 1
  const CurvatureBundle cb = full_curvature(product_chart(m), VecR::Constant(4, 0.1L));
  const double expected = product_weyl_norm2(1.0);
  CHECK(expected == doctest::Approx(16.0 / 3));
  CHECK(as_d(cb.weyl_norm2) == doctest::Approx(expected).epsilon(1e-8));
  CHECK(as_d(cb.e_norm2) < 1e-10);
}

TEST_CASE("divergence of g and of u g") {
  const ChartMetric m = perturbed_metric(4, 17);
  const VecR x = random_point(4, 18);
  const VecR dg = divergence_sym2(m.eval, m, x);
  CHECK(as_d(dg.cwiseAbs().maxCoeff()) < 1e-9);

  const ScalarField u = random_polynomial(4, 19);
  const VecR du = fd_gradient(u, x, 1e-2L, 3);
  const VecR div = divergence_sym2([&](const VecR& y) -> MatR { return u(y) * m.eval(y); }, m, x);
  CHECK(as_d((div - du).cwiseAbs().maxCoeff()) < 1e-8);
}

TEST_CASE("Hessian of a linear function on the unit sphere") {
  // Ambient coordinate X_1 = 2 x_1/(1 + |x|^2) in the stereographic chart;
  // on the unit sphere Hess X_1 = -X_1 g.
  const ChartMetric c = stereographic_chart(round_sphere(3, 1));
  const ScalarField phi = [](const VecR& x) { return 2 * x[0] / (1 + x.squaredNorm()); };
  VecR x(3);
  x << 0.3L, -0.2L, 0.1L;
  const HessianResult h = hessian_laplacian(phi, c, x);
  const MatR g = c.eval(x);
  CHECK(as_d((h.hess + phi(x) * g).cwiseAbs().maxCoeff()) < 1e-9);
  CHECK(as_d(h.lap) == doctest::Approx(as_d(-3 * phi(x))).epsilon(1e-9));
}

TEST_CASE("bundle invariants vanish on random metrics") {
  for (int n : {3, 4, 5}) {
    const CurvatureBundle cb = full_curvature(perturbed_metric(n, 100 + n), random_point(n, 200 + n));
    const BundleInvariants inv = bundle_invariants(cb);
    CHECK(as_d(inv.max_relative()) < 1e-9);
    // Dimension 3: Weyl vanishes identically.
    if (n == 3) CHECK(as_d(cb.weyl_norm2) < 1e-12);
  }
}

TEST_CASE("I_{a,b} assembled from its parts") {
  const CurvatureBundle cb = full_curvature(perturbed_metric(5, 4), random_point(5, 5), -2.5L, 0.75L);
  REQUIRE(cb.i_ab.has_value());
  CHECK(as_d(*cb.i_ab) == doctest::Approx(as_d(cb.q - 2.5L * cb.sigma2 + 0.75L * cb.weyl_norm2)).epsilon(1e-14));
  CHECK(as_d(cb.sigma2) == doctest::Approx(as_d((cb.j * cb.j - cb.p_norm2) / 2)).epsilon(1e-14));
}

TEST_CASE("random metrics and scalars are deterministic") {
  const ChartMetric a = perturbed_metric(4, 9), b = perturbed_metric(4, 9);
  const VecR x = random_point(4, 1);
  CHECK(a.eval(x) == b.eval(x));
  CHECK(random_polynomial(3, 5)(VecR::Constant(3, 0.3L)) == random_polynomial(3, 5)(VecR::Constant(3, 0.3L)));
  CHECK(random_point(4, 1) == x);
}

TEST_CASE("errors") {
  const ChartMetric e = euclidean_metric(3);
  CHECK_THROWS_AS(build_jet(e, VecR::Constant(3, 0.99L)), DomainError);
  CHECK_THROWS_AS(build_jet(e, VecR::Zero(2)), std::invalid_argument);
  StencilOptions bad;
  bad.step = 0;
  CHECK_THROWS_AS(build_jet(e, VecR::Zero(3), bad), std::invalid_argument);

  ChartMetric neg = e;
  neg.eval = [](const VecR&) -> MatR { return -MatR::Identity(3, 3); };
  CHECK_THROWS_AS(build_jet(neg, VecR::Zero(3)), MetricError);

  CHECK_THROWS_AS(full_curvature(euclidean_metric(2), VecR::Zero(2)), UnsupportedError);
  CHECK_THROWS_AS(curvature(build_jet(e, VecR::Zero(3), {}, 2)), std::invalid_argument);
}
