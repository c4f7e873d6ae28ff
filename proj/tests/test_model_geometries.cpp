#include "doctest.h"

#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/model_geometries.hpp"

using namespace curvlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("volumes") {
  CHECK(unit_sphere_volume(3) == doctest::Approx(2 * kPi * kPi));
  CHECK(unit_sphere_volume(4) == doctest::Approx(8 * kPi * kPi / 3));
  CHECK(unit_sphere_volume(5) == doctest::Approx(kPi * kPi * kPi));
  CHECK(unit_sphere_volume(6) == doctest::Approx(16 * kPi * kPi * kPi / 15));
  // Radius 1/sqrt(lambda).
  CHECK(round_sphere(5, 4).volume == doctest::Approx(kPi * kPi * kPi / 32));
  CHECK(round_sphere(5, 4).radius() == doctest::Approx(0.5));
  CHECK(flat_torus(3, {1, 2, 3}).volume == doctest::Approx(6));
  // Factors of curvature 3 lambda, each of area 4 pi/(3 lambda).
  CHECK(product_s2_s2(1.0 / 3).volume == doctest::Approx(16 * kPi * kPi));
  CHECK(product_s2_s2(2).volume == doctest::Approx(16 * kPi * kPi / 36));
}

TEST_CASE("Einstein pointwise values") {
  for (int n : {3, 4, 5, 8}) {
    for (double lambda : {0.5, 1.0, 3.0}) {
      const EinsteinPointwise e = einstein_pointwise(round_sphere(n, lambda));
      // Schouten of an Einstein metric is (lambda/2) g.
      const double j = n * lambda / 2, p2 = n * lambda * lambda / 4;
      CHECK(e.j == doctest::Approx(j));
      CHECK(e.p_norm2 == doctest::Approx(p2));
      CHECK(e.sigma2 == doctest::Approx((j * j - p2) / 2));
      CHECK(e.q == doctest::Approx(-2 * p2 + n / 2.0 * j * j));
      CHECK(e.weyl_norm2 == 0);
    }
  }
  const EinsteinPointwise t = einstein_pointwise(flat_torus(4, {1, 1, 1, 1}));
  CHECK(t.q == 0);
  CHECK(t.sigma2 == 0);
  const EinsteinModel p = product_s2_s2(1);
  CHECK(einstein_pointwise(p).q == doctest::Approx(6));
  CHECK(p.weyl_norm2 == doctest::Approx(16.0 / 3 * 9));
}

TEST_CASE("Yamabe-type constants") {
  const EinsteinModel s5 = round_sphere(5, 1);
  CHECK(yamabe_constant_iab(s5, 0, 0) == doctest::Approx(105.0 / 8 * std::pow(kPi, 12.0 / 5)));
  // Affine in a with slope sigma2 Vol^{4/n}.
  const double c0 = yamabe_constant_iab(s5, 0, 0), c1 = yamabe_constant_iab(s5, -1, 0), c3 = yamabe_constant_iab(s5, -3, 0);
  CHECK(c0 - c1 == doctest::Approx((c1 - c3) / 2));
  CHECK(c0 - c1 == doctest::Approx(20.0 / 8 * std::pow(kPi, 12.0 / 5)));
  // Scale invariant.
  CHECK(yamabe_constant_iab(round_sphere(5, 2.5), -2, 0) == doctest::Approx(yamabe_constant_iab(s5, -2, 0)));
  CHECK(yamabe_constant_iab(round_sphere(7, 0.3), 0, 0) == doctest::Approx(yamabe_constant_iab(round_sphere(7, 1), 0, 0)));
  const EinsteinModel s3 = round_sphere(3, 1);
  for (double a : {-4.0, -2.0, 0.0, 1.0})
    CHECK(yamabe_constant_iab(s3, a, 0) == doctest::Approx((15.0 / 8 + 3 * a / 4) * std::pow(2 * kPi * kPi, 4.0 / 3)));
  CHECK_THROWS_AS(yamabe_constant_iab(round_sphere(4, 1), 0, 0), UnsupportedError);
  CHECK_THROWS_AS(yamabe_constant_iab(s3, 0, 1), UnsupportedError);
}

TEST_CASE("gamma-function form of the total-Q constant") {
  for (int n : {5, 6, 7, 9}) {
    const EinsteinModel m = round_sphere(n, 1.7);
    const double direct = std::tgamma((n + 4) / 2.0) / std::tgamma((n - 4) / 2.0) * 1.7 * 1.7 * std::pow(m.volume, 4.0 / n);
    CHECK(q_constant_gamma_form(m) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(q_constant_gamma_form(m) == doctest::Approx((n - 4) / 2.0 * yamabe_constant_iab(m, 0, 0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(q_constant_gamma_form(round_sphere(3, 1)), UnsupportedError);
}

TEST_CASE("charts") {
  const EinsteinModel m = round_sphere(4, 4);
  const ChartMetric c = stereographic_chart(m);
  CHECK(c.dim == 4);
  CHECK(static_cast<double>(c.upper[0]) == doctest::Approx(2));
  const MatR g0 = c.eval(VecR::Zero(4));
  CHECK(static_cast<double>(g0(0, 0)) == doctest::Approx(4));
  // 4 r^4/(r^2 + |x|^2)^2 with r = 1/2 at |x| = 1/2.
  VecR x = VecR::Zero(4);
  x[1] = 0.5L;
  CHECK(static_cast<double>(c.eval(x)(2, 2)) == doctest::Approx(1));
  CHECK(static_cast<double>(c.eval(x)(1, 2)) == 0);

  const ChartMetric p = product_chart(product_s2_s2(1.0 / 3));
  const MatR gp = p.eval(VecR::Constant(4, 0.3L));
  CHECK(static_cast<double>(gp(0, 2)) == 0);
  CHECK(static_cast<double>(gp(0, 0)) == doctest::Approx(static_cast<double>(gp(3, 3))));

  const ChartMetric t = torus_chart(flat_torus(3, {1, 2, 3}));
  CHECK(t.eval(VecR::Constant(3, 0.5L)) == MatR::Identity(3, 3));
  CHECK(static_cast<double>(t.upper[2]) == doctest::Approx(3));

  CHECK_THROWS_AS(stereographic_chart(product_s2_s2(1)), UnsupportedError);
  CHECK_THROWS_AS(product_chart(m), UnsupportedError);
  CHECK_THROWS_AS(torus_chart(m), UnsupportedError);
}

TEST_CASE("parse_model") {
  const EinsteinModel s = parse_model("sphere:n=5,lambda=2");
  CHECK(s.kind == ModelKind::sphere);
  CHECK(s.dim == 5);
  CHECK(s.lambda == 2);
  CHECK(parse_model(s.describe()).describe() == s.describe());

  const EinsteinModel p = parse_model("s2xs2:lambda=1/3");
  CHECK(p.kind == ModelKind::s2xs2);
  CHECK(p.dim == 4);
  CHECK(p.lambda == doctest::Approx(1.0 / 3));

  const EinsteinModel t = parse_model("torus:n=4,periods=1;2;3;4");
  CHECK(t.periods == std::vector<double>{1, 2, 3, 4});
  CHECK(parse_model("torus:n=3,period=2").volume == doctest::Approx(8));

  CHECK_THROWS_AS(parse_model("cube:n=3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("sphere:n=5,lambda=x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("sphere:n=5,mu=1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("sphere:n5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("sphere:n=2,lambda=1"), UnsupportedError);
  CHECK_THROWS_AS(parse_model("sphere:n=5,lambda=-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("torus:n=3,periods=1;2"), std::invalid_argument);
}

TEST_CASE("rejections") {
  CHECK_THROWS_AS(flat_torus(3, {1, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(product_s2_s2(0), std::invalid_argument);
  CHECK_THROWS_AS(flat_torus(3, {1, 1, 1}).radius(), UnsupportedError);
}
