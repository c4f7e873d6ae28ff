#include "doctest.h"

#include <cmath>
#include <numbers>

#include "curvlab/optimizer.hpp"

using namespace curvlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("objective names") {
  for (Objective o : {Objective::total_iab, Objective::f_gamma, Objective::dj}) CHECK(parse_objective(to_string(o)) == o);
  CHECK_THROWS_AS(parse_objective("energy"), std::invalid_argument);
}

TEST_CASE("minimising total I on S5 reaches the sharp constant") {
  const OptimizeResult r = minimize_functional(Objective::total_iab, round_sphere(5, 1), {}, 6);
  CHECK(r.converged);
  CHECK_FALSE(r.maximize);
  CHECK(r.value == doctest::Approx(105.0 / 8 * std::pow(kPi, 12.0 / 5)).epsilon(1e-6));
  CHECK(r.coefficients.size() == 7);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
  CHECK(r.trace.front() > r.value);
}

TEST_CASE("maximising total I on S3") {
  const OptimizeResult r = minimize_functional(Objective::total_iab, round_sphere(3, 1), {-2, 0}, 4);
  CHECK(r.maximize);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx((15.0 / 8 - 1.5) * std::pow(2 * kPi * kPi, 4.0 / 3)).epsilon(1e-6));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1]);
}

TEST_CASE("dimension 4 objectives") {
  const OptimizeResult f = minimize_functional(Objective::f_gamma, round_sphere(4, 1), {0, 0, 0, 1, 0}, 4);
  CHECK(std::abs(f.value) < 1e-6);
  // J^2 Vol on the unit 4-sphere: 4 * 8 pi^2/3.
  const OptimizeResult d = minimize_functional(Objective::dj, round_sphere(4, 1), {}, 4);
  CHECK(d.value == doctest::Approx(32 * kPi * kPi / 3).epsilon(1e-8));
  const OptimizeResult t = minimize_functional(Objective::f_gamma, flat_torus(4, std::vector<double>(4, 2 * kPi)),
                                               {0, 0, 0, 1, 0}, 3);
  CHECK(t.coefficients.size() == 7);
  CHECK(std::abs(t.value) < 1e-6);
}

TEST_CASE("deterministic in the seed") {
  OptimizeOptions o;
  o.seed = 9;
  o.nodes = 64;
  const OptimizeResult a = minimize_functional(Objective::dj, round_sphere(5, 1), {}, 3, o);
  const OptimizeResult b = minimize_functional(Objective::dj, round_sphere(5, 1), {}, 3, o);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.trace == b.trace);
  o.seed = 10;
  CHECK(minimize_functional(Objective::dj, round_sphere(5, 1), {}, 3, o).trace.front() != a.trace.front());
}

TEST_CASE("iteration budget is reported, not thrown") {
  OptimizeOptions o;
  o.max_iter = 1;
  const OptimizeResult r = minimize_functional(Objective::total_iab, round_sphere(5, 1), {}, 6, o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.trace.size() == 2);
}

TEST_CASE("field from coefficients") {
  const GridPtr g = make_grid(round_sphere(5, 1), 32);
  // Modes are orthonormal for the weight (1-x^2)^{(n-2)/2} on [-1, 1].
  const double unit0 = std::sqrt(gegenbauer_mass(5));
  std::vector<double> c(4, 0.0);
  c[0] = 2 * unit0;
  const ZonalField f = field_from_coefficients(g, c);
  for (double v : f.values) CHECK(v == doctest::Approx(2));
}

TEST_CASE("objective values") {
  const GridPtr g = make_grid(round_sphere(5, 1), 64);
  const ZonalField u = random_positive(g, 4, 3);
  CHECK(objective_value(Objective::total_iab, u, {-1, 0}) == doctest::Approx(normalized_total_iab(u, -1, 0)));
  const GridPtr g4 = make_grid(round_sphere(4, 1), 64);
  const ZonalField w = random_zonal(g4, 4, 3, 0.5);
  CHECK(objective_value(Objective::f_gamma, w, {0, 0, 1, 2, 3}) == doctest::Approx(f_gamma(w, 1, 2, 3).value));
}

TEST_CASE("rejections") {
  CHECK_THROWS_AS(minimize_functional(Objective::dj, product_s2_s2(1), {}, 2), std::invalid_argument);
  CHECK_THROWS_AS(minimize_functional(Objective::total_iab, round_sphere(4, 1), {}, 2), std::invalid_argument);
  CHECK_THROWS_AS(minimize_functional(Objective::f_gamma, round_sphere(5, 1), {}, 2), std::invalid_argument);
  CHECK_THROWS_AS(minimize_functional(Objective::total_iab, round_sphere(3, 1), {0, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(minimize_functional(Objective::dj, round_sphere(5, 1), {}, 0), std::invalid_argument);
  OptimizeOptions small;
  small.nodes = 16;
  CHECK_THROWS_AS(minimize_functional(Objective::dj, round_sphere(5, 1), {}, 20, small), std::invalid_argument);
}
