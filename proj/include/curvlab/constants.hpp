#pragma once

// Exact arithmetic for the closed-form constants: the admissible interval
// for a, the polynomial C(n, a), the restricted range, and gamma triples.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace curvlab {

using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);
/// "p/q" or "p".
std::string to_string(const Rational& r);
/// Parses "p", "p/q" or a terminating decimal such as "-0.25".
Rational parse_rational(const std::string& text);

/// p + q sqrt(d), d >= 0 rational.  Comparisons are exact.
struct QuadraticSurd {
  Rational p;
  Rational q;
  Rational d;

  double value() const;
  /// Sign of (*this - r): -1, 0 or 1.
  int compare(const Rational& r) const;
  bool is_zero() const;
  std::string str() const;
};

QuadraticSurd operator+(const QuadraticSurd& x, const QuadraticSurd& y);
QuadraticSurd operator*(const QuadraticSurd& x, const QuadraticSurd& y);
QuadraticSurd operator*(const Rational& s, const QuadraticSurd& x);
/// Sign of x - y for surds over the same radicand.
int compare(const QuadraticSurd& x, const QuadraticSurd& y);

/// C(n,a) = 4n^3 - 17n^2 + 28n - 16 + (n-1)(n^2-7n+8) a - (n-1)^2 a^2.
Rational c_poly(const Rational& n, const Rational& a);
QuadraticSurd c_poly(const Rational& n, const QuadraticSurd& a);
/// n(a+4)(n-1)^2 - (3n-4+(n-1)a)^2, the Cauchy-Schwarz form of C.
Rational c_poly_quadratic_form(const Rational& n, const Rational& a);

/// Roots of C(n, .): (n^2-7n+8 -+ sqrt(n^4+2n^3-3n^2)) / (2(n-1)).
struct AdmissibleInterval {
  int n = 0;
  QuadraticSurd lower;
  QuadraticSurd upper;

  bool contains(const Rational& a) const;
};

AdmissibleInterval a_interval(int n);

/// {0} u [lower(a_interval(n)), -2(n-2)/(n-1)].
struct RestrictedSet {
  int n = 0;
  QuadraticSurd lower;
  Rational right;

  bool contains(const Rational& a) const;
};

RestrictedSet restricted_interval(int n);

struct GammaTriple {
  Rational g1, g2, g3;
  std::string str() const;
};

/// I_gamma = w2_coeff |W|^2 + q_coeff Q + sigma2_coeff sigma2.  When
/// q_coeff != 0, I_gamma = scale * I_{a,b}.
struct GammaMap {
  Rational w2_coeff;
  Rational q_coeff;
  Rational sigma2_coeff;
  bool pure_weyl = false;
  struct Normalized {
    Rational scale, a, b;
  };
  std::optional<Normalized> normalized;
};

GammaMap gamma_map(const GammaTriple& t);

/// Named triples: "l4", "l2", "dirac2" (and "l2-flipped" for the negated L2 triple).
GammaTriple named_triple(const std::string& name);

/// Pointwise values on an Einstein manifold with rational data:
/// J = n lambda/2, |P|^2 = n lambda^2/4, sigma2 = n(n-1)lambda^2/8,
/// Q = n(n^2-4)lambda^2/8.
struct ExactEinstein {
  Rational j, p_norm2, sigma2, q, weyl_norm2;
};
ExactEinstein exact_einstein(int n, const Rational& lambda, const Rational& weyl_norm2);

Rational exact_i_ab(const ExactEinstein& e, const Rational& a, const Rational& b);
/// gamma1 |W|^2 + (gamma2/2 + 6 gamma3) Q - 24 gamma3 sigma2.
Rational exact_i_gamma(const ExactEinstein& e, const GammaTriple& t);

/// I_{a,0} - L2 J - (2(n-2) + (n-1)a) J^2/(2n) on an Einstein manifold
/// (E = 0, J constant, L2 = -Delta + (n-2)J/2).  Vanishes identically.
Rational l2_decomposition_residual(int n, const Rational& lambda, const Rational& a);

}  // namespace curvlab
