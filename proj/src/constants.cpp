#include "curvlab/constants.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace curvlab {

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

namespace {

// Decimal integer with optional sign; cpp_int would read a leading 0 as octal.
boost::multiprecision::cpp_int parse_integer(std::string text) {
  bool negative = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    negative = text[0] == '-';
    text.erase(0, 1);
  }
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("bad integer");
  }
  const auto first = text.find_first_not_of('0');
  boost::multiprecision::cpp_int v(first == std::string::npos ? std::string("0") : text.substr(first));
  return negative ? -v : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  try {
    if (const auto slash = text.find('/'); slash != std::string::npos) {
      const boost::multiprecision::cpp_int den = parse_integer(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator");
      return Rational(parse_integer(text.substr(0, slash))) / den;
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_integer(text));
    const std::string frac = text.substr(dot + 1);
    std::string whole = text.substr(0, dot);
    if (whole == "-" || whole == "+" || whole.empty()) whole += "0";
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const Rational mag = abs(Rational(parse_integer(whole))) + Rational(parse_integer(frac.empty() ? "0" : frac)) / scale;
    return whole[0] == '-' ? -mag : mag;
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
}

namespace {

int sign(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

// Sign of p + q sqrt(d).
int surd_sign(const Rational& p, const Rational& q, const Rational& d) {
  const int sp = sign(p);
  const int sq = d == 0 ? 0 : sign(q);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  // Opposite signs: compare p^2 with q^2 d.
  const int c = sign(p * p - q * q * d);
  return c == 0 ? 0 : (c > 0 ? sp : sq);
}

void require_same_radicand(const QuadraticSurd& x, const QuadraticSurd& y) {
  if (x.d != y.d && x.q != 0 && y.q != 0) throw std::invalid_argument("surds with different radicands");
}

Rational radicand(const QuadraticSurd& x, const QuadraticSurd& y) { return x.q != 0 ? x.d : y.d; }

}  // namespace

double QuadraticSurd::value() const { return to_double(p) + to_double(q) * std::sqrt(to_double(d)); }

int QuadraticSurd::compare(const Rational& r) const { return surd_sign(p - r, q, d); }

bool QuadraticSurd::is_zero() const { return surd_sign(p, q, d) == 0; }

std::string QuadraticSurd::str() const {
  using boost::multiprecision::cpp_int;
  if (q == 0 || d == 0) return to_string(p);
  // sqrt(d) = sqrt(num * den) / den; pull square factors out of num * den.
  cpp_int rad = numerator(d) * denominator(d);
  cpp_int outside = 1;
  for (cpp_int f = 2; f * f <= rad && f < 1000000; ++f) {
    while (rad % (f * f) == 0) {
      rad /= f * f;
      outside *= f;
    }
  }
  const Rational coeff = q * Rational(outside) / Rational(denominator(d));
  if (rad == 1) return to_string(p + coeff);
  const cpp_int den = boost::multiprecision::lcm(denominator(p), denominator(coeff));
  const cpp_int pn = numerator(p * Rational(den)), qn = numerator(coeff * Rational(den));
  std::ostringstream os;
  if (den != 1) os << '(';
  if (pn != 0) os << pn << (qn > 0 ? " + " : " - ");
  else if (qn < 0) os << '-';
  const cpp_int qa = abs(qn);
  if (qa != 1) os << qa << '*';
  os << "sqrt(" << rad << ')';
  if (den != 1) os << ")/" << den;
  return os.str();
}

QuadraticSurd operator+(const QuadraticSurd& x, const QuadraticSurd& y) {
  require_same_radicand(x, y);
  return {x.p + y.p, x.q + y.q, radicand(x, y)};
}

QuadraticSurd operator*(const QuadraticSurd& x, const QuadraticSurd& y) {
  require_same_radicand(x, y);
  const Rational d = radicand(x, y);
  return {x.p * y.p + x.q * y.q * d, x.p * y.q + x.q * y.p, d};
}

QuadraticSurd operator*(const Rational& s, const QuadraticSurd& x) { return {s * x.p, s * x.q, x.d}; }

int compare(const QuadraticSurd& x, const QuadraticSurd& y) {
  require_same_radicand(x, y);
  return surd_sign(x.p - y.p, x.q - y.q, radicand(x, y));
}

Rational c_poly(const Rational& n, const Rational& a) {
  return 4 * n * n * n - 17 * n * n + 28 * n - 16 + (n - 1) * (n * n - 7 * n + 8) * a - (n - 1) * (n - 1) * a * a;
}

QuadraticSurd c_poly(const Rational& n, const QuadraticSurd& a) {
  const QuadraticSurd constant{4 * n * n * n - 17 * n * n + 28 * n - 16, 0, a.d};
  return constant + Rational((n - 1) * (n * n - 7 * n + 8)) * a + Rational(-(n - 1) * (n - 1)) * (a * a);
}

Rational c_poly_quadratic_form(const Rational& n, const Rational& a) {
  const Rational s = 3 * n - 4 + (n - 1) * a;
  return n * (a + 4) * (n - 1) * (n - 1) - s * s;
}

AdmissibleInterval a_interval(int n) {
  if (n < 3) throw std::invalid_argument("a_interval: n must be >= 3");
  const Rational rn = n;
  const Rational den = 2 * (rn - 1);
  const Rational p = (rn * rn - 7 * rn + 8) / den;
  const Rational d = rn * rn * rn * rn + 2 * rn * rn * rn - 3 * rn * rn;
  return {n, {p, -1 / den, d}, {p, 1 / den, d}};
}

bool AdmissibleInterval::contains(const Rational& a) const { return lower.compare(a) <= 0 && upper.compare(a) >= 0; }

RestrictedSet restricted_interval(int n) {
  const AdmissibleInterval i = a_interval(n);
  return {n, i.lower, Rational(-2 * (n - 2)) / (n - 1)};
}

bool RestrictedSet::contains(const Rational& a) const {
  return a == 0 || (lower.compare(a) <= 0 && a <= right);
}

std::string GammaTriple::str() const {
  return "(" + to_string(g1) + ", " + to_string(g2) + ", " + to_string(g3) + ")";
}

GammaMap gamma_map(const GammaTriple& t) {
  GammaMap m;
  m.w2_coeff = t.g1;
  m.q_coeff = t.g2 / 2 + 6 * t.g3;
  m.sigma2_coeff = -24 * t.g3;
  m.pure_weyl = m.q_coeff == 0;
  if (!m.pure_weyl) m.normalized = GammaMap::Normalized{m.q_coeff, m.sigma2_coeff / m.q_coeff, m.w2_coeff / m.q_coeff};
  return m;
}

GammaTriple named_triple(const std::string& name) {
  if (name == "l4") return {Rational(-1, 4), Rational(-14), Rational(8, 3)};
  if (name == "l2") return {Rational(1, 8), Rational(-1, 2), Rational(-1, 12)};
  if (name == "l2-flipped") return {Rational(-1, 8), Rational(1, 2), Rational(1, 12)};
  if (name == "dirac2") return {Rational(7, 16), Rational(-11, 2), Rational(-7, 24)};
  throw std::invalid_argument("unknown gamma triple '" + name + "' (expected l4, l2, l2-flipped, dirac2)");
}

ExactEinstein exact_einstein(int n, const Rational& lambda, const Rational& weyl_norm2) {
  const Rational rn = n;
  const Rational l2 = lambda * lambda;
  return {rn * lambda / 2, rn * l2 / 4, rn * (rn - 1) * l2 / 8, rn * (rn * rn - 4) * l2 / 8, weyl_norm2};
}

Rational exact_i_ab(const ExactEinstein& e, const Rational& a, const Rational& b) {
  return e.q + a * e.sigma2 + b * e.weyl_norm2;
}

Rational exact_i_gamma(const ExactEinstein& e, const GammaTriple& t) {
  return t.g1 * e.weyl_norm2 + (t.g2 / 2 + 6 * t.g3) * e.q - 24 * t.g3 * e.sigma2;
}

Rational l2_decomposition_residual(int n, const Rational& lambda, const Rational& a) {
  const ExactEinstein e = exact_einstein(n, lambda, 0);
  const Rational rn = n;
  // Einstein: Delta J = 0 and |E|^2 = 0, so I_{a,0} = Q + a sigma2 with
  // Q = -2|P|^2 + (n/2)J^2.
  const Rational q = -2 * e.p_norm2 + rn / 2 * e.j * e.j;
  const Rational i_a0 = q + a * (e.j * e.j - e.p_norm2) / 2;
  const Rational l2j = (rn - 2) / 2 * e.j * e.j;
  return i_a0 - l2j - (2 * (rn - 2) + (rn - 1) * a) * e.j * e.j / (2 * rn);
}

}  // namespace curvlab
