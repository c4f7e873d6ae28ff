#include "curvlab/exact_algebra.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace curvlab {

std::string integrand_term_name(int k) {
  static const std::array<const char*, kIntegrandTerms> names = {
      "u J |E|^2",
      "E(grad J, grad u)",
      "<J grad J, grad u>",
      "u^-1 (|grad u|^2 + lambda) Lap J",
      "u^-1 (|grad u|^2 + lambda) |E|^2",
      "u J Lap J",
      "u |grad J|^2",
  };
  return names.at(static_cast<std::size_t>(k));
}

std::string to_string(const IntegrandVector& v) {
  std::string s = "[";
  for (int k = 0; k < kIntegrandTerms; ++k) s += (k ? ", " : "") + to_string(v[k]);
  return s + "]";
}

IbpIdentities ibp_identities(const Rational& n, const Rational& a) {
  const Rational k = n * n - 4 + (n - 1) * a;
  IbpIdentities id;
  id.tf_jp = {-1, 1, (n - 1) / n, 0, 0, 0, 0};
  id.jp_q = {-n * (n + a), k, k * (n + 1) / n, n, n * (a + 4) / 2, -2, 0};
  id.nabla_j = {0, n - 1, (n - 1) / n, -(n - 1) / 2, 0, 0, 0};
  return id;
}

namespace {

// Integrand basis extended by the terms that must cancel during a derivation.
enum Extra { kUJ3 = kIntegrandTerms, kWJ2, kUPHessJ, kExtended };
using Extended = std::array<Rational, kExtended>;

// Scalar combination s_j2 J^2 + s_lap Lap J + s_e2 |E|^2.
struct Scalar {
  Rational j2, lap, e2;
};

// Pre-ibp integrand for T = c_jp JP + c_h Hess J + s g with
// <div T, grad u> = div_e E(grad J, grad u) + div_j <J grad J, grad u>.
Extended pre_ibp(const Rational& n, const Rational& c_jp, const Rational& c_h, const Scalar& s,
                 const Rational& div_e, const Rational& div_j) {
  Extended v{};
  v[1] += div_e;
  v[2] += div_j;
  // -u <T, P>:  <JP, P> = J|P|^2 = J|E|^2 + J^3/n,  <g, P> = J.
  v[0] -= c_jp;
  v[kUJ3] -= c_jp / n;
  v[kUPHessJ] -= c_h;
  v[kUJ3] -= s.j2;
  v[5] -= s.lap;
  v[0] -= s.e2;
  // (1/2) w tr T with w = u^{-1}(|grad u|^2 + lambda):
  // tr(JP) = J^2, tr(Hess J) = Lap J, tr g = n.
  v[kWJ2] += c_jp / 2 + n * s.j2 / 2;
  v[3] += c_h / 2 + n * s.lap / 2;
  v[4] += n * s.e2 / 2;
  // -int u <P, Hess J> = int (-u J Lap J + E(grad J, grad u) - (n-1)/n <J grad J, grad u>).
  const Rational m = -v[kUPHessJ];
  v[kUPHessJ] = 0;
  v[5] -= m;
  v[1] += m;
  v[2] -= m * (n - 1) / n;
  return v;
}

IntegrandVector project(const Extended& v) {
  for (int k = kIntegrandTerms; k < kExtended; ++k)
    if (v[k] != 0) throw std::logic_error("derivation left a non-basis term");
  IntegrandVector out;
  std::copy_n(v.begin(), kIntegrandTerms, out.begin());
  return out;
}

}  // namespace

IbpIdentities derive_ibp_identities(const Rational& n, const Rational& a) {
  const Rational k = n * n - 4 + (n - 1) * a;
  IbpIdentities id;
  // T = JP - J^2 g/n.
  id.tf_jp = project(pre_ibp(n, 1, 0, {-1 / n, 0, 0}, 1, (n - 1) / n));
  // T = K JP - 2 I_{a,0} g with I_{a,0} = -Lap J - (a+4)/2 |E|^2 + K/(2n) J^2
  // constant, so div(I g) = 0.
  id.jp_q = project(pre_ibp(n, k, 0, {-2 * k / (2 * n), 2, a + 4}, k, k * (n + 1) / n));
  // T = Hess J - Lap J g.
  id.nabla_j = project(pre_ibp(n, 0, 1, {0, -1, 0}, n - 2, 2 * (n - 1) / n));
  return id;
}

CombinationCheck verify_combination_coefficients(const Rational& n, const Rational& a) {
  if (n < 3) throw std::invalid_argument("verify_combination_coefficients: n must be >= 3");
  CombinationCheck c;
  const IbpIdentities id = ibp_identities(n, a);
  const IbpIdentities derived = derive_ibp_identities(n, a);
  c.transcription = id.tf_jp == derived.tf_jp && id.jp_q == derived.jp_q && id.nabla_j == derived.nabla_j;

  // (i) JP-Q + 2n/(n-1) nablaJ, then int u J Lap J = -int (u |grad J|^2 + <J grad J, grad u>).
  IntegrandVector v;
  for (int k = 0; k < kIntegrandTerms; ++k) v[k] = id.jp_q[k] + 2 * n / (n - 1) * id.nabla_j[k];
  const Rational s = v[5];
  v[5] = 0;
  v[6] -= s;
  v[2] -= s;
  c.after_i = v;
  const IntegrandVector expect_i = {-n * (n + a),
                                    n * n + 2 * n - 4 + (n - 1) * a,
                                    (n * n * n + n * n - 4 + (n * n - 1) * a) / n,
                                    0,
                                    n * (a + 4) / 2,
                                    0,
                                    2};
  c.step_i = v == expect_i;

  // (ii) subtract M tf-JP.
  const Rational m = (n * n * n + n * n - 4 + (n * n - 1) * a) / (n - 1);
  for (int k = 0; k < kIntegrandTerms; ++k) v[k] -= m * id.tf_jp[k];
  c.after_ii = v;
  const IntegrandVector expect_ii = {(2 * n * n - 4 + (n - 1) * a) / (n - 1),
                                     -2 * (3 * n - 4 + (n - 1) * a) / (n - 1),
                                     0,
                                     0,
                                     n * (a + 4) / 2,
                                     0,
                                     2};
  c.step_ii = v == expect_ii;

  // (iii) B E(x, y) >= -k u|x|^2 - B^2/(4k) u^{-1}|E|^2|y|^2 with k the
  // u|grad J|^2 coefficient; what is left on u^{-1}|grad u|^2|E|^2 must be
  // C(n,a)/(2(n-1)^2).
  const Rational b = v[1];
  const Rational left = v[4] - b * b / (4 * v[6]);
  c.step_iii = left == c_poly(n, a) / (2 * (n - 1) * (n - 1)) && c_poly(n, a) == c_poly_quadratic_form(n, a);
  return c;
}

namespace {

// Polynomials in (n, a) with rational coefficients.
using Poly2 = std::map<std::pair<int, int>, Rational>;

Poly2 add(Poly2 p, const Poly2& q, const Rational& s = 1) {
  for (const auto& [e, c] : q) p[e] += s * c;
  std::erase_if(p, [](const auto& kv) { return kv.second == 0; });
  return p;
}

Poly2 mul(const Poly2& p, const Poly2& q) {
  Poly2 r;
  for (const auto& [e1, c1] : p)
    for (const auto& [e2, c2] : q) r[{e1.first + e2.first, e1.second + e2.second}] += c1 * c2;
  std::erase_if(r, [](const auto& kv) { return kv.second == 0; });
  return r;
}

Poly2 constant(const Rational& c) { return c == 0 ? Poly2{} : Poly2{{{0, 0}, c}}; }

}  // namespace

bool c_poly_identity_holds() {
  const Poly2 n = {{{1, 0}, 1}};
  const Poly2 a = {{{0, 1}, 1}};
  const Poly2 nm1 = add(n, constant(-1));
  const Poly2 n2 = mul(n, n);
  const Poly2 n3 = mul(n2, n);
  Poly2 lhs = add(add(add(mul(constant(4), n3), n2, -17), n, 28), constant(-16));
  lhs = add(lhs, mul(mul(nm1, add(add(n2, n, -7), constant(8))), a));
  lhs = add(lhs, mul(mul(nm1, nm1), mul(a, a)), -1);
  const Poly2 s = add(add(mul(constant(3), n), constant(-4)), mul(nm1, a));
  const Poly2 rhs = add(mul(mul(n, add(a, constant(4))), mul(nm1, nm1)), mul(s, s), -1);
  return lhs == rhs;
}

}  // namespace curvlab
