#include "runner_detail.hpp"

#include <sstream>

#include "curvlab/rng.hpp"

#include "curvlab/constants.hpp"
#include "curvlab/exact_algebra.hpp"

namespace curvlab::detail {

double parse_real(const std::string& text) {
  try {
    return to_double(parse_rational(text));
  } catch (const std::invalid_argument&) {
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("not a number: '" + text + "'");
}

namespace {

GammaTriple exact_gamma(const std::string& text) {
  if (text.find(':') == std::string::npos) {
    try {
      return named_triple(text);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<Rational> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      parts.push_back(parse_rational(item));
    } catch (const std::invalid_argument&) {
      throw UsageError("bad gamma component '" + item + "' in '" + text + "'");
    }
  }
  if (parts.size() != 3) throw UsageError("gamma triple needs three components g1:g2:g3, got '" + text + "'");
  return {parts[0], parts[1], parts[2]};
}

}  // namespace

GammaValue parse_gamma(const std::string& text) {
  const GammaTriple t = exact_gamma(text);
  return {to_double(t.g1), to_double(t.g2), to_double(t.g3), text};
}

namespace {

Record exact_record(const std::string& suite, const std::string& name, const std::string& anchor, bool pass) {
  Record r;
  r.suite = suite;
  r.kind = "exact";
  r.name = name;
  r.anchor = anchor;
  r.pass = pass;
  r.value = pass ? 1 : 0;
  r.reference = 1;
  return r;
}

Rational random_rational(Rng& rng) {
  const int q = 1 + static_cast<int>(rng.below(12));
  const int p = static_cast<int>(rng.below(static_cast<std::uint64_t>(11 * q + 1))) - 8 * q;
  return Rational(p, q);
}

}  // namespace

std::vector<Record> exact_algebra_records(std::uint64_t seed, int per_n) {
  std::vector<Record> out;
  for (int n = 3; n <= 10; ++n) {
    Rng rng(seed, 0xA1 + n);
    int failures = 0;
    std::string failing;
    for (int k = 0; k < per_n; ++k) {
      const Rational a = random_rational(rng);
      if (!verify_combination_coefficients(n, a).pass()) {
        ++failures;
        failing += (failing.empty() ? "" : " ") + to_string(a);
      }
    }
    Record r = exact_record("identities", "combination-coefficients", "cancellation-steps", failures == 0);
    r.params = {{"n", n}, {"samples", per_n}, {"failures", failures}};
    if (!failing.empty()) r.warning = "failing a: " + failing;
    out.push_back(r);
  }

  out.push_back(exact_record("identities", "c-poly-quadratic-form", "c-polynomial", c_poly_identity_holds()));

  for (int n = 3; n <= 12; ++n) {
    const AdmissibleInterval iv = a_interval(n);
    const Rational rn = n;
    const Rational c0 = 4 * rn * rn * rn - 17 * rn * rn + 28 * rn - 16;
    const RestrictedSet rs = restricted_interval(n);
    bool pass = c_poly(rn, iv.lower).is_zero() && c_poly(rn, iv.upper).is_zero();
    pass = pass && iv.lower.compare(0) < 0 && iv.upper.compare(0) > 0;
    pass = pass && c_poly(rn, Rational(-4)) == -rn * rn && c_poly(rn, Rational(0)) == c0 && c0 > 0;
    pass = pass && iv.contains(0) && !iv.contains(-4) && iv.contains(rs.right);
    // Membership agrees with the sign of C on a rational grid over [-6, 4].
    for (int k = 0; k < 100; ++k) {
      const Rational a = Rational(-6) + Rational(k, 10);
      pass = pass && (iv.contains(a) == (c_poly(rn, a) >= 0));
    }
    Record r = exact_record("identities", "interval-algebra", "a-range", pass);
    r.params = {{"n", n}};
    r.text = {{"lower", iv.lower.str()}, {"upper", iv.upper.str()}, {"c(n,0)", to_string(c0)}};
    out.push_back(r);
  }
  return out;
}

std::vector<Record> interval_records(const std::vector<int>& ns, const std::vector<std::string>& gammas) {
  std::vector<Record> out;
  for (int n : ns) {
    const AdmissibleInterval iv = a_interval(n);
    const RestrictedSet rs = restricted_interval(n);
    const Rational rn = n;

    Record r = exact_record("intervals", "a-interval", "a-range",
                            c_poly(rn, iv.lower).is_zero() && c_poly(rn, iv.upper).is_zero() &&
                                iv.lower.compare(0) < 0 && iv.upper.compare(0) > 0);
    r.model = "n=" + std::to_string(n);
    r.value = iv.lower.value();
    r.reference = iv.lower.value();
    r.params = {{"n", n}, {"lower", iv.lower.value()}, {"upper", iv.upper.value()}};
    r.text = {{"lower", iv.lower.str()}, {"upper", iv.upper.str()}};
    out.push_back(r);

    Record s = exact_record("intervals", "restricted-set", "restricted-a-range", iv.contains(rs.right) && rs.contains(0));
    s.model = r.model;
    s.value = to_double(rs.right);
    s.reference = s.value;
    s.params = {{"n", n}, {"lower", rs.lower.value()}, {"right", to_double(rs.right)}};
    s.text = {{"set", "{0} u [" + rs.lower.str() + ", " + to_string(rs.right) + "]"}};
    out.push_back(s);

    const Rational c0 = c_poly(rn, Rational(0)), c4 = c_poly(rn, Rational(-4));
    Record c = exact_record("intervals", "c-poly", "c-polynomial", c0 > 0 && c4 == -rn * rn);
    c.model = r.model;
    c.value = to_double(c0);
    c.reference = c.value;
    c.params = {{"n", n}};
    c.text = {{"c(n,0)", to_string(c0)}, {"c(n,-4)", to_string(c4)}};
    out.push_back(c);
  }

  for (const std::string& name : gammas) {
    const GammaTriple t = exact_gamma(name);
    const GammaMap m = gamma_map(t);
    // I_gamma = scale * I_{a,b} on Einstein data with W != 0.
    bool pass = true;
    for (const Rational& w2 : {Rational(0), Rational(16, 3)}) {
      const ExactEinstein e = exact_einstein(4, Rational(1, 3), w2);
      const Rational direct = exact_i_gamma(e, t);
      if (m.normalized) {
        pass = pass && direct == m.normalized->scale * exact_i_ab(e, m.normalized->a, m.normalized->b);
      } else {
        pass = pass && direct == m.w2_coeff * e.weyl_norm2;
      }
    }
    Record g = exact_record("intervals", "gamma-map", "gamma-triples", pass);
    g.model = name;
    g.value = to_double(m.q_coeff);
    g.reference = g.value;
    g.text = {{"triple", t.str()}, {"q_coeff", to_string(m.q_coeff)}, {"sigma2_coeff", to_string(m.sigma2_coeff)},
              {"w2_coeff", to_string(m.w2_coeff)}};
    if (m.normalized) {
      g.text["scale"] = to_string(m.normalized->scale);
      g.text["a"] = to_string(m.normalized->a);
      g.text["b"] = to_string(m.normalized->b);
    } else {
      g.warning = "pure Weyl combination (q_coeff = 0)";
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace curvlab::detail
