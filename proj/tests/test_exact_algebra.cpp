#include "doctest.h"

#include "curvlab/exact_algebra.hpp"

using namespace curvlab;

TEST_CASE("transcribed identities match the derivation") {
  for (int n = 3; n <= 10; ++n) {
    for (const Rational& a : {Rational(-4), Rational(-7, 3), Rational(0), Rational(5, 2)}) {
      const IbpIdentities t = ibp_identities(n, a), d = derive_ibp_identities(n, a);
      CHECK(t.tf_jp == d.tf_jp);
      CHECK(t.jp_q == d.jp_q);
      CHECK(t.nabla_j == d.nabla_j);
    }
  }
}

TEST_CASE("combination steps") {
  for (int n = 3; n <= 10; ++n) {
    for (int p = -24; p <= 9; p += 5) {
      const CombinationCheck c = verify_combination_coefficients(n, Rational(p, 3));
      CHECK(c.transcription);
      CHECK(c.step_i);
      CHECK(c.step_ii);
      CHECK(c.step_iii);
      CHECK(c.pass());
      // Step (ii) removes the <J grad J, grad u> term.
      CHECK(c.after_ii[2] == 0);
    }
  }
  CHECK_THROWS_AS(verify_combination_coefficients(2, 0), std::invalid_argument);
}

TEST_CASE("polynomial identity for C") { CHECK(c_poly_identity_holds()); }

TEST_CASE("integrand basis names") {
  for (int k = 0; k < kIntegrandTerms; ++k) CHECK_FALSE(integrand_term_name(k).empty());
  IntegrandVector v{};
  v[0] = Rational(1, 2);
  CHECK(to_string(v).find("1/2") != std::string::npos);
}
