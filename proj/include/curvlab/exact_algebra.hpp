#pragma once

// Exact coefficient algebra behind the integrated identities against an
// Einstein scale: transcription, derivation from the divergence formulas,
// and the two cancellation steps plus the Cauchy-Schwarz bookkeeping.

#include <array>
#include <string>

#include "curvlab/constants.hpp"

namespace curvlab {

// Integrand basis
//   0 u J |E|^2            1 E(grad J, grad u)
//   2 <J grad J, grad u>   3 u^{-1}(|grad u|^2 + lambda) Lap J
//   4 u^{-1}(|grad u|^2 + lambda) |E|^2
//   5 u J Lap J            6 u |grad J|^2

constexpr int kIntegrandTerms = 7;
using IntegrandVector = std::array<Rational, kIntegrandTerms>;

std::string integrand_term_name(int k);
std::string to_string(const IntegrandVector& v);

struct IbpIdentities {
  IntegrandVector tf_jp;
  IntegrandVector jp_q;
  IntegrandVector nabla_j;
};

/// The three integrated identities as transcribed.
IbpIdentities ibp_identities(const Rational& n, const Rational& a);

/// The same identities rebuilt from the divergence formulas, the pairing
/// against an Einstein scale, and I_{a,0} written through E.
IbpIdentities derive_ibp_identities(const Rational& n, const Rational& a);

struct CombinationCheck {
  bool transcription = false;  // ibp_identities == derive_ibp_identities
  bool step_i = false;         // cancel Lap J terms, integrate u J Lap J by parts
  bool step_ii = false;        // cancel <J grad J, grad u>
  bool step_iii = false;       // Cauchy-Schwarz bookkeeping reproduces C(n, a)
  IntegrandVector after_i;
  IntegrandVector after_ii;

  bool pass() const { return transcription && step_i && step_ii && step_iii; }
};

CombinationCheck verify_combination_coefficients(const Rational& n, const Rational& a);

/// C(n,a) = n(a+4)(n-1)^2 - (3n-4+(n-1)a)^2 as polynomials in (n, a).
bool c_poly_identity_holds();

}  // namespace curvlab
