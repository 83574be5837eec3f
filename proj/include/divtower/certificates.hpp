#pragma once

#include <optional>
#include <string>
#include <vector>

#include "divtower/endo.hpp"
#include "divtower/metrics.hpp"

namespace divtower {

struct CertificateElement {
  unsigned index = 0;
  BigInt r_length;
  // Length of the explicit witness word in the ambient generators.
  std::int64_t t_length = 0;
  std::string t_witness;
  // Set when the element was expanded explicitly.
  std::optional<bool> palindrome;
};

struct CertificateSequence {
  std::string family;  // "phi", "snowflake" or "explicit"
  unsigned phi_power = 1;
  std::vector<CertificateElement> elems;
};

// a_n = phi^n(a) for n = 1..n_max with witnesses t^n a t^-n.
// Palindromicity is checked by expansion for n <= palindrome_max.
CertificateSequence phi_certificates(unsigned n_max, unsigned phi_power = 1,
                                     unsigned palindrome_max = 12);

// Length data only: R-length |phi^(n_param * k)(a)|, T-length ceil(c2 * m_param^k).
CertificateSequence snowflake_certificates(unsigned m_param, unsigned n_param, unsigned count,
                                           double c2 = 1.0);

enum class Tier { Table, Surrogate, Unchecked };
std::string to_string(Tier t);

struct ConditionRow {
  unsigned index = 0;
  bool growth = true;  // |g_{m+1}| > |g_m|
  bool ratio = true;   // |g_{m+1}| <= C |g_m|
  bool dist = false;   // Dist(|g_m|_T / C) <= C |g_m|_R
  Tier tier = Tier::Unchecked;
  double dist_lhs = 0;
  std::optional<bool> palindrome;
};

struct CertificateReport {
  double C = 0;
  std::vector<ConditionRow> rows;
  bool condition1 = false;
  bool condition2 = false;
  bool condition3 = false;
  bool palindromic = false;  // every expanded element is a palindrome
  bool passed() const { return condition1 && condition2 && condition3 && palindromic; }
};

// normalized: Dist(n)+n table. The analytic surrogate 2^(|g|_T / C) <= |g|_R
// is used past the table for the phi family only.
CertificateReport verify_certificate(const CertificateSequence& seq, double C,
                                     const std::vector<std::int64_t>& normalized);

struct DerivedConstants {
  double C = 0;
  double D = 0;
  double r0 = 0;
};

DerivedConstants derived_constants(const CertificateSequence& seq, const CertificateReport& rep);

struct Selection {
  std::size_t position = 0;  // into seq.elems
  unsigned index = 0;
  unsigned bracket = 0;      // n with C^n |g_1| <= r <= C^(n+1) |g_1|
  double r_length = 0;
  std::int64_t t_length = 0;
  bool lower_ok = false;     // r/D <= |u|_R
  bool upper_ok = false;     // |u|_R <= r
  bool t_ok = false;         // |u|_T <= D f(r)
};

Selection select_certificate(const CertificateSequence& seq, const DerivedConstants& k, double r,
                             const InverseDistortion& f);

struct ExponentReport {
  unsigned m_param = 0;
  unsigned n_param = 0;
  double beta = 0;
  bool beta_valid = false;  // beta >= 1
  std::string warning;
  // alpha[m] = m - 1 + 1/beta for tower levels m = 1..levels.
  std::vector<double> alpha;
};

double snowflake_beta(unsigned m_param, unsigned n_param);
double divergence_exponent(int m, double beta);
ExponentReport snowflake_exponent(unsigned m_param, unsigned n_param, int levels = 6);

// Subintervals [lo + k step, lo + (k+1) step) of [lo, hi] containing no value.
std::vector<std::pair<double, double>> uncovered(const std::vector<double>& values, double lo,
                                                double hi, double step);
// All valid beta values with m_param in [2, mp_max] and n_param in [1, np_max].
std::vector<double> beta_values(unsigned mp_max, unsigned np_max);
// alpha values for tower levels 2..max_level from the valid betas.
std::vector<double> alpha_values(unsigned mp_max, unsigned np_max, int max_level);

std::string certificate_json(const CertificateSequence& seq, const CertificateReport& rep);

}  // namespace divtower
