#include "doctest.h"

#include <cmath>

#include "divtower/certificates.hpp"

using namespace divtower;

namespace {

// |phi^n(a)| by the recurrence (A, B) -> (2A + B, A) on letter counts.
std::vector<double> phi_lengths(unsigned n_max) {
  std::vector<double> out;
  double a = 1, b = 0;
  for (unsigned n = 1; n <= n_max; ++n) {
    double na = 2 * a + b, nb = a;
    a = na;
    b = nb;
    out.push_back(a + b);
  }
  return out;
}

std::vector<std::int64_t> small_table() {
  auto base = phi_base(1);
  Solver h(base.H);
  auto o = h.oracle(make_free("F", {"a", "b"}), base.fiber);
  return distortion(h, o, 5, 1'000'000).normalized;
}

}  // namespace

TEST_CASE("phi certificate data") {
  auto seq = phi_certificates(25);
  auto oracle = phi_lengths(25);
  REQUIRE(seq.elems.size() == 25);
  CHECK(seq.elems[0].r_length == 3);
  CHECK(seq.elems[0].t_length == 3);
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(seq.elems[i].r_length.convert_to<double>() == oracle[i]);
    CHECK(seq.elems[i].r_length >= BigInt(1) << (i + 1));
    if (i + 1 < 25) CHECK(seq.elems[i + 1].r_length <= 3 * seq.elems[i].r_length);
    if (i < 12) CHECK(seq.elems[i].palindrome == true);
  }
}

TEST_CASE("certificate verification") {
  auto table = small_table();
  auto seq = phi_certificates(25);
  auto rep = verify_certificate(seq, 3, table);
  CHECK(rep.condition1);
  CHECK(rep.condition2);
  CHECK(rep.condition3);
  CHECK(rep.passed());
  CHECK(rep.rows[0].tier == Tier::Table);
  CHECK(rep.rows[0].dist_lhs == doctest::Approx(double(table[1])));
  CHECK(rep.rows[24].tier == Tier::Surrogate);
  CHECK_THROWS(verify_certificate(seq, 1, table));

  CertificateSequence constant;
  constant.family = "explicit";
  for (unsigned i = 1; i <= 5; ++i) constant.elems.push_back({i, 1, 1, "d1", true});
  CHECK(!verify_certificate(constant, 3, table).condition1);
}

TEST_CASE("derived constants") {
  auto seq = phi_certificates(25);
  auto rep = verify_certificate(seq, 3, small_table());
  auto k = derived_constants(seq, rep);
  CHECK(k.D == 27);
  CHECK(k.r0 == 9);
  CertificateReport two = rep;
  two.C = 2;
  CHECK(derived_constants(seq, two).D == 8);
  CertificateSequence one;
  one.elems.push_back({1, 1, 1, "d1", true});
  CHECK(derived_constants(one, two).r0 == 2);
  CertificateReport failed = rep;
  failed.condition1 = false;
  CHECK_THROWS(derived_constants(seq, failed));
}

TEST_CASE("certificate selection") {
  auto table = small_table();
  auto seq = phi_certificates(25);
  auto k = derived_constants(seq, verify_certificate(seq, 3, table));
  auto f = InverseDistortion::from_table(table);
  auto s0 = select_certificate(seq, k, 9, f);
  CHECK(s0.r_length >= 9.0 / 27);
  CHECK(s0.r_length <= 9);
  CHECK(s0.lower_ok);
  CHECK(s0.upper_ok);
  CHECK(s0.t_ok);
  CHECK_THROWS(select_certificate(seq, k, 8.99, f));
  double prev = 0;
  auto env = InverseDistortion::phi_envelope();
  for (int r = 9; r <= 200; ++r) {
    auto s = select_certificate(seq, k, r, env);
    CHECK(s.r_length >= prev);
    prev = s.r_length;
    CHECK(s.lower_ok);
    CHECK(s.upper_ok);
    CHECK(s.t_ok);
  }
}

TEST_CASE("snowflake exponents") {
  const double rho = std::log(1 + std::sqrt(2.0));
  auto bad = snowflake_exponent(3, 1);
  CHECK(bad.beta == doctest::Approx(rho / std::log(3.0)));
  CHECK(bad.beta == doctest::Approx(0.802).epsilon(1e-3));
  CHECK(!bad.beta_valid);
  CHECK(!bad.warning.empty());
  auto good = snowflake_exponent(2, 1);
  CHECK(good.beta == doctest::Approx(1.272).epsilon(1e-3));
  CHECK(good.alpha[2] == doctest::Approx(2 + 1 / good.beta));
  CHECK(good.alpha[2] == doctest::Approx(2.786).epsilon(1e-3));
  CHECK(uncovered(beta_values(50, 50), 1, 10, 0.1).empty());
  CHECK(uncovered(alpha_values(50, 50, 10), 2, 10, 0.1).empty());
}

TEST_CASE("snowflake length data") {
  auto seq = snowflake_certificates(2, 1, 10);
  auto oracle = phi_lengths(10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(seq.elems[i].r_length.convert_to<double>() == oracle[i]);
    CHECK(seq.elems[i].t_length == std::llround(std::pow(2.0, double(i + 1))));
  }
}
