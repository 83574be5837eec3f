#include "doctest.h"

#include <cmath>

#include "divtower/endo.hpp"

using namespace divtower;

namespace {

// Hand expansion: substitute every letter of a positive word.
std::string substitute(const std::string& w) {
  std::string out;
  for (char c : w) out += c == 'a' ? "aba" : "a";
  return out;
}

std::string letters(const Word& w) {
  std::string out;
  for (auto l : w.letters()) out += w.alphabet()->name(l.index);
  return out;
}

}  // namespace

TEST_CASE("phi images") {
  auto phi = phi_endo();
  auto A = phi.alphabet();
  CHECK(format_word(apply(phi, parse_word(A, "a"))) == "a b a");
  CHECK(apply(phi, Word(A)).empty());
  CHECK(letters(apply(phi, apply(phi, parse_word(A, "a")))) == substitute(substitute("a")));
  CHECK(letters(apply(phi, apply(phi, parse_word(A, "a")))) == "abaaaba");
}

TEST_CASE("iterate lengths") {
  auto phi = phi_endo();
  CHECK(iterate(phi, {0, 1}, 1).exact_length == 3);
  CHECK(iterate(phi, {0, 1}, 2).exact_length == 7);
  for (unsigned n = 0; n <= 25; ++n)
    CHECK(iterate(phi, {0, 1}, n).exact_length >= BigInt(1) << n);
  std::string w = "a";
  for (unsigned n = 1; n <= 12; ++n) {
    w = substitute(w);
    auto it = iterate(phi, {0, 1}, n);
    CHECK(it.exact_length == BigInt(w.size()));
    CHECK(letters(expand(it)) == w);
    CHECK(is_palindrome(expand(it)));
    CHECK(is_palindrome(expand(iterate(phi, {1, 1}, n))));
  }
}

TEST_CASE("palindromic endomorphisms") {
  auto A = make_alphabet({"a", "b"});
  CHECK(is_palindromic_endo(phi_endo()));
  CHECK(!is_palindromic_endo(FreeEndo::parse(A, "a -> a b; b -> a")));
  CHECK(is_palindromic_endo(FreeEndo::identity(A)));
}

TEST_CASE("composition") {
  auto phi = phi_endo();
  auto A = phi.alphabet();
  CHECK(compose(phi, FreeEndo::identity(A)) == phi);
  CHECK(format_word(apply(compose(phi, phi), parse_word(A, "b"))) == "a b a");
  CHECK(is_inverse_pair(phi, phi_inverse_endo()));
  // Exhaustive over words of length <= 4.
  std::vector<Codes> layer{{}};
  auto phi2 = compose(phi, phi);
  for (int len = 0; len <= 4; ++len) {
    std::vector<Codes> next;
    for (const auto& c : layer) {
      Word w = Word::from_codes(A, c);
      CHECK(apply(phi2, w) == apply(phi, apply(phi, w)));
      CHECK(apply(phi, concat(w, parse_word(A, "b a^-1"))) ==
            concat(apply(phi, w), apply(phi, parse_word(A, "b a^-1"))));
      for (Code x : {1, -1, 2, -2}) {
        Codes d = c;
        d.push_back(x);
        next.push_back(d);
      }
    }
    layer = std::move(next);
  }
}

TEST_CASE("transition matrix and growth rate") {
  auto m = transition_matrix(phi_endo());
  CHECK(m(0, 0) == 2);
  CHECK(m(0, 1) == 1);
  CHECK(m(1, 0) == 1);
  CHECK(m(1, 1) == 0);
  CHECK(spectral_radius(phi_endo()) == doctest::Approx(1 + std::sqrt(2.0)));
  auto l15 = iterate(phi_endo(), {0, 1}, 15).exact_length.convert_to<double>();
  auto l14 = iterate(phi_endo(), {0, 1}, 14).exact_length.convert_to<double>();
  CHECK(std::abs(l15 / l14 - (1 + std::sqrt(2.0))) < 0.01 * (1 + std::sqrt(2.0)));
}

TEST_CASE("caps") {
  auto phi = phi_endo();
  auto it = iterate(phi, {0, 1}, 40);
  try {
    expand(it, 1000);
    FAIL("expected cap");
  } catch (const CappedResult& e) {
    REQUIRE(e.exact_length());
    CHECK(*e.exact_length() == it.exact_length);
  }
  auto A = phi.alphabet();
  auto neg = FreeEndo::parse(A, "a -> a b^-1 a; b -> a a");
  CHECK_THROWS_AS(iterate(neg, {0, 1}, 40, 1000), UnsupportedCompression);
}
