#include "doctest.h"

#include <random>

#include "divtower/normal_form.hpp"

using namespace divtower;

namespace {

Word random_word(const AlphabetPtr& a, std::mt19937& rng, std::size_t len) {
  std::uniform_int_distribution<std::size_t> gen(0, a->size() - 1);
  std::uniform_int_distribution<int> sign(0, 1);
  Codes raw;
  for (std::size_t i = 0; i < len; ++i) raw.push_back(code_of(gen(rng), sign(rng) ? 1 : -1));
  return Word::from_codes(a, raw);
}

}  // namespace

TEST_CASE("tower examples") {
  Solver g2(build_G(2));
  CHECK(g2.is_identity(g2.parse("s2^-1 a1 s2 b1^-1")));
  CHECK(!g2.is_identity(g2.parse("s2^-1 x1 s2 y1^-1")));
  CHECK(g2.is_identity(g2.parse("t d1 t^-1 d1^-1 d2^-1 d1^-1")));
  CHECK(g2.is_identity(g2.parse("d1 y1 x1^-1")));
  CHECK(!g2.is_identity(g2.parse("d1 x1^-1 y1 d2^-1")));
  CHECK(g2.is_identity(g2.parse("d1 d2 y2 x2^-1 y1 x1^-1")));
  Solver g3(build_G(3));
  CHECK(g3.is_identity(g3.parse("s3^-1 s1 s3 s2^-1")));
  CHECK(!g3.is_identity(g3.parse("s3^-1 s2 s3 s1^-1")));
}

TEST_CASE("relators vanish in every tower") {
  for (int m = 1; m <= 4; ++m) {
    for (auto spec : {build_G(m), build_B(m)}) {
      Solver s(spec);
      for (const auto& r : relators(*spec)) CHECK_MESSAGE(s.is_identity(r), format_word(r));
    }
  }
}

TEST_CASE("conjugated relators vanish and normal forms are canonical") {
  std::mt19937 rng(7);
  for (int m = 1; m <= 3; ++m) {
    auto spec = build_G(m);
    Solver s(spec);
    auto rels = relators(*spec);
    std::uniform_int_distribution<std::size_t> pick(0, rels.size() - 1);
    for (int trial = 0; trial < 60; ++trial) {
      Word u = random_word(s.alphabet(), rng, 8);
      Word v = random_word(s.alphabet(), rng, 8);
      Word r = rels[pick(rng)];
      Word lhs = concat(concat(u, r), v);
      Word rhs = concat(u, v);
      CHECK(s.normalize(lhs).encoding == s.normalize(rhs).encoding);
      CHECK(s.is_identity(concat(concat(u, r), invert(u))));
    }
  }
}

TEST_CASE("bulk multiplication matches letter by letter") {
  std::mt19937 rng(11);
  for (int m = 1; m <= 3; ++m) {
    Solver s(build_G(m));
    for (int trial = 0; trial < 40; ++trial) {
      // Powers of single letters give long syllables.
      Codes w;
      std::uniform_int_distribution<std::size_t> gen(0, s.primitives()->size() - 1);
      std::uniform_int_distribution<int> run(1, 6);
      for (int k = 0; k < 10; ++k) {
        Code c = code_of(gen(rng), run(rng) % 2 ? 1 : -1);
        for (int j = run(rng); j > 0; --j) w.push_back(c);
      }
      Elem slow = s.identity();
      for (std::size_t i = w.size(); i-- > 0;) s.lmul(w[i], slow);
      CHECK(s.encode(s.from_primitive(w)) == s.encode(slow));
    }
  }
}
