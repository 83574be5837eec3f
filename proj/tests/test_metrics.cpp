#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "divtower/metrics.hpp"

using namespace divtower;

namespace {

SpecPtr lattice2() { return make_product("Z2", {make_free("X", {"u"}), make_free("Y", {"v"})}); }

// Fiber element of a word over d1 d2 t with zero t-exponent, computed by
// conjugating each fiber letter by its prefix t-power.
std::optional<Codes> fiber_element(const Codes& w) {
  const FreeEndo phi = phi_endo();
  const FreeEndo inv = phi_inverse_endo();
  std::int64_t k = 0;
  Codes out;
  for (Code c : w) {
    if (index_of(c) == 2) {
      k += sign_of(c);
      continue;
    }
    Codes letter{code_of(index_of(c), sign_of(c))};
    for (std::int64_t j = 0; j < (k > 0 ? k : -k); ++j) letter = apply_codes(k > 0 ? phi : inv, letter);
    append_reduced(out, letter);
  }
  if (k != 0) return std::nullopt;
  return out;
}

}  // namespace

TEST_CASE("ball sizes") {
  Solver f2(make_free("F", {"a", "b"}));
  CHECK(ball(f2, 2, 1000).size() == 17);
  Solver z2(lattice2());
  auto b = ball(z2, 2, 1000);
  std::size_t lattice = 0;
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y) lattice += (std::abs(x) + std::abs(y) <= 2);
  CHECK(b.size() == lattice);
  Solver g1(build_G(1));
  CHECK(ball(g1, 1, 1000).size() == 1 + 2 * g1.alphabet()->size());
  // T = {d1, d2, t}, three rank-2 letter sets, two macro sets, and s1.
  std::set<std::string> union_of{"d1", "d2", "t", "x1", "x2", "y1", "y2", "z1",
                                 "z2", "a1", "a2", "b1", "b2", "s1"};
  CHECK(g1.alphabet()->size() == union_of.size());
  CHECK_THROWS_AS(ball(f2, 3, 20), PartialBall);
}

TEST_CASE("ball words are geodesic representatives") {
  Solver g2(build_G(2));
  auto b = ball(g2, 2, 100000);
  for (std::size_t i = 0; i < b.size(); ++i) {
    Word w = b.word_of(i);
    CHECK(w.size() == b.dist[i]);
    CHECK(g2.normalize(w).encoding == b.keys[i]);
  }
}

TEST_CASE("retractions are homomorphisms with short generator images") {
  for (int m = 1; m <= 4; ++m) {
    for (auto spec : {build_G(m), build_B(m)}) {
      Solver s(spec);
      auto rs = standard_retractions(s, 3);
      CHECK(!rs.empty());
      for (const auto& r : rs) {
        auto bad = retraction_defects(s, *r);
        const std::string label = r->name() + " m=" + std::to_string(m);
        CHECK_MESSAGE(bad.empty(), label);
      }
    }
  }
}

TEST_CASE("retraction lower bounds") {
  Solver g2(build_G(2));
  auto rs = standard_retractions(g2);
  CHECK(retract_lower_bound(rs, g2.parse("s1^3 s2^4")) == 7);
  CHECK(retract_lower_bound(rs, g2.parse("")) == 0);
  Solver g1(build_G(1));
  auto r1 = standard_retractions(g1);
  CHECK(retract_lower_bound(r1, g1.parse("a1 a2 d1")) >= 2);
  CHECK(certified_length(r1, g1.parse("s1^5")) == 5);
}

TEST_CASE("retraction bound never exceeds ball distance") {
  Solver g2(build_G(2));
  auto rs = standard_retractions(g2);
  auto b = ball(g2, 2, 100000);
  for (std::size_t i = 0; i < b.size(); ++i)
    CHECK(retract_lower_bound(rs, b.word_of(i)) <= b.dist[i]);
}

TEST_CASE("retraction images commute with normal forms") {
  Solver g3(build_G(3));
  auto rs = standard_retractions(g3);
  auto b = ball(g3, 2, 100000);
  // Equal elements have equal images: compare ball words against a shuffled route.
  for (std::size_t i = 0; i < b.size(); ++i) {
    Word w = b.word_of(i);
    Word round = concat(concat(w, g3.parse("s3^-1 s1 s3 s2^-1")), g3.parse(""));
    for (const auto& r : rs) CHECK(r->length_of(w) == r->length_of(round));
  }
}

TEST_CASE("fiber distortion agrees with brute-force enumeration") {
  auto base = phi_base(1);
  Solver h(base.H);
  auto o = h.oracle(make_free("F", {"a", "b"}), base.fiber);
  const std::size_t n = 5;
  auto t = distortion(h, o, n, 1'000'000);
  std::vector<std::int64_t> brute(n + 1, 0);
  std::vector<Codes> layer{{}};
  for (std::size_t len = 1; len <= n; ++len) {
    std::vector<Codes> next;
    for (const auto& w : layer)
      for (std::size_t g = 0; g < 3; ++g)
        for (int s : {1, -1}) {
          Codes v = w;
          v.push_back(code_of(g, s));
          if (auto f = fiber_element(v))
            brute[len] = std::max<std::int64_t>(brute[len], static_cast<std::int64_t>(f->size()));
          next.push_back(std::move(v));
        }
    layer = std::move(next);
  }
  for (std::size_t k = 1; k <= n; ++k) brute[k] = std::max(brute[k], brute[k - 1]);
  CHECK(t.raw == brute);
  CHECK(t.raw[0] == 0);
  CHECK(t.raw[3] >= 3);
}

TEST_CASE("membership oracle examples") {
  auto base = phi_base(1);
  Solver h(base.H);
  auto o = h.oracle(make_free("F", {"a", "b"}), base.fiber);
  auto w = h.membership(o, h.parse("t d1 t^-1"));
  REQUIRE(w);
  CHECK(format_word(*w) == "a b a");
  CHECK(!h.membership(o, h.parse("t d1")));

  auto P = make_product("P", {make_free("X", {"x1", "x2"}), make_free("Y", {"y1", "y2"}),
                              make_free("Z", {"z1", "z2"})});
  Solver p(P);
  EdgeEmbedding skew{OracleTag::SkewDiagonalInProduct, {"x1 y1^-1", "x2 y2^-1"}};
  auto so = p.oracle(make_free("E", {"d1", "d2"}), skew);
  auto sw = p.membership(so, p.parse("x1 x2 y1^-1 y2^-1"));
  REQUIRE(sw);
  CHECK(format_word(*sw) == "d1 d2");
  CHECK(!p.membership(so, p.parse("x1 x2 y2^-1 y1^-1")));
  EdgeEmbedding diag{OracleTag::DiagonalInProduct, {"x1 z1", "x2 z2"}};
  auto dg = p.oracle(make_free("E", {"e1", "e2"}), diag);
  CHECK(!p.membership(dg, p.parse("x1 z2")));
  auto dw = p.membership(dg, p.parse("z1 x1 x2^-1 z2^-1"));
  REQUIRE(dw);
  CHECK(format_word(*dw) == "e1 e2^-1");
}

TEST_CASE("oracle soundness and completeness against enumeration") {
  auto base = phi_base(1);
  Solver h(base.H);
  auto o = h.oracle(make_free("F", {"a", "b"}), base.fiber);
  auto b = ball(h, 4, 1'000'000);
  for (std::size_t i = 0; i < b.size(); ++i) {
    Word w = b.word_of(i);
    auto pre = h.membership(o, w);
    auto brute = fiber_element(w.codes());
    CHECK(pre.has_value() == brute.has_value());
    if (pre && brute) CHECK(pre->codes() == *brute);
  }
}

TEST_CASE("inverse distortion") {
  auto id = InverseDistortion::identity();
  CHECK(id(7.5) == doctest::Approx(7.5));
  auto f = InverseDistortion::from_table({0, 2, 4, 8, 14});
  CHECK(f(8) == doctest::Approx(3));
  CHECK(f(3) == doctest::Approx(1.5));
  CHECK(!f.extrapolated(14));
  CHECK(f.extrapolated(15));
  CHECK_THROWS(InverseDistortion::from_table({0, 2, 2}));
  auto pw = InverseDistortion::power(2);
  CHECK(pw(49) == doctest::Approx(7));
  auto ex = InverseDistortion::exponential(2);
  CHECK(ex(1023 + 10) == doctest::Approx(10).epsilon(1e-6));
  for (double r = 1; r < 500; r += 3.5) {
    CHECK(f(r) <= r + 1e-9);
    CHECK(ex(r) <= r + 1e-9);
    CHECK(InverseDistortion::phi_envelope()(r) <= r + 1e-9);
  }
}

TEST_CASE("phi envelope bounds the normalized fiber distortion") {
  auto base = phi_base(1);
  Solver h(base.H);
  auto o = h.oracle(make_free("F", {"a", "b"}), base.fiber);
  auto t = distortion(h, o, 6, 2'000'000);
  auto env = InverseDistortion::phi_envelope();
  auto tf = InverseDistortion::from_table(t.normalized);
  for (std::size_t n = 0; n < t.normalized.size(); ++n) {
    CHECK(env.dist(static_cast<double>(n)) >= static_cast<double>(t.normalized[n]));
    CHECK(tf(static_cast<double>(t.normalized[n])) == doctest::Approx(static_cast<double>(n)));
  }
}

TEST_CASE("right multiplication agrees with the image of the extended word") {
  std::mt19937 rng(5);
  for (int m = 1; m <= 3; ++m) {
    Solver s(build_G(m));
    auto rs = standard_retractions(s);
    std::uniform_int_distribution<std::size_t> gen(0, s.alphabet()->size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
      Codes w;
      for (int i = 0; i < 12; ++i) w.push_back(code_of(gen(rng), trial % 3 == i % 3 ? -1 : 1));
      Word prefix = Word::from_codes(s.alphabet(), Codes(w.begin(), w.begin() + 6));
      for (const auto& r : rs) {
        RetImage img = r->image(prefix);
        for (std::size_t i = 6; i < w.size(); ++i) r->rmul(w[i], img);
        CHECK(r->length(img) == r->length_of(Word::from_codes(s.alphabet(), w)));
      }
    }
  }
}
