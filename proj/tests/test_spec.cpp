#include "doctest.h"

#include <algorithm>
#include <set>

#include "divtower/inclusion.hpp"
#include "divtower/normal_form.hpp"

using namespace divtower;

namespace {

std::set<std::string> relator_texts(const GroupSpec& s) {
  std::set<std::string> out;
  for (const auto& r : relators(s)) out.insert(format_word(r));
  return out;
}

}  // namespace

TEST_CASE("G tower relators") {
  auto g1 = relator_texts(*build_G(1));
  CHECK(g1.count("x1 y2 x1^-1 y2^-1"));
  CHECK(g1.count("d1 y1 x1^-1"));
  auto g2 = relator_texts(*build_G(2));
  CHECK(g2.count("s2^-1 x1 z1 s2 z1^-1 y1^-1"));
  auto g3 = relator_texts(*build_G(3));
  CHECK(g3.count("s3^-1 s1 s3 s2^-1"));
  CHECK_THROWS(build_G(0));
  CHECK_THROWS(build_G(1, phi_base(1), 3));
}

TEST_CASE("B tower relators") {
  auto b1 = relator_texts(*build_B(1));
  CHECK(b1.count("t_d t_y^-1 t_x^-1"));
  auto b2 = relator_texts(*build_B(2));
  CHECK(b2.count("s2^-1 t_x t_z s2 t_z^-1 t_y^-1"));
  auto b3 = relator_texts(*build_B(3));
  CHECK(b3.count("s3^-1 s1 s3 s2^-1"));
  CHECK_THROWS(build_B(0));
}

TEST_CASE("generating sets grow by one level letter") {
  for (int m = 2; m <= 5; ++m) {
    auto prev = generating_set(*build_G(m - 1)).alphabet->names();
    auto cur = generating_set(*build_G(m)).alphabet->names();
    prev.push_back("s" + std::to_string(m));
    CHECK(prev == cur);
  }
  auto gs = generating_set(*build_G(1));
  auto it = std::find_if(gs.macros.begin(), gs.macros.end(),
                         [](const MacroGenerator& m) { return m.name == "a1"; });
  REQUIRE(it != gs.macros.end());
  CHECK(it->expansion == "x1 z1");
}

TEST_CASE("second-level edge images are the macro letters") {
  auto g2 = build_G(2);
  CHECK(g2->embeddings[0].images == std::vector<std::string>{"x1 z1", "x2 z2"});
  CHECK(g2->embeddings[1].images == std::vector<std::string>{"y1 z1", "y2 z2"});
  auto gs = generating_set(*g2);
  for (const auto& m : gs.macros) {
    if (m.name[0] == 'a') CHECK(std::count(g2->embeddings[0].images.begin(),
                                           g2->embeddings[0].images.end(), m.expansion) == 1);
    if (m.name[0] == 'b') CHECK(std::count(g2->embeddings[1].images.begin(),
                                           g2->embeddings[1].images.end(), m.expansion) == 1);
  }
}

TEST_CASE("inclusion map") {
  auto g = build_G(2), b = build_B(2);
  auto map = inclusion_map(*g, *b);
  CHECK(map.at("d1") == "d1");
  CHECK(map.at("t") == "t_d s");
  CHECK(map.at("s2") == "s2");
  CHECK_THROWS(inclusion_map(*build_G(2), *build_B(3)));
  CHECK_THROWS(inclusion_map(*build_G(2, 2), *build_B(2, 1)));
}

TEST_CASE("G relators vanish in B") {
  for (int m = 1; m <= 4; ++m) {
    auto g = build_G(m), b = build_B(m);
    Solver sb(b);
    auto map = inclusion_map(*g, *b);
    for (const auto& r : relators(*g)) {
      Word img = map_word(r, map, sb.alphabet());
      CHECK_MESSAGE(sb.is_identity(img), format_word(r));
    }
  }
}

TEST_CASE("spec JSON round trip is bit exact") {
  for (auto s : {build_G(1), build_G(3), build_B(2), build_G(2, 2)}) {
    std::string j = spec_to_json(*s);
    auto back = spec_from_json(j);
    CHECK(spec_to_json(*back) == j);
    CHECK(relator_texts(*back) == relator_texts(*s));
  }
}

TEST_CASE("snowflake base is representable but refused by the solver") {
  auto g = build_G(2, snowflake_base(2, 1), 2);
  CHECK(g->meta.at("flag") == "no-word-problem");
  CHECK_THROWS_AS(Solver{g}, UnsupportedBase);
}

TEST_CASE("inclusion sampling") {
  auto a = sample_inclusion(1, 30, 3, 42);
  CHECK(a.relators == relators(*build_G(1)).size());
  CHECK(a.samples == 30);
  CHECK(a.draws >= 30);
  CHECK(a.passed());
  auto b = sample_inclusion(1, 30, 3, 42);
  CHECK(inclusion_json(a) == inclusion_json(b));
  CHECK(sample_inclusion(1, 30, 3, 43).draws >= 30);
  CHECK_THROWS(sample_inclusion(1, 5, 0, 1));
}
