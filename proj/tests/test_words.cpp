#include "doctest.h"

#include <functional>

#include "divtower/words.hpp"

using namespace divtower;

namespace {

AlphabetPtr ab() { return make_alphabet({"a", "b"}); }

// Every letter sequence of length <= n over two generators.
void each_raw(std::size_t n, const std::function<void(const std::vector<Letter>&)>& f) {
  std::vector<Letter> cur;
  std::function<void()> rec = [&]() {
    f(cur);
    if (cur.size() == n) return;
    for (std::size_t g = 0; g < 2; ++g)
      for (int s : {1, -1}) {
        cur.push_back({g, s});
        rec();
        cur.pop_back();
      }
  };
  rec();
}

bool reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w.codes()[i] == -w.codes()[i - 1]) return false;
  return true;
}

}  // namespace

TEST_CASE("reduce examples") {
  auto A = ab();
  CHECK(Word::reduce(A, {{0, 1}, {0, -1}}).empty());
  CHECK(format_word(Word::reduce(A, {{0, 1}, {1, 1}, {1, -1}, {0, 1}})) == "a a");
  CHECK(format_word(Word::reduce(A, {{0, 1}, {1, 1}, {0, 1}})) == "a b a");
}

TEST_CASE("concat and invert examples") {
  auto A = ab();
  CHECK(concat(parse_word(A, "a"), parse_word(A, "a^-1")).empty());
  CHECK(format_word(invert(parse_word(A, "a b"))) == "b^-1 a^-1");
  CHECK(format_word(concat(parse_word(A, "a b"), parse_word(A, "b^-1"))) == "a");
}

TEST_CASE("palindromes and abelianization") {
  auto A = ab();
  CHECK(is_palindrome(parse_word(A, "a b a")));
  CHECK(is_palindrome(parse_word(A, "a b a a a b a")));
  CHECK(!is_palindrome(parse_word(A, "a b")));
  CHECK(abelianize(Word(A)) == std::vector<std::int64_t>{0, 0});
  CHECK(abelianize(parse_word(A, "a b a")) == std::vector<std::int64_t>{2, 1});
  CHECK(abelianize(Word::reduce(A, {{0, 1}, {0, -1}})) == std::vector<std::int64_t>{0, 0});
}

TEST_CASE("exhaustive word laws up to length 6") {
  auto A = ab();
  std::vector<Word> words;
  each_raw(6, [&](const std::vector<Letter>& raw) {
    Word w = Word::reduce(A, raw);
    CHECK(reduced(w));
    CHECK(Word::reduce(A, w.letters()) == w);
    // Abelianization of the raw sequence survives reduction.
    std::vector<std::int64_t> count(2, 0);
    for (auto l : raw) count[l.index] += l.sign;
    CHECK(abelianize(w) == count);
    if (raw.size() <= 3) words.push_back(w);
  });
  for (const auto& u : words)
    for (const auto& v : words) {
      Word uv = concat(u, v);
      CHECK(uv.size() <= u.size() + v.size());
      auto au = abelianize(u), av = abelianize(v), auv = abelianize(uv);
      CHECK(auv[0] == au[0] + av[0]);
      CHECK(auv[1] == au[1] + av[1]);
    }
  for (const auto& u : words) {
    CHECK(invert(u).size() == u.size());
    CHECK(concat(u, invert(u)).empty());
    // Reading backwards letter for letter.
    Codes rev(u.codes().rbegin(), u.codes().rend());
    CHECK(is_palindrome(u) == (rev == u.codes()));
  }
}

TEST_CASE("parse syntax and errors") {
  auto A = ab();
  CHECK(parse_word(A, "a·b·a") == parse_word(A, "a b a"));
  CHECK(parse_word(A, "a^3") == parse_word(A, "a a a"));
  CHECK(parse_word(A, "b^-2") == parse_word(A, "b^-1 b^-1"));
  CHECK(parse_word(A, "").empty());
  CHECK_THROWS(parse_word(A, "c"));
  auto B = make_alphabet({"a", "b", "c"});
  CHECK_THROWS_AS(concat(parse_word(A, "a"), parse_word(B, "a")), AlphabetMismatch);
  CHECK_THROWS(make_alphabet({"a", "a"}));
}
