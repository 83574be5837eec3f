#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace divtower {

// Signed letter code: generator i is +(i+1), its inverse is -(i+1).
using Code = std::int32_t;
using Codes = std::vector<Code>;

inline constexpr std::size_t kDefaultWordCap = 1'000'000;

inline Code code_of(std::size_t index, int sign) {
  return sign > 0 ? static_cast<Code>(index + 1) : -static_cast<Code>(index + 1);
}
inline std::size_t index_of(Code c) { return static_cast<std::size_t>(c > 0 ? c : -c) - 1; }
inline int sign_of(Code c) { return c > 0 ? 1 : -1; }

class AlphabetMismatch : public std::invalid_argument {
 public:
  AlphabetMismatch() : std::invalid_argument("words over different alphabets") {}
};

class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::size_t cap, std::size_t attempted)
      : std::runtime_error("word length cap " + std::to_string(cap) + " exceeded (" +
                           std::to_string(attempted) + " letters)"),
        cap_(cap),
        attempted_(attempted) {}
  std::size_t cap() const { return cap_; }
  std::size_t attempted() const { return attempted_; }

 private:
  std::size_t cap_;
  std::size_t attempted_;
};

class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index(std::string_view name) const;

  bool operator==(const Alphabet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

AlphabetPtr make_alphabet(std::vector<std::string> names);

struct Letter {
  std::size_t index;
  int sign;
  Code code() const { return code_of(index, sign); }
  Letter inverse() const { return {index, -sign}; }
  bool operator==(const Letter&) const = default;
};

// Freely reduced word. The empty word is the identity.
class Word {
 public:
  Word() = default;
  explicit Word(AlphabetPtr alphabet) : alphabet_(std::move(alphabet)) {}

  static Word reduce(AlphabetPtr alphabet, const std::vector<Letter>& raw);
  static Word from_codes(AlphabetPtr alphabet, Codes raw);

  const AlphabetPtr& alphabet() const { return alphabet_; }
  const Codes& codes() const { return codes_; }
  std::size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }
  Letter letter(std::size_t i) const {
    return {index_of(codes_[i]), sign_of(codes_[i])};
  }
  std::vector<Letter> letters() const;

  bool operator==(const Word& other) const;

 private:
  AlphabetPtr alphabet_;
  Codes codes_;
};

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b);

Word concat(const Word& u, const Word& v);
Word invert(const Word& u);
bool is_palindrome(const Word& u);
std::vector<std::int64_t> abelianize(const Word& u);

// Raw code helpers used on hot paths.
void reduce_codes(Codes& w);
Codes invert_codes(const Codes& w);
void append_reduced(Codes& w, const Codes& tail);
void check_cap(std::size_t length, std::size_t cap);

// Text syntax: names separated by whitespace or a middle dot, optional
// suffix "^-1" or "^k" for an integer power.
Word parse_word(const AlphabetPtr& alphabet, std::string_view text);
std::string format_word(const Word& w);
std::string format_codes(const Alphabet& alphabet, const Codes& w);

// Token-level parse without an alphabet: (name, exponent) pairs.
std::vector<std::pair<std::string, std::int64_t>> tokenize_word(std::string_view text);

}  // namespace divtower
