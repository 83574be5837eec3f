#include "divtower/words.hpp"

#include <algorithm>
#include <cctype>

namespace divtower {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw std::invalid_argument("empty generator name");
    if (!lookup_.emplace(names_[i], i).second)
      throw std::invalid_argument("duplicate generator name: " + names_[i]);
  }
}

std::optional<std::size_t> Alphabet::find(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t Alphabet::index(std::string_view name) const {
  auto i = find(name);
  if (!i) throw std::invalid_argument("unknown generator: " + std::string(name));
  return *i;
}

AlphabetPtr make_alphabet(std::vector<std::string> names) {
  return std::make_shared<const Alphabet>(std::move(names));
}

void reduce_codes(Codes& w) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (out > 0 && w[out - 1] == -w[i]) {
      --out;
    } else {
      w[out++] = w[i];
    }
  }
  w.resize(out);
}

Codes invert_codes(const Codes& w) {
  Codes r(w.rbegin(), w.rend());
  for (auto& c : r) c = -c;
  return r;
}

void append_reduced(Codes& w, const Codes& tail) {
  std::size_t i = 0;
  while (i < tail.size() && !w.empty() && w.back() == -tail[i]) {
    w.pop_back();
    ++i;
  }
  w.insert(w.end(), tail.begin() + static_cast<std::ptrdiff_t>(i), tail.end());
}

void check_cap(std::size_t length, std::size_t cap) {
  if (length > cap) throw CapExceeded(cap, length);
}

Word Word::reduce(AlphabetPtr alphabet, const std::vector<Letter>& raw) {
  Codes codes;
  codes.reserve(raw.size());
  for (const auto& l : raw) {
    if (!alphabet || l.index >= alphabet->size() || (l.sign != 1 && l.sign != -1))
      throw std::invalid_argument("letter outside alphabet");
    codes.push_back(l.code());
  }
  return from_codes(std::move(alphabet), std::move(codes));
}

Word Word::from_codes(AlphabetPtr alphabet, Codes raw) {
  for (Code c : raw) {
    if (c == 0 || !alphabet || index_of(c) >= alphabet->size())
      throw std::invalid_argument("letter outside alphabet");
  }
  reduce_codes(raw);
  Word w(std::move(alphabet));
  w.codes_ = std::move(raw);
  return w;
}

std::vector<Letter> Word::letters() const {
  std::vector<Letter> out;
  out.reserve(codes_.size());
  for (std::size_t i = 0; i < codes_.size(); ++i) out.push_back(letter(i));
  return out;
}

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool Word::operator==(const Word& other) const {
  return codes_ == other.codes_ && same_alphabet(alphabet_, other.alphabet_);
}

Word concat(const Word& u, const Word& v) {
  if (!same_alphabet(u.alphabet(), v.alphabet())) throw AlphabetMismatch();
  Codes w = u.codes();
  append_reduced(w, v.codes());
  return Word::from_codes(u.alphabet(), std::move(w));
}

Word invert(const Word& u) { return Word::from_codes(u.alphabet(), invert_codes(u.codes())); }

bool is_palindrome(const Word& u) {
  const auto& c = u.codes();
  return std::equal(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2), c.rbegin());
}

std::vector<std::int64_t> abelianize(const Word& u) {
  std::vector<std::int64_t> v(u.alphabet() ? u.alphabet()->size() : 0, 0);
  for (Code c : u.codes()) v[index_of(c)] += sign_of(c);
  return v;
}

std::vector<std::pair<std::string, std::int64_t>> tokenize_word(std::string_view text) {
  std::string s;
  s.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+00B7 middle dot is a separator, as is '*'.
    if (static_cast<unsigned char>(text[i]) == 0xC2 && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0xB7) {
      s.push_back(' ');
      ++i;
    } else if (text[i] == '*' || text[i] == '.') {
      s.push_back(' ');
    } else {
      s.push_back(text[i]);
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '^') ++j;
    std::string name = s.substr(i, j - i);
    std::int64_t power = 1;
    if (j < s.size() && s[j] == '^') {
      std::size_t k = j + 1;
      std::size_t start = k;
      if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
      while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      std::string num = s.substr(start, k - start);
      if (num.empty() || num == "-" || num == "+")
        throw std::invalid_argument("bad exponent after " + name);
      power = std::stoll(num);
      j = k;
    }
    if (name.empty()) throw std::invalid_argument("empty generator name in word");
    out.emplace_back(std::move(name), power);
    i = j;
  }
  return out;
}

Word parse_word(const AlphabetPtr& alphabet, std::string_view text) {
  Codes raw;
  for (const auto& [name, power] : tokenize_word(text)) {
    auto idx = alphabet->find(name);
    if (!idx) throw std::invalid_argument("unknown generator: " + name);
    std::int64_t n = power < 0 ? -power : power;
    for (std::int64_t k = 0; k < n; ++k) raw.push_back(code_of(*idx, power < 0 ? -1 : 1));
  }
  return Word::from_codes(alphabet, std::move(raw));
}

std::string format_codes(const Alphabet& alphabet, const Codes& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out.push_back(' ');
    out += alphabet.name(index_of(w[i]));
    if (w[i] < 0) out += "^-1";
  }
  return out;
}

std::string format_word(const Word& w) {
  if (!w.alphabet()) return {};
  return format_codes(*w.alphabet(), w.codes());
}

}  // namespace divtower
