#include "divtower/endo.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>

namespace divtower {

FreeEndo::FreeEndo(AlphabetPtr alphabet, std::vector<Word> images)
    : alphabet_(std::move(alphabet)), images_(std::move(images)) {
  if (!alphabet_ || images_.size() != alphabet_->size())
    throw std::invalid_argument("endomorphism needs one image per generator");
  for (const auto& w : images_)
    if (!same_alphabet(w.alphabet(), alphabet_)) throw AlphabetMismatch();
}

FreeEndo FreeEndo::identity(AlphabetPtr alphabet) {
  std::vector<Word> images;
  for (std::size_t i = 0; i < alphabet->size(); ++i)
    images.push_back(Word::from_codes(alphabet, {code_of(i, 1)}));
  return FreeEndo(alphabet, std::move(images));
}

FreeEndo FreeEndo::parse(AlphabetPtr alphabet, std::string_view text) {
  std::vector<std::optional<Word>> images(alphabet->size());
  std::string entry;
  std::string all(text);
  for (char& c : all)
    if (c == ';') c = '\n';
  std::istringstream in(all);
  while (std::getline(in, entry)) {
    auto arrow = entry.find("->");
    if (arrow == std::string::npos) {
      if (entry.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::invalid_argument("endomorphism entry without '->': " + entry);
    }
    std::string lhs = entry.substr(0, arrow);
    lhs.erase(0, lhs.find_first_not_of(" \t"));
    lhs.erase(lhs.find_last_not_of(" \t\r") + 1);
    std::size_t g = alphabet->index(lhs);
    if (images[g]) throw std::invalid_argument("generator mapped twice: " + lhs);
    images[g] = parse_word(alphabet, entry.substr(arrow + 2));
  }
  std::vector<Word> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!images[i]) throw std::invalid_argument("missing image for " + alphabet->name(i));
    out.push_back(*images[i]);
  }
  return FreeEndo(alphabet, std::move(out));
}

bool FreeEndo::is_positive() const {
  for (const auto& w : images_)
    for (Code c : w.codes())
      if (c < 0) return false;
  return true;
}

std::string FreeEndo::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (i) out += "; ";
    out += alphabet_->name(i) + " -> " + format_word(images_[i]);
  }
  return out;
}

Codes apply_codes(const FreeEndo& e, const Codes& w, std::size_t cap) {
  Codes out;
  for (Code c : w) {
    const Codes& img = e.image(index_of(c)).codes();
    if (c > 0) {
      append_reduced(out, img);
    } else {
      append_reduced(out, invert_codes(img));
    }
    if (out.size() > cap) {
      std::optional<BigInt> exact;
      bool positive_word = true;
      for (Code d : w) positive_word = positive_word && d > 0;
      if (positive_word && e.is_positive()) {
        BigInt total = 0;
        for (Code d : w) total += e.image(index_of(d)).size();
        exact = total;
      }
      throw CappedResult(cap, out.size(), exact);
    }
  }
  return out;
}

Word apply(const FreeEndo& e, const Word& w, std::size_t cap) {
  if (!same_alphabet(e.alphabet(), w.alphabet())) throw AlphabetMismatch();
  return Word::from_codes(e.alphabet(), apply_codes(e, w.codes(), cap));
}

FreeEndo compose(const FreeEndo& outer, const FreeEndo& inner, std::size_t cap) {
  if (!same_alphabet(outer.alphabet(), inner.alphabet())) throw AlphabetMismatch();
  std::vector<Word> images;
  for (const auto& w : inner.images()) images.push_back(apply(outer, w, cap));
  return FreeEndo(outer.alphabet(), std::move(images));
}

FreeEndo power(const FreeEndo& e, unsigned n, std::size_t cap) {
  FreeEndo out = FreeEndo::identity(e.alphabet());
  for (unsigned k = 0; k < n; ++k) out = compose(e, out, cap);
  return out;
}

bool is_palindromic_endo(const FreeEndo& e) {
  for (const auto& w : e.images())
    if (!is_palindrome(w)) return false;
  return true;
}

bool is_inverse_pair(const FreeEndo& e, const FreeEndo& f) {
  auto id = FreeEndo::identity(e.alphabet());
  return compose(e, f) == id && compose(f, e) == id;
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> transition_matrix(const FreeEndo& e) {
  const auto n = static_cast<Eigen::Index>(e.alphabet()->size());
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> m =
      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Code c : e.image(static_cast<std::size_t>(j)).codes())
      m(static_cast<Eigen::Index>(index_of(c)), j) += 1;
  return m;
}

double spectral_radius(const FreeEndo& e) {
  Eigen::MatrixXd m = transition_matrix(e).cast<double>();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

IterImage iterate(const FreeEndo& e, Letter base, unsigned n, std::size_t cap) {
  if (base.index >= e.alphabet()->size()) throw std::invalid_argument("base letter outside alphabet");
  if (e.is_positive()) {
    // No cancellation in positive images, so the letter count is the reduced length.
    auto m = transition_matrix(e);
    const std::size_t k = e.alphabet()->size();
    std::vector<BigInt> counts(k, 0);
    counts[base.index] = 1;
    for (unsigned step = 0; step < n; ++step) {
      std::vector<BigInt> next(k, 0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          if (auto mij = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
            next[i] += BigInt(mij) * counts[j];
      counts = std::move(next);
    }
    BigInt total = 0;
    for (const auto& c : counts) total += c;
    return {e, base, n, total};
  }
  Codes w{base.code()};
  try {
    for (unsigned step = 0; step < n; ++step) w = apply_codes(e, w, cap);
  } catch (const CapExceeded&) {
    throw UnsupportedCompression();
  }
  return {e, base, n, BigInt(w.size())};
}

Word expand(const IterImage& it, std::size_t cap) {
  Codes w{it.base.code()};
  for (unsigned step = 0; step < it.depth; ++step) {
    try {
      w = apply_codes(it.endo, w, cap);
    } catch (const CapExceeded& ex) {
      throw CappedResult(cap, ex.attempted(), it.exact_length);
    }
  }
  return Word::from_codes(it.endo.alphabet(), std::move(w));
}

FreeEndo phi_endo() {
  auto ab = make_alphabet({"a", "b"});
  return FreeEndo::parse(ab, "a -> a b a; b -> a");
}

FreeEndo phi_inverse_endo() {
  auto ab = make_alphabet({"a", "b"});
  return FreeEndo::parse(ab, "a -> b; b -> b^-1 a b^-1");
}

}  // namespace divtower
