#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "divtower/words.hpp"

namespace divtower {

using BigInt = boost::multiprecision::cpp_int;

// Free-group endomorphism given by generator images.
class FreeEndo {
 public:
  FreeEndo(AlphabetPtr alphabet, std::vector<Word> images);

  static FreeEndo identity(AlphabetPtr alphabet);
  // One line (or ';'-separated entry) per generator: "g -> word".
  static FreeEndo parse(AlphabetPtr alphabet, std::string_view text);

  const AlphabetPtr& alphabet() const { return alphabet_; }
  const Word& image(std::size_t i) const { return images_.at(i); }
  const std::vector<Word>& images() const { return images_; }
  bool is_positive() const;
  std::string to_string() const;

  bool operator==(const FreeEndo& other) const { return images_ == other.images_; }

 private:
  AlphabetPtr alphabet_;
  std::vector<Word> images_;
};

class CappedResult : public CapExceeded {
 public:
  CappedResult(std::size_t cap, std::size_t attempted, std::optional<BigInt> exact)
      : CapExceeded(cap, attempted), exact_(std::move(exact)) {}
  const std::optional<BigInt>& exact_length() const { return exact_; }

 private:
  std::optional<BigInt> exact_;
};

class UnsupportedCompression : public std::runtime_error {
 public:
  UnsupportedCompression()
      : std::runtime_error("compressed evaluation needs a positive endomorphism") {}
};

Word apply(const FreeEndo& e, const Word& w, std::size_t cap = kDefaultWordCap);
// Image of a raw code word whose letters index e's alphabet; result reduced.
Codes apply_codes(const FreeEndo& e, const Codes& w, std::size_t cap = kDefaultWordCap);

FreeEndo compose(const FreeEndo& outer, const FreeEndo& inner, std::size_t cap = kDefaultWordCap);
FreeEndo power(const FreeEndo& e, unsigned n, std::size_t cap = kDefaultWordCap);
bool is_palindromic_endo(const FreeEndo& e);
bool is_inverse_pair(const FreeEndo& e, const FreeEndo& f);

// M(i,j) = occurrences of generator i in the image of generator j.
Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> transition_matrix(const FreeEndo& e);
double spectral_radius(const FreeEndo& e);

struct IterImage {
  FreeEndo endo;
  Letter base;
  unsigned depth;
  BigInt exact_length;
};

IterImage iterate(const FreeEndo& e, Letter base, unsigned n, std::size_t cap = kDefaultWordCap);
// Explicit expansion of an iterated image; throws CappedResult past the cap.
Word expand(const IterImage& it, std::size_t cap = kDefaultWordCap);

// The running example: a -> aba, b -> a over {a, b}, and its inverse.
FreeEndo phi_endo();
FreeEndo phi_inverse_endo();

}  // namespace divtower
