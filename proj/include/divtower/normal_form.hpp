#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "divtower/spec.hpp"
#include "divtower/words.hpp"

namespace divtower {

// Element of a compiled spec node. Field use depends on the node kind:
//   free            word
//   free-by-cyclic  word * t^exp
//   direct product  kids (one per factor)
//   amalgam         kids[0] edge element, kids[1..] coset reps, marks = side per rep
//   hnn             kids[0] base element, kids[1..] coset reps, marks = sign per rep
// Edge-group elements use word (edge-local codes) and exp.
struct Elem {
  Codes word;
  std::int64_t exp = 0;
  std::vector<Elem> kids;
  std::vector<std::int8_t> marks;
  bool operator==(const Elem&) const = default;
};

class UnknownEquality : public std::runtime_error {
 public:
  explicit UnknownEquality(const std::string& why) : std::runtime_error("unknown: " + why) {}
};

class UnsupportedBase : public std::runtime_error {
 public:
  UnsupportedBase() : std::runtime_error("base group has no word problem solver") {}
};

enum class Verdict { Trivial, Nontrivial, Unknown };

struct NormalForm {
  Elem elem;
  std::string encoding;
  bool trivial = false;
};

class Node;
struct SubPath;

// Membership oracle for the image of an edge group inside a compiled spec.
class MembershipOracle {
 public:
  OracleTag tag() const { return tag_; }
  const AlphabetPtr& edge_alphabet() const { return edge_alphabet_; }
  const SubPath& path() const { return *path_; }

 private:
  friend class Solver;
  OracleTag tag_ = OracleTag::FreeFactor;
  AlphabetPtr edge_alphabet_;
  std::shared_ptr<const SubPath> path_;
};

class Solver {
 public:
  explicit Solver(SpecPtr spec, std::size_t cap = kDefaultWordCap);
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  const SpecPtr& spec() const { return spec_; }
  // Generating set with macros.
  const AlphabetPtr& alphabet() const { return alphabet_; }
  // Primitive generators.
  const AlphabetPtr& primitives() const { return primitives_; }
  std::size_t cap() const { return cap_; }

  Word parse(std::string_view text) const { return parse_word(alphabet_, text); }
  // Macro expansion into primitive codes.
  Codes expand(const Word& w) const;
  const Codes& expansion(std::size_t generator) const { return expansions_.at(generator); }

  Elem identity() const;
  void lmul(Code primitive, Elem& g) const;
  // Left-multiplies by a generating-set letter (macros expanded).
  void lmul_generator(Code generator, Elem& g) const;
  Elem from_primitive(const Codes& w) const;
  Elem mul(const Elem& a, const Elem& b) const;
  Elem inverse(const Elem& a) const;
  Codes to_primitive_word(const Elem& g) const;
  std::string encode(const Elem& g) const;
  bool is_trivial(const Elem& g) const;

  // Throws UnknownEquality on cap overflow.
  NormalForm normalize(const Word& w) const;
  Verdict identity_verdict(const Word& w) const;
  bool is_identity(const Word& w) const;
  bool equal(const Word& u, const Word& v) const;

  MembershipOracle oracle(const SpecPtr& edge, const EdgeEmbedding& emb) const;
  // Preimage word over the edge alphabet, or nothing.
  std::optional<Word> membership(const MembershipOracle& o, const Word& g) const;
  // g = image(c) * rep with rep the transversal element.
  std::pair<Word, Elem> decompose(const MembershipOracle& o, const Elem& g) const;

  const Node& root() const { return *root_; }

 private:
  SpecPtr spec_;
  std::size_t cap_;
  AlphabetPtr alphabet_;
  AlphabetPtr primitives_;
  std::vector<Codes> expansions_;
  std::unique_ptr<Node> root_;
};

std::string verdict_name(Verdict v);

}  // namespace divtower
