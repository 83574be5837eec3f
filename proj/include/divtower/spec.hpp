#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "divtower/endo.hpp"
#include "divtower/words.hpp"

namespace divtower {

enum class Variant { Free, FreeByCyclic, DirectProduct, Amalgam, HNN, Opaque };

enum class OracleTag {
  FiberOfFreeByCyclic,
  DiagonalInProduct,
  SkewDiagonalInProduct,
  CyclicExponent,
  FreeFactor
};

std::string to_string(Variant v);
std::string to_string(OracleTag t);
OracleTag parse_tag(const std::string& s);

// Images are word texts over the target's generator names, one per edge
// generator (fiber generators first, then the edge stable letter if any).
struct EdgeEmbedding {
  OracleTag tag = OracleTag::FreeFactor;
  std::vector<std::string> images;
};

struct MacroGenerator {
  std::string name;
  std::string expansion;
};

struct GroupSpec;
using SpecPtr = std::shared_ptr<const GroupSpec>;

struct GroupSpec {
  Variant variant = Variant::Free;
  std::string label;
  // Free: generators. FreeByCyclic: fiber generators. Opaque: generators.
  std::vector<std::string> gens;
  // FreeByCyclic and HNN stable letter.
  std::string stable;
  // FreeByCyclic: image texts of the fiber generators under the monodromy and its inverse.
  std::vector<std::string> monodromy;
  std::vector<std::string> monodromy_inverse;
  // DirectProduct: factors. Amalgam: {left, right}. HNN: {base}.
  std::vector<SpecPtr> children;
  // Amalgam and HNN edge group, a Free or FreeByCyclic spec with its own names.
  SpecPtr edge;
  // Amalgam: {into left, into right}. HNN: {A, B} with s^-1 A(e) s = B(e).
  std::vector<EdgeEmbedding> embeddings;
  // Generating set (with macros) and bookkeeping, meaningful on the root.
  std::vector<std::string> generators;
  std::vector<MacroGenerator> macros;
  std::map<std::string, std::string> meta;
};

SpecPtr make_free(std::string label, std::vector<std::string> gens);
SpecPtr make_fbc(std::string label, std::vector<std::string> fiber, std::string stable,
                 const FreeEndo& monodromy, const FreeEndo& inverse);
SpecPtr make_product(std::string label, std::vector<SpecPtr> factors);
SpecPtr make_amalgam(std::string label, SpecPtr left, SpecPtr right, SpecPtr edge,
                     EdgeEmbedding into_left, EdgeEmbedding into_right);
SpecPtr make_hnn(std::string label, SpecPtr base, std::string stable, SpecPtr edge,
                 EdgeEmbedding a_side, EdgeEmbedding b_side);
SpecPtr make_opaque(std::string label, std::vector<std::string> gens, std::string flag);

// Copy of a spec with root-level generating set, macros and meta attached.
SpecPtr with_generating_set(const SpecPtr& spec, std::vector<std::string> generators,
                            std::vector<MacroGenerator> macros,
                            std::map<std::string, std::string> meta);

// Primitive generators in depth-first order (edge groups excluded).
std::vector<std::string> primitive_generators(const GroupSpec& spec);

// Edge-group generator names: fiber generators then stable letter.
std::vector<std::string> edge_generators(const GroupSpec& edge);

// H = F_d x|_phi^n <t> with its fiber embedding d_i.
struct BaseGroup {
  SpecPtr H;
  EdgeEmbedding fiber;
};
BaseGroup phi_base(unsigned phi_power = 1);
// A stand-in for snowflake bases: representable, no word problem.
BaseGroup snowflake_base(unsigned m_param, unsigned n_param);

SpecPtr build_G(int m, const BaseGroup& base, unsigned p = 2);
SpecPtr build_G(int m, unsigned phi_power = 1);
SpecPtr build_B(int m, unsigned phi_power = 1);

struct GeneratingSet {
  AlphabetPtr alphabet;
  std::vector<MacroGenerator> macros;
};
GeneratingSet generating_set(const GroupSpec& spec);

// Defining relators as words over the generating set.
std::vector<Word> relators(const GroupSpec& spec);

// Generator name -> word text over the B generating set.
std::map<std::string, std::string> inclusion_map(const GroupSpec& g, const GroupSpec& b);

// Image of a word under a generator-to-text map into another alphabet.
Word map_word(const Word& w, const std::map<std::string, std::string>& images,
              const AlphabetPtr& target);

std::string spec_to_json(const GroupSpec& spec);
SpecPtr spec_from_json(const std::string& text);

FreeEndo relabel_endo(const FreeEndo& e, const std::vector<std::string>& names);

}  // namespace divtower
