#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "divtower/certificates.hpp"
#include "divtower/metrics.hpp"

namespace divtower {

// Everything the constructions need from a verified certificate sequence.
struct Ingredients {
  CertificateSequence seq;
  CertificateReport report;
  DerivedConstants k;
  InverseDistortion f = InverseDistortion::phi_envelope();
};

// phi-sequence with C = 3, checked against an exhaustive distortion table of
// radius table_n.
Ingredients phi_ingredients(unsigned n_max = 25, std::size_t table_n = 5);

// Constant chain for the recursive constructions.
struct ChainConstants {
  double D = 0;
  double N2 = 0;
  std::map<int, double> M;  // M[m], m >= 3
  std::map<int, double> N;  // N[m], m >= 3
  // max(17, 4^m * largest M_j, N_j with j <= m)
  double envelope(int m) const;
};

ChainConstants chain_constants(double D, int m_max);

struct PathWitness {
  std::string label;  // which construction
  AlphabetPtr alphabet;
  Word base;
  Codes edges;  // unreduced, one letter per edge
  Word end;     // claimed endpoint
  Word center;
  double radius = 0;  // the open ball B(center, radius) is avoided
  double bound = 0;   // claimed length bound
  std::string bound_formula;
  std::map<std::string, double> constants;

  std::size_t length() const { return edges.size(); }
  // Appends a translated copy of another witness's edges.
  void append(const Codes& more) { edges.insert(edges.end(), more.begin(), more.end()); }
};

struct VertexEvidence {
  enum class Kind { Exact, Retraction, Unresolved };
  Kind kind = Kind::Unresolved;
  int source = -1;  // retraction index for Kind::Retraction
  std::int64_t value = 0;
};

struct AvoidanceEvidence {
  std::vector<std::string> sources;
  std::vector<VertexEvidence> vertices;
};

struct WitnessReport {
  bool endpoints = false;
  bool avoidance = false;
  bool length = false;
  std::size_t edges = 0;
  std::size_t unresolved = 0;
  std::vector<std::size_t> failing;  // vertex indices below the radius, first few
  std::int64_t min_value = -1;       // smallest certified distance to the center
  AvoidanceEvidence evidence;
  bool passed() const { return endpoints && avoidance && length; }
};

// Checks endpoints by normal form, per-vertex distance to the center by
// retractions (falling back to the exact ball when given), and edge count.
WitnessReport verify_witness(const Solver& solver, const std::vector<RetractionPtr>& rs,
                             const PathWitness& w, const CayleyBall* exact = nullptr);

// Left translate by g, moving the avoided ball along.
PathWitness translate(const PathWitness& w, const Word& g);

// s1^-n to s1^n around B(e, |n|) in the plane of a1 and s1.
PathWitness witness_s1(const Solver& solver, std::int64_t n);

struct A1Witness {
  Word u;   // selected certificate element over d1, d2
  Word g0;  // over a1, a2
  Word g1;  // over b1, b2
  Selection selection;
  bool conjugate = false;  // s2^-1 g0 s2 = g1
  PathWitness gamma;       // g0 to g1 through g0 H
};

A1Witness witness_a1(const Solver& solver, const Ingredients& ing, std::int64_t r);

// s1^(sign1 r) to s2^(sign2 r) around B(e, r).
PathWitness witness_cool2(const Solver& solver, const Ingredients& ing, std::int64_t r, int sign1,
                          int sign2);

// s1^2n to s2^eps s1^2n around B(e, |n|).
PathWitness witness_cool3(const Solver& solver, std::int64_t n, int eps);

enum class AgKind { P, Q };

struct AgRequest {
  int m = 3;
  AgKind kind = AgKind::P;
  std::int64_t n = 0;   // P: n; Q: n1
  std::int64_t n2 = 0;  // Q only
  int eps = 1;          // P only
};

// P: s1^2n to s_m^eps s1^2n. Q: s1^n1 to s_m^n2. Both around B(e, |n|).
PathWitness witness_ag(const Solver& solver, const Ingredients& ing, const AgRequest& req);

// Replaces the s1-segment from x to x s1^k by a path over s1 and a1 that
// avoids B(z, r/2), r = min(d(x, z), d(y, z)).
PathWitness witness_avoidant_modification(const Solver& solver,
                                          const std::vector<RetractionPtr>& rs, const Word& x,
                                          std::int64_t k, const Word& z,
                                          std::size_t ball_cap = 200'000);

std::string witness_json(const PathWitness& w, const WitnessReport& rep);

}  // namespace divtower
