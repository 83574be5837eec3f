#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace divtower {

struct InclusionReport {
  int m = 1;
  unsigned phi_power = 1;
  std::uint64_t seed = 0;
  std::size_t radius = 0;
  std::size_t relators = 0;
  std::vector<std::string> relator_failures;
  std::size_t samples = 0;  // nontrivial G elements checked
  std::size_t draws = 0;    // words drawn, including trivial ones
  std::vector<std::string> counterexamples;
  bool passed() const { return relator_failures.empty() && counterexamples.empty(); }
};

// Maps every G_m relator into B_m, then draws random words of length at most
// radius until `samples` nontrivial G_m elements were seen, and checks their
// images in B_m are nontrivial.
InclusionReport sample_inclusion(int m, std::size_t samples, std::size_t radius, std::uint64_t seed,
                                 unsigned phi_power = 1);

std::string inclusion_json(const InclusionReport& r);

}  // namespace divtower
