#include "divtower/inclusion.hpp"

#include <random>
#include <stdexcept>

#include <json.hpp>

#include "divtower/normal_form.hpp"

namespace divtower {

InclusionReport sample_inclusion(int m, std::size_t samples, std::size_t radius, std::uint64_t seed,
                                 unsigned phi_power) {
  if (radius == 0 && samples > 0) throw std::invalid_argument("radius must be positive");
  auto g = build_G(m, phi_power);
  auto b = build_B(m, phi_power);
  Solver sg(g), sb(b);
  const auto map = inclusion_map(*g, *b);

  InclusionReport rep;
  rep.m = m;
  rep.phi_power = phi_power;
  rep.seed = seed;
  rep.radius = radius;
  for (const auto& r : relators(*g)) {
    ++rep.relators;
    if (!sb.is_identity(map_word(r, map, sb.alphabet()))) rep.relator_failures.push_back(format_word(r));
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(1, radius == 0 ? 1 : radius);
  std::uniform_int_distribution<std::size_t> letter(0, sg.alphabet()->size() - 1);
  std::bernoulli_distribution inverse(0.5);
  const std::size_t max_draws = 100 * samples + 100;
  while (rep.samples < samples) {
    if (++rep.draws > max_draws) throw std::runtime_error("too many trivial draws");
    Codes raw(len(rng));
    for (Code& c : raw) c = code_of(letter(rng), inverse(rng) ? -1 : 1);
    Word w = Word::from_codes(sg.alphabet(), raw);
    if (sg.is_identity(w)) continue;
    ++rep.samples;
    if (sb.is_identity(map_word(w, map, sb.alphabet()))) rep.counterexamples.push_back(format_word(w));
  }
  return rep;
}

std::string inclusion_json(const InclusionReport& r) {
  nlohmann::ordered_json j;
  j["m"] = r.m;
  j["phi_power"] = r.phi_power;
  j["seed"] = r.seed;
  j["radius"] = r.radius;
  j["relators"] = r.relators;
  j["relator_failures"] = r.relator_failures;
  j["samples"] = r.samples;
  j["draws"] = r.draws;
  j["counterexamples"] = r.counterexamples;
  j["passed"] = r.passed();
  return j.dump(2) + "\n";
}

}  // namespace divtower
