#include "divtower/spec.hpp"

#include <set>

#include <nlohmann/json.hpp>

namespace divtower {

using ojson = nlohmann::ordered_json;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Free: return "free";
    case Variant::FreeByCyclic: return "free-by-cyclic";
    case Variant::DirectProduct: return "direct-product";
    case Variant::Amalgam: return "amalgam";
    case Variant::HNN: return "hnn";
    case Variant::Opaque: return "opaque";
  }
  return "?";
}

static Variant parse_variant(const std::string& s) {
  for (auto v : {Variant::Free, Variant::FreeByCyclic, Variant::DirectProduct, Variant::Amalgam,
                 Variant::HNN, Variant::Opaque})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown variant: " + s);
}

std::string to_string(OracleTag t) {
  switch (t) {
    case OracleTag::FiberOfFreeByCyclic: return "fiber-of-free-by-cyclic";
    case OracleTag::DiagonalInProduct: return "diagonal-in-product";
    case OracleTag::SkewDiagonalInProduct: return "skew-diagonal-in-product";
    case OracleTag::CyclicExponent: return "cyclic-exponent";
    case OracleTag::FreeFactor: return "free-factor";
  }
  return "?";
}

OracleTag parse_tag(const std::string& s) {
  for (auto t : {OracleTag::FiberOfFreeByCyclic, OracleTag::DiagonalInProduct,
                 OracleTag::SkewDiagonalInProduct, OracleTag::CyclicExponent, OracleTag::FreeFactor})
    if (to_string(t) == s) return t;
  throw std::invalid_argument("unknown oracle tag: " + s);
}

SpecPtr make_free(std::string label, std::vector<std::string> gens) {
  auto s = std::make_shared<GroupSpec>();
  s->variant = Variant::Free;
  s->label = std::move(label);
  s->gens = std::move(gens);
  return s;
}

FreeEndo relabel_endo(const FreeEndo& e, const std::vector<std::string>& names) {
  if (names.size() != e.alphabet()->size()) throw std::invalid_argument("relabel size mismatch");
  auto alpha = make_alphabet(names);
  std::vector<Word> images;
  for (const auto& w : e.images()) images.push_back(Word::from_codes(alpha, w.codes()));
  return FreeEndo(alpha, std::move(images));
}

SpecPtr make_fbc(std::string label, std::vector<std::string> fiber, std::string stable,
                 const FreeEndo& monodromy, const FreeEndo& inverse) {
  auto s = std::make_shared<GroupSpec>();
  s->variant = Variant::FreeByCyclic;
  s->label = std::move(label);
  auto m = relabel_endo(monodromy, fiber);
  auto mi = relabel_endo(inverse, fiber);
  if (!is_inverse_pair(m, mi)) throw std::invalid_argument("monodromy inverse mismatch");
  for (const auto& w : m.images()) s->monodromy.push_back(format_word(w));
  for (const auto& w : mi.images()) s->monodromy_inverse.push_back(format_word(w));
  s->gens = std::move(fiber);
  s->stable = std::move(stable);
  return s;
}

SpecPtr make_product(std::string label, std::vector<SpecPtr> factors) {
  auto s = std::make_shared<GroupSpec>();
  s->variant = Variant::DirectProduct;
  s->label = std::move(label);
  s->children = std::move(factors);
  return s;
}

SpecPtr make_amalgam(std::string label, SpecPtr left, SpecPtr right, SpecPtr edge,
                     EdgeEmbedding into_left, EdgeEmbedding into_right) {
  auto s = std::make_shared<GroupSpec>();
  s->variant = Variant::Amalgam;
  s->label = std::move(label);
  s->children = {std::move(left), std::move(right)};
  s->edge = std::move(edge);
  s->embeddings = {std::move(into_left), std::move(into_right)};
  return s;
}

SpecPtr make_hnn(std::string label, SpecPtr base, std::string stable, SpecPtr edge,
                 EdgeEmbedding a_side, EdgeEmbedding b_side) {
  auto s = std::make_shared<GroupSpec>();
  s->variant = Variant::HNN;
  s->label = std::move(label);
  s->children = {std::move(base)};
  s->stable = std::move(stable);
  s->edge = std::move(edge);
  s->embeddings = {std::move(a_side), std::move(b_side)};
  return s;
}

SpecPtr make_opaque(std::string label, std::vector<std::string> gens, std::string flag) {
  auto s = std::make_shared<GroupSpec>();
  s->variant = Variant::Opaque;
  s->label = std::move(label);
  s->gens = std::move(gens);
  s->meta["flag"] = std::move(flag);
  return s;
}

SpecPtr with_generating_set(const SpecPtr& spec, std::vector<std::string> generators,
                            std::vector<MacroGenerator> macros,
                            std::map<std::string, std::string> meta) {
  auto s = std::make_shared<GroupSpec>(*spec);
  s->generators = std::move(generators);
  s->macros = std::move(macros);
  for (auto& [k, v] : meta) s->meta[k] = v;
  return s;
}

static void collect_primitives(const GroupSpec& s, std::vector<std::string>& out) {
  switch (s.variant) {
    case Variant::Free:
    case Variant::Opaque:
      out.insert(out.end(), s.gens.begin(), s.gens.end());
      break;
    case Variant::FreeByCyclic:
      out.insert(out.end(), s.gens.begin(), s.gens.end());
      out.push_back(s.stable);
      break;
    case Variant::DirectProduct:
    case Variant::Amalgam:
      for (const auto& c : s.children) collect_primitives(*c, out);
      break;
    case Variant::HNN:
      collect_primitives(*s.children.at(0), out);
      out.push_back(s.stable);
      break;
  }
}

std::vector<std::string> primitive_generators(const GroupSpec& spec) {
  std::vector<std::string> out;
  collect_primitives(spec, out);
  return out;
}

std::vector<std::string> edge_generators(const GroupSpec& edge) {
  std::vector<std::string> out = edge.gens;
  if (edge.variant == Variant::FreeByCyclic) out.push_back(edge.stable);
  return out;
}

static std::vector<std::string> indexed(const std::string& stem, unsigned p) {
  std::vector<std::string> out;
  for (unsigned i = 1; i <= p; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

BaseGroup phi_base(unsigned phi_power) {
  auto phi = power(phi_endo(), phi_power);
  auto inv = power(phi_inverse_endo(), phi_power);
  BaseGroup b;
  b.H = make_fbc("H", {"d1", "d2"}, "t", phi, inv);
  b.fiber.tag = OracleTag::FiberOfFreeByCyclic;
  b.fiber.images = {"d1", "d2"};
  auto h = std::make_shared<GroupSpec>(*b.H);
  h->meta["phi_power"] = std::to_string(phi_power);
  b.H = h;
  return b;
}

BaseGroup snowflake_base(unsigned m_param, unsigned n_param) {
  BaseGroup b;
  auto h = std::make_shared<GroupSpec>(
      *make_opaque("snowflake", {"d1", "d2", "c1", "c2"}, "no-word-problem"));
  h->meta["m_param"] = std::to_string(m_param);
  h->meta["n_param"] = std::to_string(n_param);
  b.H = h;
  b.fiber.tag = OracleTag::FreeFactor;
  b.fiber.images = {"d1", "d2"};
  return b;
}

static std::vector<MacroGenerator> tower_macros(unsigned p) {
  std::vector<MacroGenerator> macros;
  for (unsigned i = 1; i <= p; ++i)
    macros.push_back({"a" + std::to_string(i), "x" + std::to_string(i) + " z" + std::to_string(i)});
  for (unsigned i = 1; i <= p; ++i)
    macros.push_back({"b" + std::to_string(i), "y" + std::to_string(i) + " z" + std::to_string(i)});
  return macros;
}

// Stacks s_2, ..., s_m on top of a level-one spec.
static SpecPtr stack_levels(SpecPtr level1, int m, unsigned p) {
  SpecPtr cur = std::move(level1);
  if (m >= 2) {
    EdgeEmbedding a{OracleTag::DiagonalInProduct, {}}, b{OracleTag::DiagonalInProduct, {}};
    for (unsigned i = 1; i <= p; ++i) {
      a.images.push_back("x" + std::to_string(i) + " z" + std::to_string(i));
      b.images.push_back("y" + std::to_string(i) + " z" + std::to_string(i));
    }
    cur = make_hnn("G2", cur, "s2", make_free("E2", indexed("e", p)), a, b);
  }
  for (int k = 3; k <= m; ++k) {
    EdgeEmbedding a{OracleTag::CyclicExponent, {"s1"}};
    EdgeEmbedding b{OracleTag::CyclicExponent, {"s" + std::to_string(k - 1)}};
    cur = make_hnn("G" + std::to_string(k), cur, "s" + std::to_string(k), make_free("Z", {"e"}), a,
                   b);
  }
  return cur;
}

SpecPtr build_G(int m, const BaseGroup& base, unsigned p) {
  if (m < 1) throw std::invalid_argument("tower level m must be >= 1");
  if (base.fiber.images.size() != p)
    throw std::invalid_argument("rank mismatch between designated subgroup and p");
  auto x = make_free("F_x", indexed("x", p));
  auto y = make_free("F_y", indexed("y", p));
  auto z = make_free("F_z", indexed("z", p));
  auto P = make_product("P", {x, y, z});
  EdgeEmbedding skew{OracleTag::SkewDiagonalInProduct, {}};
  for (unsigned i = 1; i <= p; ++i)
    skew.images.push_back("x" + std::to_string(i) + " y" + std::to_string(i) + "^-1");
  auto amalgam = make_amalgam("A1", base.H, P, make_free("E1", indexed("e", p)), base.fiber, skew);
  SpecPtr cur = make_product("G1", {amalgam, make_free("S1", {"s1"})});
  cur = stack_levels(cur, m, p);

  std::vector<std::string> gens = primitive_generators(*base.H);
  for (const char* stem : {"x", "y", "z"})
    for (auto& g : indexed(stem, p)) gens.push_back(g);
  auto macros = tower_macros(p);
  for (auto& mg : macros) gens.push_back(mg.name);
  for (int k = 1; k <= m; ++k) gens.push_back("s" + std::to_string(k));
  std::map<std::string, std::string> meta{{"family", "G"},
                                          {"m", std::to_string(m)},
                                          {"p", std::to_string(p)},
                                          {"base", base.H->label}};
  if (base.H->meta.count("phi_power")) meta["phi_power"] = base.H->meta.at("phi_power");
  if (base.H->variant == Variant::Opaque) meta["flag"] = "no-word-problem";
  return with_generating_set(cur, gens, macros, meta);
}

SpecPtr build_G(int m, unsigned phi_power) { return build_G(m, phi_base(phi_power), 2); }

SpecPtr build_B(int m, unsigned phi_power) {
  if (m < 1) throw std::invalid_argument("tower level m must be >= 1");
  auto phi = power(phi_endo(), phi_power);
  auto inv = power(phi_inverse_endo(), phi_power);
  auto Ad = make_fbc("A_d", {"d1", "d2"}, "t_d", phi, inv);
  auto C = make_product("C", {Ad, make_free("S", {"s"})});
  auto Ax = make_fbc("A_x", {"x1", "x2"}, "t_x", phi, inv);
  auto Ay = make_fbc("A_y", {"y1", "y2"}, "t_y", phi, inv);
  auto Az = make_fbc("A_z", {"z1", "z2"}, "t_z", phi, inv);
  auto P = make_product("P", {Ax, Ay, Az});
  auto edge = make_fbc("A", {"e1", "e2"}, "te", phi, inv);
  EdgeEmbedding into_c{OracleTag::FreeFactor, {"d1", "d2", "t_d"}};
  EdgeEmbedding skew{OracleTag::SkewDiagonalInProduct, {"x1 y1^-1", "x2 y2^-1", "t_x t_y"}};
  auto amalgam = make_amalgam("A1", C, P, edge, into_c, skew);
  SpecPtr cur = make_product("B1", {amalgam, make_free("S1", {"s1"})});
  if (m >= 2) {
    EdgeEmbedding a{OracleTag::DiagonalInProduct, {"x1 z1", "x2 z2", "t_x t_z"}};
    EdgeEmbedding b{OracleTag::DiagonalInProduct, {"y1 z1", "y2 z2", "t_y t_z"}};
    cur = make_hnn("B2", cur, "s2", edge, a, b);
  }
  for (int k = 3; k <= m; ++k) {
    EdgeEmbedding a{OracleTag::CyclicExponent, {"s1"}};
    EdgeEmbedding b{OracleTag::CyclicExponent, {"s" + std::to_string(k - 1)}};
    cur = make_hnn("B" + std::to_string(k), cur, "s" + std::to_string(k), make_free("Z", {"e"}),
                   a, b);
  }
  std::vector<std::string> gens{"d1", "d2", "t_d", "s", "x1", "x2", "t_x", "y1",
                                "y2", "t_y", "z1", "z2", "t_z"};
  auto macros = tower_macros(2);
  for (auto& mg : macros) gens.push_back(mg.name);
  for (int k = 1; k <= m; ++k) gens.push_back("s" + std::to_string(k));
  std::map<std::string, std::string> meta{{"family", "B"},
                                          {"m", std::to_string(m)},
                                          {"p", "2"},
                                          {"phi_power", std::to_string(phi_power)}};
  return with_generating_set(cur, gens, macros, meta);
}

GeneratingSet generating_set(const GroupSpec& spec) {
  std::vector<std::string> names = spec.generators;
  if (names.empty()) names = primitive_generators(spec);
  return {make_alphabet(names), spec.macros};
}

static void collect_relators(const GroupSpec& s, const AlphabetPtr& alpha, std::vector<Word>& out) {
  auto w = [&](const std::string& text) { return parse_word(alpha, text); };
  switch (s.variant) {
    case Variant::Free:
    case Variant::Opaque:
      break;
    case Variant::FreeByCyclic:
      for (std::size_t i = 0; i < s.gens.size(); ++i)
        out.push_back(concat(w(s.stable + " " + s.gens[i] + " " + s.stable + "^-1"),
                             invert(w(s.monodromy[i]))));
      break;
    case Variant::DirectProduct:
      for (const auto& c : s.children) collect_relators(*c, alpha, out);
      for (std::size_t i = 0; i < s.children.size(); ++i)
        for (std::size_t j = i + 1; j < s.children.size(); ++j)
          for (const auto& g : primitive_generators(*s.children[i]))
            for (const auto& h : primitive_generators(*s.children[j]))
              out.push_back(w(g + " " + h + " " + g + "^-1 " + h + "^-1"));
      break;
    case Variant::Amalgam:
      for (const auto& c : s.children) collect_relators(*c, alpha, out);
      for (std::size_t k = 0; k < s.embeddings[0].images.size(); ++k)
        out.push_back(concat(w(s.embeddings[0].images[k]), invert(w(s.embeddings[1].images[k]))));
      break;
    case Variant::HNN:
      collect_relators(*s.children[0], alpha, out);
      for (std::size_t k = 0; k < s.embeddings[0].images.size(); ++k)
        out.push_back(concat(w(s.stable + "^-1 " + s.embeddings[0].images[k] + " " + s.stable),
                             invert(w(s.embeddings[1].images[k]))));
      break;
  }
}

std::vector<Word> relators(const GroupSpec& spec) {
  auto gs = generating_set(spec);
  std::vector<Word> out;
  collect_relators(spec, gs.alphabet, out);
  for (const auto& mg : gs.macros)
    out.push_back(concat(invert(parse_word(gs.alphabet, mg.name)),
                         parse_word(gs.alphabet, mg.expansion)));
  return out;
}

std::map<std::string, std::string> inclusion_map(const GroupSpec& g, const GroupSpec& b) {
  auto get = [](const GroupSpec& s, const char* k) {
    auto it = s.meta.find(k);
    return it == s.meta.end() ? std::string() : it->second;
  };
  if (get(g, "family") != "G" || get(b, "family") != "B" || get(g, "m") != get(b, "m") ||
      get(g, "phi_power") != get(b, "phi_power") || get(g, "p") != "2")
    throw std::invalid_argument("mismatched towers for inclusion");
  auto bset = generating_set(b);
  std::map<std::string, std::string> out;
  auto gset = generating_set(g);
  for (const auto& name : gset.alphabet->names()) {
    if (name == "t") {
      out[name] = "t_d s";
    } else {
      if (!bset.alphabet->find(name)) throw std::invalid_argument("no image for " + name);
      out[name] = name;
    }
  }
  return out;
}

static ojson node_to_json(const GroupSpec& s) {
  ojson j;
  j["variant"] = to_string(s.variant);
  j["label"] = s.label;
  auto embeddings = [&]() {
    ojson arr = ojson::array();
    for (const auto& e : s.embeddings) {
      ojson je;
      je["tag"] = to_string(e.tag);
      je["images"] = e.images;
      arr.push_back(je);
    }
    return arr;
  };
  switch (s.variant) {
    case Variant::Free:
      j["generators"] = s.gens;
      break;
    case Variant::Opaque:
      j["generators"] = s.gens;
      j["meta"] = s.meta;
      break;
    case Variant::FreeByCyclic:
      j["fiber"] = s.gens;
      j["stable"] = s.stable;
      j["monodromy"] = s.monodromy;
      j["monodromy_inverse"] = s.monodromy_inverse;
      break;
    case Variant::DirectProduct: {
      ojson arr = ojson::array();
      for (const auto& c : s.children) arr.push_back(node_to_json(*c));
      j["factors"] = arr;
      break;
    }
    case Variant::Amalgam:
      j["left"] = node_to_json(*s.children[0]);
      j["right"] = node_to_json(*s.children[1]);
      j["edge"] = node_to_json(*s.edge);
      j["embeddings"] = embeddings();
      break;
    case Variant::HNN:
      j["base"] = node_to_json(*s.children[0]);
      j["stable"] = s.stable;
      j["edge"] = node_to_json(*s.edge);
      j["embeddings"] = embeddings();
      break;
  }
  return j;
}

static SpecPtr node_from_json(const ojson& j) {
  auto s = std::make_shared<GroupSpec>();
  s->variant = parse_variant(j.at("variant").get<std::string>());
  s->label = j.at("label").get<std::string>();
  auto embeddings = [&]() {
    for (const auto& je : j.at("embeddings"))
      s->embeddings.push_back(
          {parse_tag(je.at("tag").get<std::string>()), je.at("images").get<std::vector<std::string>>()});
  };
  switch (s->variant) {
    case Variant::Free:
      s->gens = j.at("generators").get<std::vector<std::string>>();
      break;
    case Variant::Opaque:
      s->gens = j.at("generators").get<std::vector<std::string>>();
      s->meta = j.at("meta").get<std::map<std::string, std::string>>();
      break;
    case Variant::FreeByCyclic:
      s->gens = j.at("fiber").get<std::vector<std::string>>();
      s->stable = j.at("stable").get<std::string>();
      s->monodromy = j.at("monodromy").get<std::vector<std::string>>();
      s->monodromy_inverse = j.at("monodromy_inverse").get<std::vector<std::string>>();
      break;
    case Variant::DirectProduct:
      for (const auto& c : j.at("factors")) s->children.push_back(node_from_json(c));
      break;
    case Variant::Amalgam:
      s->children = {node_from_json(j.at("left")), node_from_json(j.at("right"))};
      s->edge = node_from_json(j.at("edge"));
      embeddings();
      break;
    case Variant::HNN:
      s->children = {node_from_json(j.at("base"))};
      s->stable = j.at("stable").get<std::string>();
      s->edge = node_from_json(j.at("edge"));
      embeddings();
      break;
  }
  return s;
}

Word map_word(const Word& w, const std::map<std::string, std::string>& images,
              const AlphabetPtr& target) {
  std::vector<Word> gen;
  for (const auto& name : w.alphabet()->names()) gen.push_back(parse_word(target, images.at(name)));
  Word out(target);
  for (const auto& l : w.letters())
    out = concat(out, l.sign > 0 ? gen[l.index] : invert(gen[l.index]));
  return out;
}

std::string spec_to_json(const GroupSpec& spec) {
  ojson root;
  root["format"] = "divtower-spec/1";
  root["meta"] = spec.meta;
  root["generators"] = generating_set(spec).alphabet->names();
  ojson macros = ojson::array();
  for (const auto& m : spec.macros) macros.push_back({{"name", m.name}, {"expansion", m.expansion}});
  root["macros"] = macros;
  ojson rels = ojson::array();
  for (const auto& r : relators(spec)) rels.push_back(format_word(r));
  root["relators"] = rels;
  root["group"] = node_to_json(spec);
  return root.dump(2) + "\n";
}

SpecPtr spec_from_json(const std::string& text) {
  auto root = ojson::parse(text);
  if (root.value("format", "") != "divtower-spec/1") throw std::invalid_argument("not a spec document");
  auto node = node_from_json(root.at("group"));
  std::vector<MacroGenerator> macros;
  for (const auto& m : root.at("macros"))
    macros.push_back({m.at("name").get<std::string>(), m.at("expansion").get<std::string>()});
  auto s = std::make_shared<GroupSpec>(*node);
  s->generators = root.at("generators").get<std::vector<std::string>>();
  s->macros = std::move(macros);
  for (auto& [k, v] : root.at("meta").get<std::map<std::string, std::string>>()) s->meta[k] = v;
  return s;
}

}  // namespace divtower
