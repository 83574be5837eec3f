#include "divtower/witness.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace divtower {

namespace {

Code gen(const Solver& s, const std::string& name, int sign = 1) {
  auto i = s.alphabet()->find(name);
  if (!i) throw std::invalid_argument("generator " + name + " missing from " + s.spec()->label);
  return code_of(*i, sign);
}

void push_power(Codes& out, Code c, std::int64_t n) {
  for (std::int64_t i = 0; i < (n < 0 ? -n : n); ++i) out.push_back(n < 0 ? -c : c);
}

void push_word(Codes& out, const Word& w) { out.insert(out.end(), w.codes().begin(), w.codes().end()); }

Codes reversed_path(const Codes& edges) {
  Codes out(edges.rbegin(), edges.rend());
  for (Code& c : out) c = -c;
  return out;
}

Word power_word(const Solver& s, const std::string& name, std::int64_t n) {
  Codes c;
  push_power(c, gen(s, name), n);
  return Word::from_codes(s.alphabet(), std::move(c));
}

Word word_of(const Solver& s, const Codes& c) { return Word::from_codes(s.alphabet(), c); }

int sign(std::int64_t n) { return n < 0 ? -1 : 1; }

std::int64_t abs64(std::int64_t n) { return n < 0 ? -n : n; }

// Certificate element as a word over the fiber letters, relabelled by prefix.
Word relabel_element(const Solver& s, const Ingredients& ing, std::size_t position,
                     const std::string& prefix) {
  const auto& e = ing.seq.elems.at(position);
  Word w = expand(iterate(power(phi_endo(), ing.seq.phi_power), Letter{0, 1}, e.index));
  Codes out;
  for (Code c : w.codes())
    out.push_back(gen(s, prefix + std::to_string(index_of(c) + 1), sign_of(c)));
  return word_of(s, out);
}

// t^n d1^sign t^-n, a T-word for u^sign.
Codes t_word(const Solver& s, unsigned n, int sgn) {
  Codes out;
  push_power(out, gen(s, "t"), n);
  out.push_back(gen(s, "d1", sgn));
  push_power(out, gen(s, "t"), -static_cast<std::int64_t>(n));
  return out;
}

void require_radius(const Ingredients& ing, double r) {
  if (r < ing.k.r0) throw std::invalid_argument("radius below r0");
}

}  // namespace

Ingredients phi_ingredients(unsigned n_max, std::size_t table_n) {
  Ingredients ing;
  ing.seq = phi_certificates(n_max);
  auto base = phi_base(ing.seq.phi_power);
  Solver h(base.H);
  auto oracle = h.oracle(make_free("F", {"a", "b"}), base.fiber);
  auto table = distortion(h, oracle, table_n, 5'000'000).normalized;
  ing.report = verify_certificate(ing.seq, 3, table);
  ing.k = derived_constants(ing.seq, ing.report);
  return ing;
}

double ChainConstants::envelope(int m) const {
  double best = 0;
  for (const auto& [j, v] : M)
    if (j <= m) best = std::max(best, v);
  for (const auto& [j, v] : N)
    if (j <= m) best = std::max(best, v);
  return std::max(17.0, std::pow(4.0, m) * best);
}

ChainConstants chain_constants(double D, int m_max) {
  ChainConstants c;
  c.D = D;
  c.N2 = 8 * D + 2;
  c.M[3] = 2 * c.N2 + 1;
  for (int m = 3; m <= m_max; ++m) {
    c.N[m] = std::pow(2.0, m - 2) * c.M[m] + 7;
    if (m < m_max) c.M[m + 1] = std::pow(2.0, m - 1) * c.N[m] + 1;
  }
  return c;
}

WitnessReport verify_witness(const Solver& solver, const std::vector<RetractionPtr>& rs,
                             const PathWitness& w, const CayleyBall* exact) {
  WitnessReport rep;
  rep.edges = w.edges.size();
  try {
    rep.endpoints = solver.equal(concat(w.base, word_of(solver, w.edges)), w.end);
  } catch (const UnknownEquality&) {
    rep.endpoints = false;
  }
  rep.length = static_cast<double>(w.edges.size()) <= w.bound + 1e-9;

  const Word offset = concat(invert(w.center), w.base);
  std::vector<RetImage> imgs;
  for (const auto& r : rs) {
    imgs.push_back(r->image(offset));
    rep.evidence.sources.push_back(r->name());
  }
  rep.avoidance = true;
  Codes prefix = offset.codes();
  for (std::size_t i = 0; i <= w.edges.size(); ++i) {
    if (i > 0) {
      for (std::size_t k = 0; k < rs.size(); ++k) rs[k]->rmul(w.edges[i - 1], imgs[k]);
      if (exact) append_reduced(prefix, {w.edges[i - 1]});
    }
    VertexEvidence ev;
    for (std::size_t k = 0; k < rs.size(); ++k) {
      const std::int64_t v = rs[k]->length(imgs[k]);
      if (ev.source < 0 || v > ev.value) {
        ev.value = v;
        ev.source = static_cast<int>(k);
      }
    }
    if (ev.source >= 0) ev.kind = VertexEvidence::Kind::Retraction;
    if (static_cast<double>(ev.value) < w.radius) {
      ev.kind = VertexEvidence::Kind::Unresolved;
      if (exact) {
        auto d = exact->distance(solver.normalize(word_of(solver, prefix)).elem);
        if (d) {
          ev = {VertexEvidence::Kind::Exact, -1, static_cast<std::int64_t>(*d)};
        } else if (exact->complete || exact->radius + 1 >= w.radius) {
          ev = {VertexEvidence::Kind::Exact, -1, static_cast<std::int64_t>(exact->radius) + 1};
        }
      }
    }
    if (ev.kind == VertexEvidence::Kind::Unresolved) ++rep.unresolved;
    if (ev.kind == VertexEvidence::Kind::Unresolved || static_cast<double>(ev.value) < w.radius) {
      rep.avoidance = false;
      if (rep.failing.size() < 16) rep.failing.push_back(i);
    }
    if (rep.min_value < 0 || ev.value < rep.min_value) rep.min_value = ev.value;
    rep.evidence.vertices.push_back(ev);
  }
  return rep;
}

PathWitness translate(const PathWitness& w, const Word& g) {
  PathWitness out = w;
  out.base = concat(g, w.base);
  out.center = concat(g, w.center);
  out.end = concat(g, w.end);
  return out;
}

PathWitness witness_s1(const Solver& s, std::int64_t n) {
  if (n == 0) throw std::invalid_argument("witness_s1 needs n != 0");
  PathWitness w;
  w.label = "s1";
  w.alphabet = s.alphabet();
  w.base = power_word(s, "s1", -n);
  push_power(w.edges, gen(s, "a1"), n);
  push_power(w.edges, gen(s, "s1"), 2 * n);
  push_power(w.edges, gen(s, "a1"), -n);
  w.end = power_word(s, "s1", n);
  w.center = Word(s.alphabet());
  w.radius = static_cast<double>(abs64(n));
  w.bound = 4.0 * static_cast<double>(abs64(n));
  w.bound_formula = "4|n|";
  return w;
}

A1Witness witness_a1(const Solver& s, const Ingredients& ing, std::int64_t r) {
  require_radius(ing, static_cast<double>(r));
  A1Witness out;
  out.selection = select_certificate(ing.seq, ing.k, static_cast<double>(r), ing.f);
  const auto& e = ing.seq.elems.at(out.selection.position);
  out.u = relabel_element(s, ing, out.selection.position, "d");
  out.g0 = relabel_element(s, ing, out.selection.position, "a");
  out.g1 = relabel_element(s, ing, out.selection.position, "b");
  if (s.alphabet()->find("s2")) {
    Word s2 = power_word(s, "s2", 1);
    out.conjugate = s.equal(concat(concat(invert(s2), out.g0), s2), out.g1);
  }
  PathWitness& w = out.gamma;
  w.label = "a1";
  w.alphabet = s.alphabet();
  w.base = out.g0;
  w.edges = t_word(s, e.index, -1);
  w.end = out.g1;
  w.center = Word(s.alphabet());
  w.radius = static_cast<double>(r) / ing.k.D;
  w.bound = ing.k.D * ing.f(static_cast<double>(r));
  w.bound_formula = "D f(r)";
  w.constants = {{"D", ing.k.D}, {"r", static_cast<double>(r)}, {"u_index", double(e.index)}};
  return out;
}

PathWitness witness_cool2(const Solver& s, const Ingredients& ing, std::int64_t r, int sign1,
                          int sign2) {
  require_radius(ing, static_cast<double>(r));
  const double D = ing.k.D;
  const auto inner = static_cast<std::int64_t>(std::llround(4 * D * static_cast<double>(r)));
  A1Witness a = witness_a1(s, ing, inner);
  const unsigned depth = ing.seq.elems.at(a.selection.position).index;
  const std::int64_t n1 = sign1 * r;
  const std::int64_t n2 = sign2 * r;

  PathWitness w;
  w.label = "cool2";
  w.alphabet = s.alphabet();
  w.base = power_word(s, "s1", n1);
  // From s1^n1 into F_xz x <s1> (or F_yz x <s1>), across the s2 ladder, then down to s2^n2.
  const Word& first = sign2 > 0 ? a.g0 : a.g1;
  const Word& last = sign2 > 0 ? a.g1 : a.g0;
  push_word(w.edges, first);
  push_power(w.edges, gen(s, "s1"), -n1);
  const Codes rung = t_word(s, depth, sign2 > 0 ? 1 : -1);
  for (std::int64_t i = 1; i <= r; ++i) {
    w.edges.push_back(gen(s, "s2", sign2));
    if (i < r) w.edges.insert(w.edges.end(), rung.begin(), rung.end());
  }
  push_word(w.edges, invert(last));
  w.end = power_word(s, "s2", n2);
  w.center = Word(s.alphabet());
  w.radius = static_cast<double>(r);
  const double N2 = 8 * D + 2;
  const double rr = static_cast<double>(r);
  w.bound = N2 * rr * (ing.f(N2 * rr) + 1);
  w.bound_formula = "N2 r (f(N2 r) + 1)";
  w.constants = {{"D", D}, {"N2", N2}, {"inner_radius", double(inner)}, {"u_index", double(depth)}};
  return w;
}

PathWitness witness_cool3(const Solver& s, std::int64_t n, int eps) {
  if (n == 0) throw std::invalid_argument("witness_cool3 needs n != 0");
  if (eps != 1 && eps != -1) throw std::invalid_argument("eps must be +1 or -1");
  PathWitness w;
  w.label = "cool3";
  w.alphabet = s.alphabet();
  w.base = power_word(s, "s1", 2 * n);
  const Code near = gen(s, eps > 0 ? "a1" : "b1");
  const Code far = gen(s, eps > 0 ? "b1" : "a1");
  push_power(w.edges, near, 2 * n);
  push_power(w.edges, gen(s, "s1"), -2 * n);
  w.edges.push_back(gen(s, "s2", eps));
  push_power(w.edges, gen(s, "s1"), 2 * n);
  push_power(w.edges, far, -2 * n);
  w.end = concat(power_word(s, "s2", eps), power_word(s, "s1", 2 * n));
  w.center = Word(s.alphabet());
  const double r = static_cast<double>(abs64(n));
  w.radius = r;
  w.bound = 8 * r + 1;
  w.bound_formula = "8r + 1";
  return w;
}

namespace {

PathWitness build_ag(const Solver& s, const Ingredients& ing, const ChainConstants& cc,
                     const AgRequest& req) {
  const int m = req.m;
  const std::string top = "s" + std::to_string(m);
  gen(s, top);
  PathWitness w;
  w.alphabet = s.alphabet();
  w.center = Word(s.alphabet());
  const std::int64_t r = abs64(req.n);
  const double rr = static_cast<double>(r);
  if (req.kind == AgKind::P) {
    if (req.eps != 1 && req.eps != -1) throw std::invalid_argument("eps must be +1 or -1");
    // Connects s1^2n and s_{m-1}^2n outside B(e, 2r).
    PathWitness inner = m == 3
                            ? witness_cool2(s, ing, 2 * r, sign(req.n), sign(req.n))
                            : build_ag(s, ing, cc, {m - 1, AgKind::Q, 2 * req.n, 2 * req.n, 1});
    w.label = "P" + std::to_string(m);
    w.base = power_word(s, "s1", 2 * req.n);
    if (req.eps > 0) {
      w.edges.push_back(gen(s, top));
      w.append(reversed_path(inner.edges));
    } else {
      w.edges = inner.edges;
      w.edges.push_back(gen(s, top, -1));
    }
    w.end = concat(power_word(s, top, req.eps), power_word(s, "s1", 2 * req.n));
    const double M = cc.M.at(m);
    w.bound = M * std::pow(rr, m - 2) * (ing.f(M * rr) + 1);
    w.bound_formula = "M_m r^(m-2) (f(M_m r) + 1)";
    w.constants = {{"M_m", M}, {"m", double(m)}};
  } else {
    if (abs64(req.n2) != r) throw std::invalid_argument("Q needs |n1| = |n2|");
    PathWitness tooth = build_ag(s, ing, cc, {m, AgKind::P, 2 * req.n, 0, sign(req.n2)});
    w.label = "Q" + std::to_string(m);
    w.base = power_word(s, "s1", req.n);
    push_power(w.edges, gen(s, "s1"), 3 * req.n);
    for (std::int64_t i = 0; i < r; ++i) w.append(tooth.edges);
    push_power(w.edges, gen(s, "s1"), -4 * req.n);
    w.end = power_word(s, top, req.n2);
    const double N = cc.N.at(m);
    w.bound = N * std::pow(rr, m - 1) * (ing.f(N * rr) + 1);
    w.bound_formula = "N_m r^(m-1) (f(N_m r) + 1)";
    w.constants = {{"N_m", N}, {"m", double(m)}};
  }
  w.radius = rr;
  w.constants["D"] = cc.D;
  w.constants["N2"] = cc.N2;
  w.constants["envelope"] = cc.envelope(m);
  return w;
}

}  // namespace

PathWitness witness_ag(const Solver& s, const Ingredients& ing, const AgRequest& req) {
  if (req.m < 3) throw std::invalid_argument("witness_ag needs m >= 3");
  require_radius(ing, static_cast<double>(abs64(req.n)));
  return build_ag(s, ing, chain_constants(ing.k.D, req.m), req);
}

namespace {

std::int64_t exact_distance(const Solver& s, const std::vector<RetractionPtr>& rs, const Word& w,
                            std::size_t cap) {
  if (auto d = certified_length(rs, w)) return *d;
  CayleyBall b = ball_upto(s, w.size(), cap);
  if (auto d = b.distance(s.normalize(w).elem)) return *d;
  if (b.radius + 1 >= w.size()) return static_cast<std::int64_t>(w.size());
  throw std::invalid_argument("distance to the center is not resolvable");
}

}  // namespace

PathWitness witness_avoidant_modification(const Solver& s, const std::vector<RetractionPtr>& rs,
                                          const Word& x, std::int64_t k, const Word& z,
                                          std::size_t ball_cap) {
  if (k == 0) throw std::invalid_argument("segment must have positive length");
  const Word y = concat(x, power_word(s, "s1", k));
  const std::int64_t r = std::min(exact_distance(s, rs, concat(invert(z), x), ball_cap),
                                  exact_distance(s, rs, concat(invert(z), y), ball_cap));
  if (r == 0) throw std::invalid_argument("segment endpoint coincides with the center");

  PathWitness w;
  w.label = "modification";
  w.alphabet = s.alphabet();
  w.base = x;
  w.end = y;
  w.center = z;
  w.radius = static_cast<double>(r) / 2;
  w.bound = 11.0 * static_cast<double>(abs64(k));
  w.bound_formula = "11 l(alpha)";
  w.constants = {{"r", double(r)}, {"offset", 0}};
  push_power(w.edges, gen(s, "s1"), k);
  if (verify_witness(s, rs, w).avoidance) return w;

  const std::int64_t c = std::min(r, 5 * abs64(k));
  PathWitness best = w;
  for (int side : {1, -1}) {
    PathWitness cand = w;
    cand.edges.clear();
    push_power(cand.edges, gen(s, "a1"), side * c);
    push_power(cand.edges, gen(s, "s1"), k);
    push_power(cand.edges, gen(s, "a1"), -side * c);
    cand.constants["offset"] = double(side * c);
    if (verify_witness(s, rs, cand).avoidance) return cand;
    if (side == 1) best = cand;
  }
  return best;
}

std::string witness_json(const PathWitness& w, const WitnessReport& rep) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["label"] = w.label;
  j["base"] = format_word(w.base);
  j["end"] = format_word(w.end);
  j["center"] = format_word(w.center);
  j["radius"] = w.radius;
  j["bound"] = w.bound;
  j["bound_formula"] = w.bound_formula;
  j["length"] = w.edges.size();
  ordered_json constants = ordered_json::object();
  for (const auto& [k, v] : w.constants) constants[k] = v;
  j["constants"] = constants;
  ordered_json edges = ordered_json::array();
  for (Code c : w.edges)
    edges.push_back(w.alphabet->name(index_of(c)) + (c < 0 ? "^-1" : ""));
  j["edges"] = edges;
  j["report"] = {{"endpoints", rep.endpoints},
                 {"avoidance", rep.avoidance},
                 {"length", rep.length},
                 {"unresolved", rep.unresolved},
                 {"min_value", rep.min_value},
                 {"failing", rep.failing}};
  ordered_json values = ordered_json::array(), sources = ordered_json::array();
  for (const auto& v : rep.evidence.vertices) {
    values.push_back(v.value);
    sources.push_back(v.kind == VertexEvidence::Kind::Retraction ? v.source
                      : v.kind == VertexEvidence::Kind::Exact    ? -1
                                                                 : -2);
  }
  j["evidence"] = {{"sources", rep.evidence.sources}, {"source", sources}, {"value", values}};
  return j.dump(2) + "\n";
}

}  // namespace divtower
