#include "divtower/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace divtower {

std::optional<std::size_t> CayleyBall::find(const Elem& g) const {
  auto it = index.find(solver->encode(g));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> CayleyBall::distance(const Elem& g) const {
  auto i = find(g);
  if (!i) return std::nullopt;
  return dist[*i];
}

Word CayleyBall::word_of(std::size_t i) const {
  Codes w;
  for (auto cur = static_cast<std::int64_t>(i); parent[static_cast<std::size_t>(cur)] >= 0;
       cur = parent[static_cast<std::size_t>(cur)])
    w.push_back(via[static_cast<std::size_t>(cur)]);
  return Word::from_codes(solver->alphabet(), std::move(w));
}

std::vector<std::size_t> CayleyBall::sphere_counts() const {
  std::vector<std::size_t> out(radius + 1, 0);
  for (auto d : dist)
    if (d <= radius) ++out[d];
  return out;
}

static CayleyBall grow(const Solver& solver, std::size_t r, std::size_t node_cap,
                       const std::vector<std::size_t>& generators, bool partial) {
  CayleyBall b;
  b.solver = &solver;
  b.radius = r;
  std::vector<std::size_t> gens = generators;
  if (gens.empty())
    for (std::size_t i = 0; i < solver.alphabet()->size(); ++i) gens.push_back(i);
  for (std::size_t g : gens) {
    b.steps.push_back(code_of(g, 1));
    b.steps.push_back(code_of(g, -1));
  }
  struct Full {};
  auto add = [&](Elem e, std::uint32_t d, std::int64_t parent, Code via) {
    std::string key = solver.encode(e);
    if (b.index.count(key)) return;
    if (b.elems.size() >= node_cap) {
      if (!partial) throw PartialBall(d == 0 ? 0 : d - 1, node_cap);
      throw Full{};
    }
    b.index.emplace(key, b.elems.size());
    b.keys.push_back(std::move(key));
    b.elems.push_back(std::move(e));
    b.dist.push_back(d);
    b.parent.push_back(parent);
    b.via.push_back(via);
  };
  add(solver.identity(), 0, -1, 0);
  std::size_t begin = 0;
  for (std::uint32_t d = 1; d <= r; ++d) {
    const std::size_t end = b.elems.size();
    try {
      for (std::size_t i = begin; i < end; ++i) {
        for (Code c : b.steps) {
          Elem e = b.elems[i];
          solver.lmul_generator(c, e);
          add(std::move(e), d, static_cast<std::int64_t>(i), c);
        }
      }
    } catch (const Full&) {
      b.radius = d - 1;
      b.complete = false;
      return b;
    }
    begin = end;
  }
  return b;
}

CayleyBall ball(const Solver& solver, std::size_t r, std::size_t node_cap,
                const std::vector<std::size_t>& generators) {
  return grow(solver, r, node_cap, generators, false);
}

CayleyBall ball_upto(const Solver& solver, std::size_t r, std::size_t node_cap,
                     const std::vector<std::size_t>& generators) {
  return grow(solver, r, node_cap, generators, true);
}

std::string ball_csv(const CayleyBall& b) {
  std::ostringstream out;
  out << "radius,count\n";
  auto counts = b.sphere_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) out << k << ',' << counts[k] << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

std::int64_t Retraction::generator_length(std::size_t generator) const {
  RetImage img = identity();
  lmul(code_of(generator, 1), img);
  return length(img);
}

void Retraction::rmul(Code generator, RetImage& img) const {
  RetImage g = identity();
  lmul(generator, g);
  img = mul(img, g);
}

RetImage Retraction::image(const Word& w) const {
  RetImage img = identity();
  const Codes& c = w.codes();
  for (std::size_t i = c.size(); i-- > 0;) lmul(c[i], img);
  return img;
}

LatticeRetraction::LatticeRetraction(std::string name, AlphabetPtr free_alphabet,
                                     std::size_t lattice_rank, std::vector<GenImage> images)
    : Retraction(std::move(name)),
      free_(std::move(free_alphabet)),
      rank_(lattice_rank),
      images_(std::move(images)) {
  for (auto& g : images_) g.lat.resize(rank_, 0);
}

RetImage LatticeRetraction::identity() const {
  RetImage r;
  r.lat.assign(rank_, 0);
  return r;
}

void LatticeRetraction::lmul(Code generator, RetImage& img) const {
  const GenImage& g = images_[index_of(generator)];
  if (generator > 0) {
    // (w, v, s) * (w', v', s') = (w w', v + s(v'), s xor s')
    if (g.swap && rank_ >= 2) std::swap(img.lat[0], img.lat[1]);
    for (std::size_t i = 0; i < rank_; ++i) img.lat[i] += g.lat[i];
    Codes w = g.free;
    append_reduced(w, img.free);
    img.free = std::move(w);
  } else {
    // inverse of (w, v, s) is (w^-1, -s(v), s)
    for (std::size_t i = 0; i < rank_; ++i) img.lat[i] -= g.lat[i];
    if (g.swap && rank_ >= 2) std::swap(img.lat[0], img.lat[1]);
    Codes w = invert_codes(g.free);
    append_reduced(w, img.free);
    img.free = std::move(w);
  }
  img.swap = img.swap != g.swap;
}

void LatticeRetraction::rmul(Code generator, RetImage& img) const {
  const GenImage& g = images_[index_of(generator)];
  std::vector<std::int64_t> v = g.lat;
  if (generator < 0) {
    for (auto& x : v) x = -x;
    if (g.swap && rank_ >= 2) std::swap(v[0], v[1]);
  }
  if (img.swap && rank_ >= 2) std::swap(v[0], v[1]);
  for (std::size_t i = 0; i < rank_; ++i) img.lat[i] += v[i];
  append_reduced(img.free, generator > 0 ? g.free : invert_codes(g.free));
  img.swap = img.swap != g.swap;
}

RetImage LatticeRetraction::mul(const RetImage& a, const RetImage& b) const {
  RetImage r;
  r.free = a.free;
  append_reduced(r.free, b.free);
  r.lat = b.lat;
  if (a.swap && rank_ >= 2) std::swap(r.lat[0], r.lat[1]);
  for (std::size_t i = 0; i < rank_; ++i) r.lat[i] += a.lat[i];
  r.swap = a.swap != b.swap;
  return r;
}

std::int64_t LatticeRetraction::length(const RetImage& img) const {
  std::int64_t n = static_cast<std::int64_t>(img.free.size()) + (img.swap ? 1 : 0);
  for (auto v : img.lat) n += v < 0 ? -v : v;
  return n;
}

BallRetraction::BallRetraction(std::string name, std::shared_ptr<const Solver> target,
                               std::vector<Codes> images, std::size_t radius,
                               std::size_t node_cap)
    : Retraction(std::move(name)), target_(std::move(target)), images_(std::move(images)) {
  ball_ = ball(*target_, radius, node_cap);
}

RetImage BallRetraction::identity() const {
  RetImage r;
  r.elem = target_->identity();
  return r;
}

void BallRetraction::lmul(Code generator, RetImage& img) const {
  const Codes& w = images_[index_of(generator)];
  if (generator > 0) {
    for (std::size_t i = w.size(); i-- > 0;) target_->lmul(w[i], img.elem);
  } else {
    for (Code c : w) target_->lmul(-c, img.elem);
  }
}

RetImage BallRetraction::mul(const RetImage& a, const RetImage& b) const {
  RetImage r;
  r.elem = target_->mul(a.elem, b.elem);
  return r;
}

std::int64_t BallRetraction::length(const RetImage& img) const {
  auto d = ball_.distance(img.elem);
  return d ? static_cast<std::int64_t>(*d) : static_cast<std::int64_t>(ball_.radius) + 1;
}

namespace {

std::string meta_of(const GroupSpec& s, const char* key) {
  auto it = s.meta.find(key);
  return it == s.meta.end() ? std::string() : it->second;
}

using NameImage = std::function<LatticeRetraction::GenImage(const std::string&)>;

RetractionPtr lattice_from(const std::string& name, const Alphabet& source,
                           AlphabetPtr free_alphabet, std::size_t rank, const NameImage& f) {
  std::vector<LatticeRetraction::GenImage> images;
  for (const auto& g : source.names()) images.push_back(f(g));
  return std::make_shared<LatticeRetraction>(name, std::move(free_alphabet), rank,
                                             std::move(images));
}

std::string stem(const std::string& g) {
  std::size_t i = g.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(g[i - 1]))) --i;
  return g.substr(0, i);
}

std::string digits(const std::string& g) { return g.substr(stem(g).size()); }

}  // namespace

std::vector<RetractionPtr> standard_retractions(const Solver& solver, std::size_t h_radius) {
  const GroupSpec& spec = *solver.spec();
  const Alphabet& S = *solver.alphabet();
  std::vector<RetractionPtr> out;
  const std::string family = meta_of(spec, "family");

  if (family == "G" || family == "B") {
    const int m = std::stoi(meta_of(spec, "m"));
    const unsigned p = static_cast<unsigned>(std::stoul(meta_of(spec, "p")));
    const std::string top = "s" + std::to_string(m);
    auto is_level = [&](const std::string& g) { return stem(g) == "s" && !digits(g).empty(); };
    auto level_image = [&](const std::string& g) {
      LatticeRetraction::GenImage im;
      if (!is_level(g)) return im;
      if (m == 1) {
        im.lat = {1};
      } else {
        im.lat = g == top ? std::vector<std::int64_t>{0, 1} : std::vector<std::int64_t>{1, 0};
      }
      return im;
    };
    const std::size_t level_rank = m == 1 ? 1 : 2;

    if (family == "G") {
      std::vector<std::string> zs;
      for (unsigned i = 1; i <= p; ++i) zs.push_back("z" + std::to_string(i));
      auto Fz = make_alphabet(zs);
      auto z_part = [&](const std::string& g) {
        Codes w;
        const std::string st = stem(g);
        if (st == "z" || st == "a" || st == "b") w.push_back(code_of(Fz->index("z" + digits(g)), 1));
        return w;
      };
      out.push_back(lattice_from("psi_z", S, Fz, 0, [&](const std::string& g) {
        LatticeRetraction::GenImage im;
        im.free = z_part(g);
        return im;
      }));
      out.push_back(lattice_from("psi_z_levels", S, Fz, level_rank, [&](const std::string& g) {
        auto im = level_image(g);
        im.free = z_part(g);
        return im;
      }));
      if (m == 2) {
        auto K = make_alphabet({"s1", "s2"});
        out.push_back(lattice_from("levels_free", S, K, 0, [&](const std::string& g) {
          LatticeRetraction::GenImage im;
          if (g == "s1" || g == "s2") im.free = {code_of(K->index(g), 1)};
          return im;
        }));
      }
      if (m == 3) {
        out.push_back(lattice_from("levels_swap", S, make_alphabet({}), 2,
                                   [&](const std::string& g) {
                                     LatticeRetraction::GenImage im;
                                     if (g == "s1") im.lat = {1, 0};
                                     if (g == "s2") im.lat = {0, 1};
                                     if (g == "s3") im.swap = true;
                                     return im;
                                   }));
      }
      if (m == 1 && !meta_of(spec, "phi_power").empty() && h_radius > 0) {
        auto H = phi_base(static_cast<unsigned>(std::stoul(meta_of(spec, "phi_power"))));
        auto target = std::make_shared<const Solver>(H.H, solver.cap());
        const Alphabet& T = *target->primitives();
        std::vector<Codes> images;
        for (const auto& g : S.names()) {
          const std::string st = stem(g);
          Codes w;
          if (st == "d" || g == "t") w.push_back(code_of(T.index(g), 1));
          if (st == "x" || st == "a") w.push_back(code_of(T.index("d" + digits(g)), 1));
          images.push_back(w);
        }
        out.push_back(std::make_shared<BallRetraction>("psi_H", target, std::move(images),
                                                       h_radius, 5'000'000));
      }
    } else {
      out.push_back(lattice_from("levels", S, make_alphabet({}), level_rank, level_image));
    }
    return out;
  }

  if (spec.variant == Variant::Free) {
    auto F = make_alphabet(spec.gens);
    out.push_back(lattice_from("self", S, F, 0, [&](const std::string& g) {
      LatticeRetraction::GenImage im;
      im.free = {code_of(F->index(g), 1)};
      return im;
    }));
    return out;
  }
  if (spec.variant == Variant::DirectProduct) {
    bool cyclic = true;
    for (const auto& c : spec.children)
      cyclic = cyclic && c->variant == Variant::Free && c->gens.size() == 1;
    if (cyclic) {
      const std::size_t k = spec.children.size();
      out.push_back(lattice_from("self", S, make_alphabet({}), k, [&](const std::string& g) {
        LatticeRetraction::GenImage im;
        im.lat.assign(k, 0);
        for (std::size_t i = 0; i < k; ++i)
          if (spec.children[i]->gens[0] == g) im.lat[i] = 1;
        return im;
      }));
    }
  }
  return out;
}

std::vector<std::string> retraction_defects(const Solver& solver, const Retraction& r) {
  std::vector<std::string> bad;
  for (std::size_t g = 0; g < solver.alphabet()->size(); ++g)
    if (r.generator_length(g) > 1) bad.push_back("generator " + solver.alphabet()->name(g));
  for (const auto& rel : relators(*solver.spec()))
    if (r.length_of(rel) != 0) bad.push_back(format_word(rel));
  return bad;
}

std::int64_t retract_lower_bound(const std::vector<RetractionPtr>& rs, const Word& w) {
  std::int64_t best = 0;
  for (const auto& r : rs) best = std::max(best, r->length_of(w));
  return best;
}

LengthResult word_length(const CayleyBall& b, const std::vector<RetractionPtr>& rs,
                         const Word& w) {
  NormalForm nf = b.solver->normalize(w);
  auto it = b.index.find(nf.encoding);
  if (it != b.index.end()) return {LengthResult::Kind::Exact, b.dist[it->second]};
  std::int64_t lb = std::max<std::int64_t>(retract_lower_bound(rs, w),
                                           static_cast<std::int64_t>(b.radius) + 1);
  if (lb == static_cast<std::int64_t>(w.size())) return {LengthResult::Kind::Exact, lb};
  return {LengthResult::Kind::LowerBound, lb};
}

std::optional<std::int64_t> certified_length(const std::vector<RetractionPtr>& rs, const Word& w) {
  if (retract_lower_bound(rs, w) == static_cast<std::int64_t>(w.size()))
    return static_cast<std::int64_t>(w.size());
  return std::nullopt;
}

DistortionTable distortion(const Solver& ambient, const MembershipOracle& subgroup,
                           std::size_t n_max, std::size_t node_cap) {
  CayleyBall b = ball(ambient, n_max, node_cap);
  DistortionTable t;
  t.ball_size = b.size();
  t.raw.assign(n_max + 1, 0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto [w, rep] = ambient.decompose(subgroup, b.elems[i]);
    if (!ambient.is_trivial(rep)) continue;
    auto& slot = t.raw[b.dist[i]];
    slot = std::max<std::int64_t>(slot, static_cast<std::int64_t>(w.size()));
  }
  for (std::size_t n = 1; n <= n_max; ++n) t.raw[n] = std::max(t.raw[n], t.raw[n - 1]);
  for (std::size_t n = 0; n <= n_max; ++n)
    t.normalized.push_back(t.raw[n] + static_cast<std::int64_t>(n));
  return t;
}

std::string distortion_csv(const DistortionTable& t) {
  std::ostringstream out;
  out << "n,dist,normalized\n";
  for (std::size_t n = 0; n < t.raw.size(); ++n)
    out << n << ',' << t.raw[n] << ',' << t.normalized[n] << '\n';
  return out.str();
}

double interpolate(const std::vector<std::int64_t>& table, double x) {
  if (table.empty()) throw std::invalid_argument("empty table");
  if (x <= 0) return static_cast<double>(table.front());
  const double last = static_cast<double>(table.size() - 1);
  if (x >= last) return static_cast<double>(table.back());
  auto i = static_cast<std::size_t>(std::floor(x));
  const double frac = x - static_cast<double>(i);
  return static_cast<double>(table[i]) * (1 - frac) + static_cast<double>(table[i + 1]) * frac;
}

// ---------------------------------------------------------------------------

InverseDistortion InverseDistortion::from_table(const std::vector<std::int64_t>& normalized) {
  if (normalized.size() < 2) throw std::invalid_argument("distortion table too short");
  for (std::size_t i = 1; i < normalized.size(); ++i)
    if (normalized[i] <= normalized[i - 1])
      throw std::invalid_argument("distortion table is not strictly increasing");
  InverseDistortion f;
  f.kind_ = Kind::Table;
  f.table_ = normalized;
  return f;
}

InverseDistortion InverseDistortion::identity() { return {}; }

InverseDistortion InverseDistortion::power(double beta) {
  if (beta < 1) throw std::invalid_argument("power distortion needs beta >= 1");
  InverseDistortion f;
  f.kind_ = Kind::Power;
  f.param_ = beta;
  return f;
}

InverseDistortion InverseDistortion::exponential(double base) {
  if (base <= 1) throw std::invalid_argument("exponential distortion needs base > 1");
  InverseDistortion f;
  f.kind_ = Kind::Exponential;
  f.param_ = base;
  return f;
}

InverseDistortion InverseDistortion::phi_envelope() {
  InverseDistortion f;
  f.kind_ = Kind::PhiEnvelope;
  return f;
}

double InverseDistortion::dist(double n) const {
  switch (kind_) {
    case Kind::Identity: return n;
    case Kind::Power: return std::pow(n, param_);
    case Kind::Exponential: return std::pow(param_, n) - 1 + n;
    case Kind::PhiEnvelope: return n * std::pow(3.0, n / 2) + n;
    case Kind::Table: {
      const double last = static_cast<double>(table_.size() - 1);
      if (n <= last) return interpolate(table_, n);
      const double slope = static_cast<double>(table_.back() - table_[table_.size() - 2]);
      return static_cast<double>(table_.back()) + slope * (n - last);
    }
  }
  return n;
}

double InverseDistortion::operator()(double r) const {
  if (r <= 0) return 0;
  switch (kind_) {
    case Kind::Identity: return r;
    case Kind::Power: return std::pow(r, 1 / param_);
    case Kind::Table:
    case Kind::Exponential:
    case Kind::PhiEnvelope: {
      // dist is continuous, increasing, dist(0) = table_[0] or 0, dist(r) >= r.
      double lo = 0, hi = std::max(1.0, r);
      for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = (lo + hi) / 2;
        (dist(mid) <= r ? lo : hi) = mid;
      }
      return lo;
    }
  }
  return r;
}

bool InverseDistortion::extrapolated(double r) const {
  return kind_ == Kind::Table && r > static_cast<double>(table_.back());
}

std::string InverseDistortion::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Identity: out << "identity"; break;
    case Kind::Power: out << "power 1/" << param_; break;
    case Kind::Exponential: out << "log base " << param_; break;
    case Kind::PhiEnvelope: out << "inverse of n*3^(n/2)+n"; break;
    case Kind::Table: out << "table to " << table_.back(); break;
  }
  return out.str();
}

}  // namespace divtower
