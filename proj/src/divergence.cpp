#include "divtower/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace divtower {

BallTest::BallTest(const Solver& solver, std::vector<RetractionPtr> rs, std::int64_t radius,
                   std::size_t inner_cap)
    : solver_(solver), rs_(std::move(rs)), radius_(radius) {
  if (radius_ > 0)
    inner_ = ball_upto(solver_, static_cast<std::size_t>(radius_ - 1), inner_cap);
}

BallTest::Side BallTest::side(const Elem& v, std::int64_t lower) const {
  if (lower >= radius_) return Side::Outside;
  auto d = inner_.distance(v);
  if (d) return static_cast<std::int64_t>(*d) < radius_ ? Side::Inside : Side::Outside;
  if (static_cast<std::int64_t>(inner_.radius) >= radius_ - 1) return Side::Outside;
  return Side::Unresolved;
}

std::string to_string(AvoidanceResult::Status s) {
  switch (s) {
    case AvoidanceResult::Status::Finite: return "finite";
    case AvoidanceResult::Status::Infinite: return "infinite";
    case AvoidanceResult::Status::Unknown: return "unknown";
  }
  return "?";
}

namespace {

AvoidanceResult tree_rule(const Solver& solver, const Word& x, const Word& y,
                          std::int64_t radius) {
  // In a tree every path from x to y passes through the geodesic.
  AvoidanceResult res;
  Word g = concat(invert(x), y);
  Codes prefix = x.codes();
  bool clear = static_cast<std::int64_t>(prefix.size()) >= radius;
  for (Code c : g.codes()) {
    append_reduced(prefix, {c});
    clear = clear && static_cast<std::int64_t>(prefix.size()) >= radius;
  }
  (void)solver;
  if (clear) {
    res.status = AvoidanceResult::Status::Finite;
    res.length = res.upper_bound = static_cast<std::int64_t>(g.size());
    res.path = g;
  } else {
    res.status = AvoidanceResult::Status::Infinite;
    res.reason = "geodesic in a tree meets the ball";
  }
  return res;
}

struct Vertex {
  Elem u;  // inverse of the vertex
  std::int64_t g;
  std::int64_t parent;
  Code via;
  std::vector<RetImage> imgs;
};

struct Sweep {
  std::vector<Vertex> verts;
  std::unordered_map<std::string, std::size_t> seen;
  bool exhausted = true;   // whole component reached
  bool unresolved = false;  // an undecided vertex passed the bound
  bool capped = false;
};

class Walker {
 public:
  Walker(const Solver& solver, const std::vector<RetractionPtr>& rs, const BallTest& test,
         std::size_t cap)
      : solver_(solver), rs_(rs), test_(test), cap_(cap) {}

  // Heuristic distance from the vertex with inverse images imgs to target.
  std::int64_t h(const std::vector<RetImage>& imgs, const std::vector<RetImage>& target) const {
    std::int64_t best = 0;
    for (std::size_t k = 0; k < rs_.size(); ++k)
      best = std::max(best, rs_[k]->length(rs_[k]->mul(imgs[k], target[k])));
    return best;
  }

  std::vector<RetImage> images(const Word& w) const {
    std::vector<RetImage> out;
    for (const auto& r : rs_) out.push_back(r->image(w));
    return out;
  }

  // Breadth-first sweep from `from`, keeping vertices with g <= depth and
  // g + h <= bound, where h estimates the distance to `to`.
  Sweep sweep(const Word& from, const Word& to, std::int64_t depth, std::int64_t bound) {
    Sweep sw;
    const auto target = images(to);
    const Word fi = invert(from);
    Vertex start{solver_.normalize(fi).elem, 0, -1, 0, images(fi)};
    sw.seen.emplace(solver_.encode(start.u), 0);
    sw.verts.push_back(std::move(start));
    const std::size_t steps = solver_.alphabet()->size();
    for (std::size_t head = 0; head < sw.verts.size(); ++head) {
      if (sw.verts[head].g >= depth) {
        sw.exhausted = false;
        continue;
      }
      for (std::size_t gi = 0; gi < steps; ++gi)
        for (int sign : {1, -1}) {
          const Code c = code_of(gi, sign);
          const std::int64_t g = sw.verts[head].g + 1;
          auto imgs = sw.verts[head].imgs;
          for (std::size_t k = 0; k < rs_.size(); ++k) rs_[k]->lmul(-c, imgs[k]);
          if (g + h(imgs, target) > bound) {
            sw.exhausted = false;
            continue;
          }
          Elem u = sw.verts[head].u;
          solver_.lmul_generator(-c, u);
          std::string key = solver_.encode(u);
          if (sw.seen.count(key)) continue;
          auto side = classify(key, u, imgs);
          if (side == BallTest::Side::Inside) continue;
          if (side == BallTest::Side::Unresolved) {
            sw.unresolved = true;
            sw.exhausted = false;
            continue;
          }
          if (sw.verts.size() >= cap_) {
            sw.capped = true;
            sw.exhausted = false;
            return sw;
          }
          sw.seen.emplace(std::move(key), sw.verts.size());
          sw.verts.push_back({std::move(u), g, static_cast<std::int64_t>(head), c, std::move(imgs)});
        }
    }
    return sw;
  }

 private:
  BallTest::Side classify(const std::string& key, const Elem& u, const std::vector<RetImage>& imgs) {
    auto it = sides_.find(key);
    if (it != sides_.end()) return it->second;
    std::int64_t lower = 0;
    for (std::size_t k = 0; k < rs_.size(); ++k) lower = std::max(lower, rs_[k]->length(imgs[k]));
    auto side = test_.side(u, lower);
    sides_.emplace(key, side);
    return side;
  }

  const Solver& solver_;
  const std::vector<RetractionPtr>& rs_;
  const BallTest& test_;
  std::size_t cap_;
  std::unordered_map<std::string, BallTest::Side> sides_;
};

Codes trail(const Sweep& sw, std::size_t id) {
  Codes path;
  for (auto cur = static_cast<std::int64_t>(id); sw.verts[static_cast<std::size_t>(cur)].parent >= 0;
       cur = sw.verts[static_cast<std::size_t>(cur)].parent)
    path.push_back(sw.verts[static_cast<std::size_t>(cur)].via);
  std::reverse(path.begin(), path.end());
  return path;
}

// Iterative-bound bidirectional search. For each bound L both endpoints are
// swept to depth about L/2, pruned by the retraction heuristic.
AvoidanceResult search(const Solver& solver, const std::vector<RetractionPtr>& rs,
                       const BallTest& test, const Word& x, const Word& y,
                       const SearchCaps& caps) {
  AvoidanceResult res;
  const std::int64_t R = test.radius();
  if (solver.spec()->variant == Variant::Free) {
    for (const Word* w : {&x, &y})
      if (static_cast<std::int64_t>(w->size()) < R) throw EndpointInsideBall();
    return tree_rule(solver, x, y, R);
  }

  for (const Word* w : {&x, &y}) {
    auto side = test.side(solver.normalize(*w).elem, retract_lower_bound(rs, *w));
    if (side == BallTest::Side::Inside) throw EndpointInsideBall();
    if (side == BallTest::Side::Unresolved) {
      res.reason = "endpoint membership unresolved";
      return res;
    }
  }

  Walker walker(solver, rs, test, caps.node_cap);
  const std::int64_t start_bound = walker.h(walker.images(invert(x)), walker.images(y));
  bool undecided = false;
  for (std::int64_t L = start_bound;; ++L) {
    Sweep fw = walker.sweep(x, y, (L + 1) / 2, L);
    Sweep bw = fw.capped ? Sweep{} : walker.sweep(y, x, L / 2, L);
    res.explored = std::max(res.explored, fw.verts.size() + bw.verts.size());
    if (fw.capped || bw.capped) {
      res.reason = "node cap reached";
      return res;
    }
    std::int64_t best = -1;
    std::size_t fi = 0, bi = 0;
    for (const auto& [key, id] : fw.seen) {
      auto it = bw.seen.find(key);
      if (it == bw.seen.end()) continue;
      const std::int64_t len = fw.verts[id].g + bw.verts[it->second].g;
      if (len <= L && (best < 0 || len < best)) {
        best = len;
        fi = id;
        bi = it->second;
      }
    }
    if (best >= 0) {
      Codes path = trail(fw, fi);
      append_reduced(path, invert_codes(trail(bw, bi)));
      res.path = Word::from_codes(solver.alphabet(), std::move(path));
      res.upper_bound = best;
      if (undecided) {
        res.reason = "undecided vertices could shorten the path";
      } else {
        res.status = AvoidanceResult::Status::Finite;
        res.length = best;
      }
      return res;
    }
    undecided = undecided || fw.unresolved || bw.unresolved;
    if (fw.unresolved || bw.unresolved) ++res.unresolved;
    if (fw.exhausted || bw.exhausted) {
      if (undecided) {
        res.reason = "component exhausted except undecided vertices";
      } else {
        res.status = AvoidanceResult::Status::Infinite;
        res.reason = "component exhausted";
      }
      return res;
    }
  }
}

}  // namespace

AvoidanceResult avoidant_distance(const Solver& solver, const std::vector<RetractionPtr>& rs,
                                  const AvoidanceQuery& q) {
  if (q.radius < 0) throw std::invalid_argument("negative radius");
  Word zi = q.center.alphabet() ? invert(q.center) : Word(solver.alphabet());
  Word x = concat(zi, q.x), y = concat(zi, q.y);
  BallTest test(solver, rs, q.radius, q.caps.inner_ball_cap);
  return search(solver, rs, test, x, y, q.caps);
}

DeltaReport delta_rho(const Solver& solver, const std::vector<RetractionPtr>& rs, std::int64_t r,
                      double rho, const SearchCaps& caps, std::size_t pair_cap) {
  DeltaReport rep;
  rep.r = r;
  rep.rho = rho;
  rep.radius = static_cast<std::int64_t>(std::floor(rho * double(r)));
  CayleyBall b = ball(solver, static_cast<std::size_t>(r), caps.inner_ball_cap);
  std::vector<std::size_t> sphere;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (static_cast<std::int64_t>(b.dist[i]) == r) sphere.push_back(i);
  std::sort(sphere.begin(), sphere.end(),
            [&](std::size_t a, std::size_t c) { return b.keys[a] < b.keys[c]; });
  rep.sphere = sphere.size();
  const std::size_t total = sphere.size() * (sphere.size() - (sphere.empty() ? 0 : 1)) / 2;
  const std::size_t stride = total > pair_cap ? (total + pair_cap - 1) / pair_cap : 1;
  rep.sampled = stride > 1;
  BallTest test(solver, rs, rep.radius, caps.inner_ball_cap);
  std::size_t counter = 0;
  for (std::size_t i = 0; i < sphere.size(); ++i) {
    for (std::size_t j = i + 1; j < sphere.size(); ++j, ++counter) {
      if (counter % stride != 0) continue;
      ++rep.pairs;
      AvoidanceResult a =
          search(solver, rs, test, b.word_of(sphere[i]), b.word_of(sphere[j]), caps);
      switch (a.status) {
        case AvoidanceResult::Status::Finite:
          ++rep.resolved;
          rep.value = std::max(rep.value, a.length);
          break;
        case AvoidanceResult::Status::Infinite:
          ++rep.resolved;
          ++rep.infinite;
          break;
        case AvoidanceResult::Status::Unknown:
          ++rep.unknown;
          break;
      }
    }
  }
  return rep;
}

std::string delta_csv(const std::vector<DeltaReport>& rows) {
  std::ostringstream out;
  out << "r,rho,value,resolved_pairs,infinite_pairs,unknown_pairs\n";
  for (const auto& d : rows)
    out << d.r << ',' << d.rho << ',' << d.value << ',' << d.resolved << ',' << d.infinite << ','
        << d.unknown << '\n';
  return out.str();
}

CyclicReport cyclic_divergence(const Solver& solver, const std::vector<RetractionPtr>& rs,
                               const Word& c, std::int64_t r, double rho, const SearchCaps& caps) {
  if (c.empty()) throw std::invalid_argument("cyclic divergence needs a nontrivial element");
  CyclicReport rep;
  rep.r = r;
  const auto len = static_cast<std::int64_t>(c.size());
  rep.k = (r + len - 1) / len;
  rep.radius = static_cast<std::int64_t>(std::floor(rho * double(r)));
  Word pos(solver.alphabet()), neg(solver.alphabet());
  for (std::int64_t i = 0; i < rep.k; ++i) {
    pos = concat(pos, c);
    neg = concat(neg, invert(c));
  }
  AvoidanceQuery q{neg, pos, Word(solver.alphabet()), rep.radius, caps};
  rep.result = avoidant_distance(solver, rs, q);
  return rep;
}

static Word level_power(const Solver& s, int level, std::int64_t n) {
  if (n == 0) return Word(s.alphabet());
  return s.parse("s" + std::to_string(level) + "^" + std::to_string(n));
}

Word CornerProbe::alpha_end(const Solver& s) const {
  if (s1_part < 1 || s1_part > r) throw std::invalid_argument("corner s1 part must lie in [1, r]");
  return concat(level_power(s, 1, sign1 * s1_part), level_power(s, k, sign2 * (r - s1_part)));
}

Word CornerProbe::beta_end(const Solver& s) const { return level_power(s, k, sign3 * r); }

AvoidanceResult corner_probe(const Solver& solver, const std::vector<RetractionPtr>& rs,
                             const CornerProbe& p, const SearchCaps& caps) {
  if (p.k < 2) throw std::invalid_argument("corner level must be at least 2");
  if (p.r == 0) {
    AvoidanceQuery q{Word(solver.alphabet()), Word(solver.alphabet()), Word(solver.alphabet()), 0,
                     caps};
    return avoidant_distance(solver, rs, q);
  }
  AvoidanceQuery q{p.alpha_end(solver), p.beta_end(solver), Word(solver.alphabet()), p.r, caps};
  return avoidant_distance(solver, rs, q);
}

}  // namespace divtower
