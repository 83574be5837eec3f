#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "divtower/metrics.hpp"

namespace divtower {

class EndpointInsideBall : public std::invalid_argument {
 public:
  EndpointInsideBall() : std::invalid_argument("endpoint lies inside the avoided open ball") {}
};

struct SearchCaps {
  std::size_t node_cap = 200'000;       // vertices kept per sweep
  std::size_t inner_ball_cap = 200'000;  // nodes in the exact ball used for inside tests
};

// Decides d(e, v) >= radius for vertices of the Cayley graph, using retraction
// bounds first and an exact ball of radius radius-1 second.
class BallTest {
 public:
  enum class Side { Inside, Outside, Unresolved };
  BallTest(const Solver& solver, std::vector<RetractionPtr> rs, std::int64_t radius,
           std::size_t inner_cap);
  // lower is the best retraction bound already known for the vertex.
  Side side(const Elem& v, std::int64_t lower) const;
  std::int64_t radius() const { return radius_; }
  bool inner_complete() const { return inner_.complete; }

 private:
  const Solver& solver_;
  std::vector<RetractionPtr> rs_;
  std::int64_t radius_;
  CayleyBall inner_;
};

struct AvoidanceQuery {
  Word x;
  Word y;
  Word center;  // empty word for the identity
  std::int64_t radius = 0;
  SearchCaps caps;
};

struct AvoidanceResult {
  enum class Status { Finite, Infinite, Unknown };
  Status status = Status::Unknown;
  std::int64_t length = -1;       // exact when Finite
  std::int64_t upper_bound = -1;  // best path found, when any
  std::size_t explored = 0;
  std::size_t unresolved = 0;
  Word path;  // edge labels from x to y
  std::string reason;
};

std::string to_string(AvoidanceResult::Status s);

// Shortest path from x to y in the Cayley graph outside the open ball of the
// given radius about the center.
AvoidanceResult avoidant_distance(const Solver& solver, const std::vector<RetractionPtr>& rs,
                                  const AvoidanceQuery& q);

struct DeltaReport {
  std::int64_t r = 0;
  double rho = 0;
  std::int64_t radius = 0;  // floor(rho r)
  std::int64_t value = -1;  // sup over finite pairs, -1 when there is none
  std::size_t pairs = 0;
  std::size_t resolved = 0;
  std::size_t infinite = 0;
  std::size_t unknown = 0;
  std::size_t sphere = 0;
  bool sampled = false;
};

// delta_rho(r) over pairs of the sphere S(e, r). At most pair_cap pairs are
// examined, picked by a fixed stride over the sorted canonical encodings.
DeltaReport delta_rho(const Solver& solver, const std::vector<RetractionPtr>& rs, std::int64_t r,
                      double rho, const SearchCaps& caps, std::size_t pair_cap = 2000);

std::string delta_csv(const std::vector<DeltaReport>& rows);

struct CyclicReport {
  std::int64_t r = 0;
  std::int64_t k = 0;
  std::int64_t radius = 0;
  AvoidanceResult result;
};

// Avoidant distance between c^-k and c^k, k = ceil(r / |c|), avoiding B(e, floor(rho r)).
CyclicReport cyclic_divergence(const Solver& solver, const std::vector<RetractionPtr>& rs,
                               const Word& c, std::int64_t r, double rho, const SearchCaps& caps);

struct CornerProbe {
  int k = 2;
  std::int64_t r = 0;
  // The (1,k)-ray prefix s1^(sign1 * j) s_k^(sign2 * (r - j)); j = r gives a 1-ray.
  std::int64_t s1_part = 0;
  int sign1 = 1;
  int sign2 = 1;
  // The k-ray prefix s_k^(sign3 * r).
  int sign3 = 1;
  Word alpha_end(const Solver& s) const;
  Word beta_end(const Solver& s) const;
};

AvoidanceResult corner_probe(const Solver& solver, const std::vector<RetractionPtr>& rs,
                             const CornerProbe& p, const SearchCaps& caps);

}  // namespace divtower
