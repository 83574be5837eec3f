#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "divtower/normal_form.hpp"

namespace divtower {

class PartialBall : public std::runtime_error {
 public:
  PartialBall(std::size_t completed, std::size_t cap)
      : std::runtime_error("node cap " + std::to_string(cap) + " reached; ball complete to radius " +
                           std::to_string(completed)),
        completed_(completed) {}
  std::size_t completed_radius() const { return completed_; }

 private:
  std::size_t completed_;
};

// Exact ball B(e, r) in the Cayley graph over a set of generators.
struct CayleyBall {
  const Solver* solver = nullptr;
  std::vector<Code> steps;  // signed generator codes, in expansion order
  // Completed radius; every element within it is present.
  std::size_t radius = 0;
  bool complete = true;
  std::vector<Elem> elems;
  std::vector<std::string> keys;
  std::vector<std::uint32_t> dist;
  std::vector<std::int64_t> parent;
  std::vector<Code> via;  // elems[i] = via[i] * elems[parent[i]]
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return elems.size(); }
  std::optional<std::size_t> find(const Elem& g) const;
  std::optional<std::uint32_t> distance(const Elem& g) const;
  // Geodesic word over the generating set.
  Word word_of(std::size_t i) const;
  // counts[k] = size of the sphere of radius k.
  std::vector<std::size_t> sphere_counts() const;
};

// Generators given by index into the solver's generating set; empty means all.
// Throws PartialBall at the node cap.
CayleyBall ball(const Solver& solver, std::size_t r, std::size_t node_cap,
                const std::vector<std::size_t>& generators = {});
// Same, but stops at the node cap and returns the partial ball with complete = false.
CayleyBall ball_upto(const Solver& solver, std::size_t r, std::size_t node_cap,
                     const std::vector<std::size_t>& generators = {});

std::string ball_csv(const CayleyBall& b);

// Image of an element under a retraction. Unused fields stay empty.
struct RetImage {
  Codes free;
  std::vector<std::int64_t> lat;
  bool swap = false;
  Elem elem;
};

// Homomorphism onto a target whose generators have length at most one, so the
// target length of an image bounds the source length from below.
class Retraction {
 public:
  virtual ~Retraction() = default;
  const std::string& name() const { return name_; }
  virtual RetImage identity() const = 0;
  // Left-multiplies by a generator of the source generating set.
  virtual void lmul(Code generator, RetImage& img) const = 0;
  // Right-multiplies by a generator.
  virtual void rmul(Code generator, RetImage& img) const;
  virtual std::int64_t length(const RetImage& img) const = 0;
  virtual RetImage mul(const RetImage& a, const RetImage& b) const = 0;
  // Length of a generator image, at most one for a valid retraction.
  std::int64_t generator_length(std::size_t generator) const;
  RetImage image(const Word& w) const;
  std::int64_t length_of(const Word& w) const { return length(image(w)); }

 protected:
  explicit Retraction(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

using RetractionPtr = std::shared_ptr<const Retraction>;

// Target F(free names) x Z^k, optionally with the first two lattice
// coordinates swapped by an order-two letter. Exact length is
// |free| + |lattice|_1 + swap bit.
class LatticeRetraction : public Retraction {
 public:
  struct GenImage {
    Codes free;
    std::vector<std::int64_t> lat;
    bool swap = false;
  };
  LatticeRetraction(std::string name, AlphabetPtr free_alphabet, std::size_t lattice_rank,
                    std::vector<GenImage> images);
  RetImage identity() const override;
  void lmul(Code generator, RetImage& img) const override;
  void rmul(Code generator, RetImage& img) const override;
  std::int64_t length(const RetImage& img) const override;
  RetImage mul(const RetImage& a, const RetImage& b) const override;
  const AlphabetPtr& free_alphabet() const { return free_; }

 private:
  AlphabetPtr free_;
  std::size_t rank_;
  std::vector<GenImage> images_;
};

// Target given by another solvable spec; length is exact inside a
// precomputed ball and reported as radius+1 outside it.
class BallRetraction : public Retraction {
 public:
  BallRetraction(std::string name, std::shared_ptr<const Solver> target,
                 std::vector<Codes> images, std::size_t radius, std::size_t node_cap);
  RetImage identity() const override;
  void lmul(Code generator, RetImage& img) const override;
  std::int64_t length(const RetImage& img) const override;
  RetImage mul(const RetImage& a, const RetImage& b) const override;

 private:
  std::shared_ptr<const Solver> target_;
  std::vector<Codes> images_;  // primitive codes of the target
  CayleyBall ball_;
};

// The retractions available for a spec: towers G_m and B_m, free groups,
// and products of cyclic groups.
std::vector<RetractionPtr> standard_retractions(const Solver& solver, std::size_t h_radius = 5);

// Names of the relators of the solver's spec whose image is nontrivial.
std::vector<std::string> retraction_defects(const Solver& solver, const Retraction& r);

std::int64_t retract_lower_bound(const std::vector<RetractionPtr>& rs, const Word& w);

struct LengthResult {
  enum class Kind { Exact, LowerBound };
  Kind kind = Kind::LowerBound;
  std::int64_t value = 0;
};

// Exact when found in the ball; otherwise the best lower bound, which is at
// least the ball radius plus one.
LengthResult word_length(const CayleyBall& b, const std::vector<RetractionPtr>& rs,
                         const Word& w);

// Exact length of an explicit word when a retraction certifies it is geodesic.
std::optional<std::int64_t> certified_length(const std::vector<RetractionPtr>& rs, const Word& w);

struct DistortionTable {
  std::vector<std::int64_t> raw;         // raw[n] = Dist(n)
  std::vector<std::int64_t> normalized;  // Dist(n) + n
  std::size_t ball_size = 0;
};

// Exhaustive distortion of an edge subgroup over the ball of radius n_max.
DistortionTable distortion(const Solver& ambient, const MembershipOracle& subgroup,
                           std::size_t n_max, std::size_t node_cap);

std::string distortion_csv(const DistortionTable& t);

// Linear interpolation of an integer table on [0, size-1].
double interpolate(const std::vector<std::int64_t>& table, double x);

// The inverse f of a monotone normalized distortion Dist.
class InverseDistortion {
 public:
  enum class Kind { Table, Identity, Power, Exponential, PhiEnvelope };

  static InverseDistortion from_table(const std::vector<std::int64_t>& normalized);
  static InverseDistortion identity();
  // Dist(n) = n^beta.
  static InverseDistortion power(double beta);
  // Dist(n) = base^n + n.
  static InverseDistortion exponential(double base);
  // Dist(n) = n * 3^(n/2) + n, an upper bound for the normalized fiber
  // distortion in F x|_phi Z.
  static InverseDistortion phi_envelope();

  Kind kind() const { return kind_; }
  double operator()(double r) const;
  double dist(double n) const;
  // True when r lies past the table range.
  bool extrapolated(double r) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Identity;
  double param_ = 1.0;
  std::vector<std::int64_t> table_;
};

}  // namespace divtower
