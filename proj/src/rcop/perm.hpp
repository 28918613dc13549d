#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rcop {

// A permutation of {0,...,p-1}. Text forms (cycle notation, image lists) are
// 1-based; everything in memory is 0-based.
class Permutation {
 public:
  Permutation() = default;

  /// Validates that `images` is a bijection of {0,...,p-1}.
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int p);
  static Permutation transposition(int p, int i, int j);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& images() const { return images_; }

  Permutation inverse() const;
  bool is_identity() const;

  /// Disjoint cycles of length >= 2, each starting at its smallest element,
  /// sorted by that element.
  std::vector<std::vector<int>> cycles() const;

  /// Canonical cycle notation, e.g. "(1,2,3)(4,5)"; the identity prints as "()".
  std::string to_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) {
    return a.images_ <=> b.images_;
  }

 private:
  std::vector<int> images_;
};

struct PermutationHash {
  std::size_t operator()(const Permutation& s) const noexcept;
};

/// (a∘b)(i) = a(b(i)).
Permutation compose(const Permutation& a, const Permutation& b);
Permutation power(const Permutation& s, std::uint64_t k);

/// Parses a product of disjoint cycles such as "(1,2)(3,4)"; "" and "()" give
/// the identity.
Permutation parse_cycles(std::string_view text, int p);

/// Parses a generator list: generators are separated by ',' or ';' placed
/// between closing and opening parentheses, e.g. "(1,2),(3,4)" has two
/// generators while "(1,2)(3,4)" has one.
std::vector<Permutation> parse_generators(std::string_view text, int p);

std::uint64_t order(const Permutation& s);
std::uint64_t euler_totient(std::uint64_t n);

// A cyclic subgroup of S_p identified by its lexicographically minimal
// generator (compared on image tuples).
class CyclicGroup {
 public:
  CyclicGroup() = default;

  int p() const { return generator_.size(); }
  const Permutation& generator() const { return generator_; }
  std::uint64_t order() const { return order_; }

  friend bool operator==(const CyclicGroup& a, const CyclicGroup& b) {
    return a.generator_ == b.generator_;
  }
  friend auto operator<=>(const CyclicGroup& a, const CyclicGroup& b) {
    return a.generator_ <=> b.generator_;
  }

 private:
  friend CyclicGroup cyclic_group(const Permutation& s);
  CyclicGroup(Permutation g, std::uint64_t n) : generator_(std::move(g)), order_(n) {}

  Permutation generator_;
  std::uint64_t order_ = 1;
};

/// Canonical form of <s>. Resolves the minimal generator position by position
/// with residue constraints on the exponent, so it never enumerates <s>.
CyclicGroup cyclic_group(const Permutation& s);

/// Reference implementation: enumerates s^k for all k coprime to |s|.
Permutation minimal_generator_by_enumeration(const Permutation& s);

/// Number of permutations generating c (Euler totient of |c|).
std::uint64_t generator_count(const CyclicGroup& c);

/// All cyclic subgroups of S_p, sorted by canonical generator.
std::vector<CyclicGroup> enumerate_cyclic_subgroups(int p, int cap = 8);

// A permutation group given by generators.
struct Group {
  int p = 0;
  std::vector<Permutation> generators;

  static Group trivial(int p) { return Group{p, {}}; }
  static Group from_cyclic(const CyclicGroup& c);
  static Group parse(std::string_view text, int p);

  std::string to_string() const;
};

struct SubgroupElements {
  int p = 0;
  std::vector<Permutation> generators;
  std::vector<Permutation> elements;  // sorted; elements.front() is the identity

  std::size_t size() const { return elements.size(); }
};

inline constexpr std::size_t kDefaultClosureCap = 1'000'000;

SubgroupElements closure(std::span<const Permutation> generators, int p,
                         std::size_t cap = kDefaultClosureCap);

struct Orbits {
  std::vector<std::vector<int>> classes;  // sorted members, first-occurrence order
  std::vector<int> representatives;       // smallest member of each class
  std::vector<int> sizes;
  std::vector<int> class_of;              // vertex -> class index
};

Orbits orbits(int p, std::span<const Permutation> generators);
inline Orbits orbits(const Group& g) { return orbits(g.p, g.generators); }

struct ProposalEntry {
  CyclicGroup group;
  double probability = 0.0;
  int transitions = 0;  // number of transpositions leading there
};

/// Distribution of <nu(c)∘t> for t uniform over the p(p-1)/2 transpositions,
/// sorted by target group.
std::vector<ProposalEntry> proposal_distribution(const CyclicGroup& c);

}  // namespace rcop
