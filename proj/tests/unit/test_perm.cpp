#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "rcop/error.hpp"
#include "rcop/perm.hpp"
#include "rcop/rng.hpp"

using namespace rcop;

namespace {

Permutation random_permutation(int p, Rng& rng) {
  std::vector<int> im(static_cast<std::size_t>(p));
  std::iota(im.begin(), im.end(), 0);
  std::shuffle(im.begin(), im.end(), rng.engine());
  return Permutation(im);
}

// Orbit of the identity under right multiplication; an oracle that does not
// share code with closure().
std::size_t brute_group_order(const std::vector<Permutation>& gens, int p) {
  std::set<Permutation> seen{Permutation::identity(p)};
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto e : std::vector<Permutation>(seen.begin(), seen.end()))
      for (const auto& g : gens)
        if (seen.insert(compose(e, g)).second) grew = true;
  }
  return seen.size();
}

}  // namespace

TEST_CASE("cycle notation round trip") {
  const auto s = parse_cycles("(1,2,3)(4,5)", 6);
  CHECK(s(0) == 1);
  CHECK(s(2) == 0);
  CHECK(s(3) == 4);
  CHECK(s(5) == 5);
  CHECK(s.to_string() == "(1,2,3)(4,5)");
  CHECK(parse_cycles("( 4 , 5 )(3,1,2)", 6).to_string() == "(1,2,3)(4,5)");
  CHECK(parse_cycles("", 3).is_identity());
  CHECK(parse_cycles("()", 3).to_string() == "()");
  CHECK(parse_cycles("id", 3).is_identity());
}

TEST_CASE("malformed cycles are rejected") {
  for (const char* bad : {"(1,2", "(1,1)", "(0,1)", "(1,4)", "(1,2)(2,3)", "(a,b)", "1,2"}) {
    CAPTURE(bad);
    try {
      (void)parse_cycles(bad, 3);
      FAIL("accepted malformed input");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
    }
  }
}

TEST_CASE("generator lists split between cycles only") {
  CHECK(parse_generators("(1,2),(3,4)", 4).size() == 2);
  CHECK(parse_generators("(1,2)(3,4)", 4).size() == 1);
  CHECK(parse_generators("(1,2,3,4);(1,3)", 4).size() == 2);
  CHECK(Group::parse("(1,2)(3,4),(1,4)(2,3)", 4).to_string() == "(1,2)(3,4),(1,4)(2,3)");
}

TEST_CASE("composition applies the right factor first") {
  const auto a = parse_cycles("(1,2)", 3), b = parse_cycles("(2,3)", 3);
  // (a∘b)(1) = a(b(1)) = a(1) = 2
  CHECK(compose(a, b)(0) == 1);
  CHECK(compose(a, b).to_string() == "(1,2,3)");
  CHECK(compose(b, a).to_string() == "(1,3,2)");
}

TEST_CASE("order, power, inverse, totient") {
  const auto s = parse_cycles("(1,2,3)(4,5)", 5);
  CHECK(order(s) == 6);
  CHECK(power(s, 6).is_identity());
  CHECK(power(s, 3).to_string() == "(4,5)");
  CHECK(compose(s, s.inverse()).is_identity());
  const std::uint64_t expected[] = {0, 1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4};
  for (std::uint64_t n = 1; n <= 12; ++n) CHECK(euler_totient(n) == expected[n]);
  CHECK(euler_totient(2520) == 576);
}

TEST_CASE("canonical generator agrees with enumeration") {
  auto rng = Rng::stream(7, "perm-test");
  for (int trial = 0; trial < 400; ++trial) {
    const int p = 2 + static_cast<int>(rng.below(9));
    const auto s = random_permutation(p, rng);
    const auto c = cyclic_group(s);
    CAPTURE(s.to_string());
    CHECK(c.generator() == minimal_generator_by_enumeration(s));
    CHECK(c.order() == order(s));
    // every generator of the group has the same canonical form
    for (std::uint64_t k = 1; k < c.order(); ++k)
      if (std::gcd(k, c.order()) == 1) CHECK(cyclic_group(power(s, k)) == c);
  }
}

TEST_CASE("worked example keeps its generator") {
  // σ^5 = σ^{-1} has images (3,1,2,5,4,6), larger than σ's (2,3,1,5,4,6).
  const auto s = parse_cycles("(1,2,3)(4,5)", 6);
  CHECK(cyclic_group(s).generator() == s);
  CHECK(generator_count(cyclic_group(s)) == 2);
}

TEST_CASE("cyclic subgroup counts for small p") {
  const std::size_t expected[] = {1, 2, 5, 17, 67, 362};
  for (int p = 1; p <= 6; ++p) CHECK(enumerate_cyclic_subgroups(p).size() == expected[p - 1]);
  CHECK_THROWS_AS(enumerate_cyclic_subgroups(9), Error);
}

TEST_CASE("group closure") {
  const auto s4 = parse_generators("(1,2,3,4),(1,2)", 4);
  CHECK(closure(s4, 4).size() == 24);
  const auto d4 = parse_generators("(1,2,3,4),(1,3)", 4);
  CHECK(closure(d4, 4).size() == 8);
  CHECK(closure(d4, 4).size() == brute_group_order(d4, 4));
  const auto ex = parse_generators("(1,2,5,6)(3,4,7,8)(9,10,13,14)(11,12,15,16),(1,3,5,7)(2,8,6,4)(9,11,13,15)(10,16,14,12)", 16);
  CHECK(closure(ex, 16).size() == brute_group_order(ex, 16));
  CHECK_THROWS_AS(closure(s4, 4, 10), Error);
  const auto elems = closure(d4, 4);
  CHECK(elems.elements.front().is_identity());
}

TEST_CASE("orbits") {
  const auto o = orbits(Group::parse("(1,3)(2,4),(5,6)", 7));
  REQUIRE(o.classes.size() == 4);
  CHECK(o.classes[0] == std::vector<int>{0, 2});
  CHECK(o.classes[1] == std::vector<int>{1, 3});
  CHECK(o.classes[2] == std::vector<int>{4, 5});
  CHECK(o.classes[3] == std::vector<int>{6});
  CHECK(o.class_of[5] == 2);
}

TEST_CASE("transposition proposal is a distribution") {
  auto rng = Rng::stream(3, "proposal-test");
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + static_cast<int>(rng.below(6));
    const auto c = cyclic_group(random_permutation(p, rng));
    const auto dist = proposal_distribution(c);
    double total = 0.0;
    int transitions = 0;
    for (const auto& e : dist) {
      total += e.probability;
      transitions += e.transitions;
      CHECK(e.probability > 0.0);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(transitions == p * (p - 1) / 2);
    CHECK(std::is_sorted(dist.begin(), dist.end(),
                         [](const ProposalEntry& a, const ProposalEntry& b) { return a.group < b.group; }));
  }
}

TEST_CASE("rng streams are keyed, not ordered") {
  auto a = Rng::stream(1, "x", 0), b = Rng::stream(1, "x", 1), c = Rng::stream(1, "y", 0);
  const double a0 = a.uniform();
  CHECK(a0 != b.uniform());
  CHECK(a0 != c.uniform());
  CHECK(Rng::stream(1, "x", 0).uniform() == a0);
}
