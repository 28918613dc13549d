#include "rcop/perm.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "rcop/error.hpp"

namespace rcop {

namespace {

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

struct CycleIndex {
  std::vector<std::vector<int>> cycles;  // every cycle, fixed points included
  std::vector<int> cycle_of;
  std::vector<int> position;
};

CycleIndex index_cycles(const Permutation& s) {
  const int p = s.size();
  CycleIndex idx;
  idx.cycle_of.assign(static_cast<std::size_t>(p), -1);
  idx.position.assign(static_cast<std::size_t>(p), 0);
  for (int i = 0; i < p; ++i) {
    if (idx.cycle_of[i] >= 0) continue;
    std::vector<int> cyc;
    int j = i;
    do {
      idx.cycle_of[j] = static_cast<int>(idx.cycles.size());
      idx.position[j] = static_cast<int>(cyc.size());
      cyc.push_back(j);
      j = s(j);
    } while (j != i);
    idx.cycles.push_back(std::move(cyc));
  }
  return idx;
}

void skip_space(std::string_view text, std::size_t& pos) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
}

}  // namespace

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (int v : images_) {
    if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)])
      fail(ErrorKind::InvalidArgument, "image list is not a permutation");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int p) {
  std::vector<int> im(static_cast<std::size_t>(p));
  std::iota(im.begin(), im.end(), 0);
  Permutation s;
  s.images_ = std::move(im);
  return s;
}

Permutation Permutation::transposition(int p, int i, int j) {
  Permutation s = identity(p);
  std::swap(s.images_[static_cast<std::size_t>(i)], s.images_[static_cast<std::size_t>(j)]);
  return s;
}

Permutation Permutation::inverse() const {
  Permutation r;
  r.images_.resize(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i)
    r.images_[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
  return r;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != static_cast<int>(i)) return false;
  return true;
}

std::vector<std::vector<int>> Permutation::cycles() const {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(images_.size(), 0);
  for (int i = 0; i < size(); ++i) {
    if (seen[i] || images_[i] == i) continue;
    std::vector<int> cyc;
    for (int j = i; !seen[j]; j = images_[j]) {
      seen[j] = 1;
      cyc.push_back(j);
    }
    out.push_back(std::move(cyc));
  }
  return out;
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  auto cyc = cycles();
  if (cyc.empty()) return "()";
  for (const auto& c : cyc) {
    os << '(';
    for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << c[k] + 1;
    os << ')';
  }
  return os.str();
}

std::size_t PermutationHash::operator()(const Permutation& s) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (int v : s.images()) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) fail(ErrorKind::InvalidArgument, "compose: size mismatch");
  std::vector<int> im(static_cast<std::size_t>(a.size()));
  for (int i = 0; i < a.size(); ++i) im[static_cast<std::size_t>(i)] = a(b(i));
  return Permutation(std::move(im));
}

Permutation power(const Permutation& s, std::uint64_t k) {
  const auto idx = index_cycles(s);
  std::vector<int> im(static_cast<std::size_t>(s.size()));
  for (const auto& cyc : idx.cycles) {
    const std::size_t len = cyc.size();
    const std::size_t shift = static_cast<std::size_t>(k % len);
    for (std::size_t t = 0; t < len; ++t) im[static_cast<std::size_t>(cyc[t])] = cyc[(t + shift) % len];
  }
  return Permutation(std::move(im));
}

Permutation parse_cycles(std::string_view text, int p) {
  if (p < 0) fail(ErrorKind::Parse, "negative dimension");
  std::vector<int> im(static_cast<std::size_t>(p));
  std::iota(im.begin(), im.end(), 0);
  std::vector<char> used(static_cast<std::size_t>(p), 0);
  std::size_t pos = 0;
  skip_space(text, pos);
  if (text.substr(pos) == "id") return Permutation(std::move(im));
  while (true) {
    skip_space(text, pos);
    if (pos == text.size()) break;
    if (text[pos] != '(') fail(ErrorKind::Parse, "expected '(' in cycle notation: " + std::string(text));
    ++pos;
    std::vector<int> cyc;
    while (true) {
      skip_space(text, pos);
      if (pos < text.size() && text[pos] == ')' && cyc.empty()) break;
      std::size_t start = pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
      if (start == pos) fail(ErrorKind::Parse, "expected an index in cycle notation: " + std::string(text));
      long v = std::stol(std::string(text.substr(start, pos - start)));
      if (v < 1 || v > p)
        fail(ErrorKind::Parse, "index " + std::to_string(v) + " out of range 1.." + std::to_string(p));
      if (used[static_cast<std::size_t>(v - 1)])
        fail(ErrorKind::Parse, "index " + std::to_string(v) + " repeated in cycle notation");
      used[static_cast<std::size_t>(v - 1)] = 1;
      cyc.push_back(static_cast<int>(v - 1));
      skip_space(text, pos);
      if (pos >= text.size()) fail(ErrorKind::Parse, "unterminated cycle: " + std::string(text));
      if (text[pos] == ',') {
        ++pos;
        continue;
      }
      if (text[pos] == ')') break;
      fail(ErrorKind::Parse, "unexpected character in cycle notation: " + std::string(text));
    }
    ++pos;  // ')'
    for (std::size_t k = 0; k < cyc.size(); ++k)
      im[static_cast<std::size_t>(cyc[k])] = cyc[(k + 1) % cyc.size()];
  }
  return Permutation(std::move(im));
}

std::vector<Permutation> parse_generators(std::string_view text, int p) {
  std::vector<Permutation> gens;
  std::size_t start = 0;
  int depth = 0;
  auto flush = [&](std::size_t end) {
    std::string_view piece = text.substr(start, end - start);
    std::size_t a = 0;
    skip_space(piece, a);
    if (a == piece.size()) return;
    gens.push_back(parse_cycles(piece, p));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) fail(ErrorKind::Parse, "unbalanced parentheses: " + std::string(text));
    if (depth == 0 && (c == ',' || c == ';')) {
      flush(i);
      start = i + 1;
    }
  }
  if (depth != 0) fail(ErrorKind::Parse, "unbalanced parentheses: " + std::string(text));
  flush(text.size());
  return gens;
}

std::uint64_t order(const Permutation& s) {
  std::uint64_t n = 1;
  for (const auto& cyc : s.cycles()) n = lcm_u64(n, cyc.size());
  return n;
}

std::uint64_t euler_totient(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    while (n % q == 0) n /= q;
    result -= result / q;
  }
  if (n > 1) result -= result / n;
  return result;
}

CyclicGroup cyclic_group(const Permutation& s) {
  const auto idx = index_cycles(s);
  const int p = s.size();
  std::uint64_t n = 1;
  for (const auto& cyc : idx.cycles) n = lcm_u64(n, cyc.size());

  // Exponent constraint k ≡ a (mod m); feasible with gcd(k, n) = 1 iff gcd(a, m) = 1.
  std::uint64_t a = 0, m = 1;
  std::vector<int> im(static_cast<std::size_t>(p));
  std::vector<char> resolved(idx.cycles.size(), 0);
  for (int i = 0; i < p; ++i) {
    const int ci = idx.cycle_of[i];
    const auto& cyc = idx.cycles[static_cast<std::size_t>(ci)];
    const std::uint64_t len = cyc.size();
    if (!resolved[static_cast<std::size_t>(ci)]) {
      const std::uint64_t g = std::gcd(m, len);
      const std::uint64_t m2 = lcm_u64(m, len);
      int best_image = p;
      std::uint64_t best_k = 0;
      for (std::uint64_t t = 0; t < len / g; ++t) {
        const std::uint64_t k = a + m * t;
        if (std::gcd(k, m2) != 1) continue;
        const int image = cyc[(static_cast<std::uint64_t>(idx.position[i]) + k) % len];
        if (image < best_image) {
          best_image = image;
          best_k = k;
        }
      }
      a = best_k % m2;
      m = m2;
      resolved[static_cast<std::size_t>(ci)] = 1;
    }
    im[static_cast<std::size_t>(i)] = cyc[(static_cast<std::uint64_t>(idx.position[i]) + a) % len];
  }
  return CyclicGroup(Permutation(std::move(im)), n);
}

Permutation minimal_generator_by_enumeration(const Permutation& s) {
  const std::uint64_t n = order(s);
  Permutation best = s;
  Permutation cur = Permutation::identity(s.size());
  for (std::uint64_t k = 1; k <= n; ++k) {
    cur = compose(s, cur);
    if (std::gcd(k, n) == 1 && cur < best) best = cur;
  }
  return best;
}

std::uint64_t generator_count(const CyclicGroup& c) { return euler_totient(c.order()); }

std::vector<CyclicGroup> enumerate_cyclic_subgroups(int p, int cap) {
  if (p < 1) fail(ErrorKind::InvalidArgument, "enumeration needs p >= 1");
  if (p > cap)
    fail(ErrorKind::CapExceeded,
         "cyclic subgroup enumeration limited to p <= " + std::to_string(cap));
  std::set<CyclicGroup> found;
  std::vector<int> im(static_cast<std::size_t>(p));
  std::iota(im.begin(), im.end(), 0);
  do {
    found.insert(cyclic_group(Permutation(im)));
  } while (std::next_permutation(im.begin(), im.end()));
  return {found.begin(), found.end()};
}

Group Group::from_cyclic(const CyclicGroup& c) {
  Group g{c.p(), {}};
  if (!c.generator().is_identity()) g.generators.push_back(c.generator());
  return g;
}

Group Group::parse(std::string_view text, int p) {
  Group g{p, {}};
  for (auto& s : parse_generators(text, p))
    if (!s.is_identity()) g.generators.push_back(std::move(s));
  return g;
}

std::string Group::to_string() const {
  if (generators.empty()) return "()";
  std::string out;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (i) out += ",";
    out += generators[i].to_string();
  }
  return out;
}

SubgroupElements closure(std::span<const Permutation> generators, int p, std::size_t cap) {
  SubgroupElements out;
  out.p = p;
  out.generators.assign(generators.begin(), generators.end());
  for (const auto& g : generators)
    if (g.size() != p) fail(ErrorKind::InvalidArgument, "closure: generator size mismatch");
  std::unordered_set<Permutation, PermutationHash> seen;
  std::deque<Permutation> queue;
  auto id = Permutation::identity(p);
  seen.insert(id);
  queue.push_back(id);
  while (!queue.empty()) {
    Permutation e = std::move(queue.front());
    queue.pop_front();
    for (const auto& g : generators) {
      Permutation next = compose(e, g);
      if (seen.insert(next).second) {
        if (seen.size() > cap)
          fail(ErrorKind::CapExceeded, "group closure exceeds " + std::to_string(cap) + " elements");
        queue.push_back(std::move(next));
      }
    }
  }
  out.elements.assign(seen.begin(), seen.end());
  std::sort(out.elements.begin(), out.elements.end());
  return out;
}

Orbits orbits(int p, std::span<const Permutation> generators) {
  std::vector<int> parent(static_cast<std::size_t>(p));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& g : generators)
    for (int i = 0; i < p; ++i) {
      int a = find(i), b = find(g(i));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  Orbits o;
  o.class_of.assign(static_cast<std::size_t>(p), -1);
  std::map<int, int> root_to_class;
  for (int i = 0; i < p; ++i) {
    int r = find(i);
    auto [it, inserted] = root_to_class.emplace(r, static_cast<int>(o.classes.size()));
    if (inserted) {
      o.classes.emplace_back();
      o.representatives.push_back(i);
    }
    o.classes[static_cast<std::size_t>(it->second)].push_back(i);
    o.class_of[static_cast<std::size_t>(i)] = it->second;
  }
  for (const auto& c : o.classes) o.sizes.push_back(static_cast<int>(c.size()));
  return o;
}

std::vector<ProposalEntry> proposal_distribution(const CyclicGroup& c) {
  const int p = c.p();
  if (p < 2) fail(ErrorKind::InvalidArgument, "proposal needs p >= 2");
  const double total = p * (p - 1) / 2.0;
  std::map<CyclicGroup, int> counts;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      ++counts[cyclic_group(compose(c.generator(), Permutation::transposition(p, i, j)))];
  std::vector<ProposalEntry> out;
  out.reserve(counts.size());
  for (const auto& [g, n] : counts) out.push_back({g, n / total, n});
  return out;
}

}  // namespace rcop
