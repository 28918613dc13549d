#include "rcop/select.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "rcop/error.hpp"

namespace rcop {

ModelCatalog catalog_p4() {
  static const char* const kGenerators[22] = {
      "()",
      "(1,2)", "(1,3)", "(1,4)", "(2,3)", "(2,4)", "(3,4)",
      "(1,2,3),(1,2)", "(1,2,4),(1,2)", "(1,3,4),(1,3)", "(2,3,4),(2,3)",
      "(1,2)(3,4)", "(1,3)(2,4)", "(1,4)(2,3)",
      "(1,2,3,4),(1,3)", "(1,2,4,3),(1,4)", "(1,3,2,4),(1,2)",
      "(1,2),(3,4)", "(1,3),(2,4)", "(1,4),(2,3)",
      "(1,2)(3,4),(1,4)(2,3)",
      "(1,2,3,4),(1,2)",
  };
  ModelCatalog cat;
  cat.closed = true;
  for (int i = 0; i < 22; ++i) cat.models.push_back({"G" + std::to_string(i + 1), Group::parse(kGenerators[i], 4)});
  return cat;
}

ModelCatalog catalog_cyclic(int p, int cap) {
  ModelCatalog cat;
  cat.closed = true;
  for (const auto& c : enumerate_cyclic_subgroups(p, cap))
    cat.models.push_back({c.generator().to_string(), Group::from_cyclic(c)});
  return cat;
}

double log_post_unnorm(const BlockDecomposition& dec, const DataSet& data, const Hyperparams& h) {
  if (data.p() != dec.p() || h.D.rows() != dec.p())
    fail(ErrorKind::InvalidArgument, "data, D and group disagree on p");
  const BlockValues prior = block_values(dec, h.D);
  if (data.n == 0) return 0.0;
  const Matrix posterior_D = h.D + project(dec.group, data.scatter);
  return log_I(dec, h.delta + data.n, block_values(dec, posterior_D)) - log_I(dec, h.delta, prior);
}

PosteriorEvaluator::PosteriorEvaluator(DataSet data, Hyperparams h, std::uint64_t decomposition_seed)
    : data_(std::move(data)), hyper_(std::move(h)), seed_(decomposition_seed) {
  if (hyper_.D.rows() != data_.p() || hyper_.D.cols() != data_.p())
    fail(ErrorKind::InvalidArgument, "D must be p x p");
}

double PosteriorEvaluator::operator()(const CyclicGroup& c) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = cyclic_values_.find(c.generator()); it != cyclic_values_.end()) return it->second;
  }
  const BlockDecomposition dec = cyclic_basis(c);
  const double v = log_post_unnorm(dec, data_, hyper_);
  std::unique_lock lock(mutex_);
  cyclic_values_.emplace(c.generator(), v);
  return v;
}

double PosteriorEvaluator::operator()(const Group& g) {
  if (g.generators.size() <= 1) {
    const Permutation s = g.generators.empty() ? Permutation::identity(g.p) : g.generators.front();
    return (*this)(cyclic_group(s));
  }
  return evaluate_cached(g.to_string(), g);
}

double PosteriorEvaluator::evaluate_cached(const std::string& key, const Group& g) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = group_values_.find(key); it != group_values_.end()) return it->second;
  }
  const auto dec = decompositions_.get_or_build(key, [&] { return decompose(g, seed_); });
  const double v = log_post_unnorm(*dec, data_, hyper_);
  std::unique_lock lock(mutex_);
  group_values_.emplace(key, v);
  return v;
}

const PosteriorRow* PosteriorTable::find(const std::string& label) const {
  for (const auto& r : rows)
    if (r.label == label) return &r;
  return nullptr;
}

PosteriorTable make_table(std::vector<PosteriorRow> rows) {
  PosteriorTable t;
  if (rows.empty()) return t;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) top = std::max(top, r.log_post);
  double sum = 0.0;
  for (const auto& r : rows) sum += std::exp(r.log_post - top);
  const double log_norm = top + std::log(sum);
  for (auto& r : rows) r.probability = std::exp(r.log_post - log_norm);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const PosteriorRow& a, const PosteriorRow& b) { return a.probability > b.probability; });
  t.rows = std::move(rows);
  return t;
}

PosteriorTable exhaustive_posterior(const ModelCatalog& catalog, PosteriorEvaluator& eval) {
  std::vector<PosteriorRow> rows;
  rows.reserve(catalog.models.size());
  for (const auto& m : catalog.models) rows.push_back({m.label, m.group.to_string(), eval(m.group), 0.0});
  PosteriorTable t = make_table(std::move(rows));
  t.delta = eval.hyper().delta;
  t.n = eval.data().n;
  return t;
}

std::uint32_t ChainTrace::intern(const CyclicGroup& c) {
  auto [it, inserted] = state_index_.emplace(c.generator(), static_cast<std::uint32_t>(states.size()));
  if (inserted) states.push_back(c);
  return it->second;
}

std::uint32_t ChainTrace::intern(const Permutation& s) {
  auto [it, inserted] = perm_index_.emplace(s, static_cast<std::uint32_t>(perms.size()));
  if (inserted) perms.push_back(s);
  return it->second;
}

double ChainTrace::acceptance_rate() const {
  if (steps.empty()) return 0.0;
  const auto accepted = std::count_if(steps.begin(), steps.end(), [](const TraceStep& s) { return s.accepted; });
  return static_cast<double>(accepted) / static_cast<double>(steps.size());
}

double ChainTrace::effective_steps() const {
  double total = 0.0;
  for (const auto& s : steps) total += s.weight;
  return total;
}

namespace {

void check_run(int p, long T) {
  if (p < 2) fail(ErrorKind::InvalidArgument, "chains need p >= 2");
  if (T < 1) fail(ErrorKind::InvalidArgument, "empty run: T must be at least 1");
}

Permutation random_transposition(int p, Rng& rng) {
  const auto pairs = static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(p - 1) / 2;
  auto idx = static_cast<long>(rng.below(pairs));
  int i = 0;
  while (idx >= p - 1 - i) {
    idx -= p - 1 - i;
    ++i;
  }
  return Permutation::transposition(p, i, i + 1 + static_cast<int>(idx));
}

// g(to | from) from a memoized neighbourhood table.
class ProposalCache {
 public:
  double probability(const CyclicGroup& from, const CyclicGroup& to) {
    auto it = tables_.find(from.generator());
    if (it == tables_.end()) it = tables_.emplace(from.generator(), proposal_distribution(from)).first;
    const auto& entries = it->second;
    auto pos = std::lower_bound(entries.begin(), entries.end(), to,
                                [](const ProposalEntry& e, const CyclicGroup& c) { return e.group < c; });
    return (pos != entries.end() && pos->group == to) ? pos->probability : 0.0;
  }

 private:
  std::unordered_map<Permutation, std::vector<ProposalEntry>, PermutationHash> tables_;
};

}  // namespace

ChainTrace mh_cyclic(PosteriorEvaluator& eval, long T, const CyclicGroup& start, Rng& rng) {
  const int p = start.p();
  check_run(p, T);
  ChainTrace trace;
  trace.algorithm = Algorithm::Cyclic;
  trace.steps.reserve(static_cast<std::size_t>(T));
  ProposalCache proposals;
  CyclicGroup state = start;
  double lp = eval(state);
  std::uint32_t id = trace.intern(state);
  for (long t = 0; t < T; ++t) {
    const CyclicGroup next = cyclic_group(compose(state.generator(), random_transposition(p, rng)));
    bool accepted = true;
    if (!(next == state)) {
      const double lp_next = eval(next);
      const double log_ratio = lp_next - lp + std::log(proposals.probability(next, state)) -
                               std::log(proposals.probability(state, next));
      accepted = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
      if (accepted) {
        state = next;
        lp = lp_next;
        id = trace.intern(state);
      }
    }
    trace.steps.push_back({id, 0, accepted, lp, 1.0});
  }
  return trace;
}

ChainTrace mh_sym(PosteriorEvaluator& eval, long T, const Permutation& start, Rng& rng) {
  const int p = start.size();
  check_run(p, T);
  ChainTrace trace;
  trace.algorithm = Algorithm::Sym;
  trace.steps.reserve(static_cast<std::size_t>(T));
  Permutation sigma = start;
  CyclicGroup group = cyclic_group(sigma);
  double lp = eval(group);
  std::uint32_t gid = trace.intern(group);
  std::uint32_t sid = trace.intern(sigma);
  double weight = 1.0 / static_cast<double>(generator_count(group));
  for (long t = 0; t < T; ++t) {
    Permutation proposal = compose(sigma, random_transposition(p, rng));
    CyclicGroup next = cyclic_group(proposal);
    bool accepted = true;
    if (!(next == group)) {
      const double lp_next = eval(next);
      const double log_ratio = lp_next - lp;
      accepted = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
      if (accepted) {
        group = std::move(next);
        lp = lp_next;
        gid = trace.intern(group);
        weight = 1.0 / static_cast<double>(generator_count(group));
      }
    }
    if (accepted) {
      sigma = std::move(proposal);
      sid = trace.intern(sigma);
    }
    trace.steps.push_back({gid, sid, accepted, lp, weight});
  }
  return trace;
}

PosteriorTable estimate_posterior(const ChainTrace& trace, std::size_t burn_in) {
  if (trace.steps.size() <= burn_in) fail(ErrorKind::InvalidArgument, "trace has no steps after burn-in");
  std::vector<double> mass(trace.states.size(), 0.0);
  std::vector<double> last_lp(trace.states.size(), 0.0);
  double total = 0.0;
  for (std::size_t t = burn_in; t < trace.steps.size(); ++t) {
    const auto& s = trace.steps[t];
    mass[s.state] += s.weight;
    last_lp[s.state] = s.log_post;
    total += s.weight;
  }
  PosteriorTable table;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] == 0.0) continue;
    const std::string g = trace.states[i].generator().to_string();
    table.rows.push_back({g, g, last_lp[i], mass[i] / total});
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const PosteriorRow& a, const PosteriorRow& b) { return a.probability > b.probability; });
  if (trace.algorithm == Algorithm::Sym) table.effective_steps = total;
  table.acceptance_rate = trace.acceptance_rate();
  return table;
}

double ari(const Coloring& a, const Coloring& b) {
  if (a.p != b.p) fail(ErrorKind::InvalidArgument, "ari: colorings have different p");
  auto labels = [](const Coloring& c) {
    std::vector<int> out(c.vertex_class);
    for (int e : c.edge_class) out.push_back(c.vertex_class_count + e);
    return out;
  };
  const auto la = labels(a), lb = labels(b);
  const double n = static_cast<double>(la.size());
  if (la.size() < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < la.size(); ++i) {
    joint[{la[i], lb[i]}] += 1.0;
    rows[la[i]] += 1.0;
    cols[lb[i]] += 1.0;
  }
  auto pairs = [](double x) { return 0.5 * x * (x - 1.0); };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [k, v] : joint) index += pairs(v);
  for (const auto& [k, v] : rows) sa += pairs(v);
  for (const auto& [k, v] : cols) sb += pairs(v);
  const double expected = sa * sb / pairs(n);
  const double maximum = 0.5 * (sa + sb);
  if (maximum == expected) return la == lb || (rows.size() == joint.size() && cols.size() == joint.size()) ? 1.0 : 0.0;
  return (index - expected) / (maximum - expected);
}

double total_variation(const PosteriorTable& a, const PosteriorTable& b) {
  std::map<std::string, std::pair<double, double>> merged;
  for (const auto& r : a.rows) merged[r.label].first += r.probability;
  for (const auto& r : b.rows) merged[r.label].second += r.probability;
  double tv = 0.0;
  for (const auto& [k, v] : merged) tv += std::abs(v.first - v.second);
  return 0.5 * tv;
}

}  // namespace rcop
