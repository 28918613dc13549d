#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcop/conefn.hpp"
#include "rcop/decomp.hpp"
#include "rcop/rng.hpp"
#include "rcop/wishart.hpp"

namespace rcop {

struct CatalogEntry {
  std::string label;
  Group group;
};

struct ModelCatalog {
  std::vector<CatalogEntry> models;
  bool closed = false;  // true when the list exhausts the model space
};

/// The 22 colorings of the complete graph on four vertices, labelled "G1".."G22"
/// and each represented by its largest generating group.
ModelCatalog catalog_p4();

/// Every cyclic subgroup of S_p, labelled by canonical generator.
ModelCatalog catalog_cyclic(int p, int cap = 8);

/// log I(δ + n, D + π_Γ(U)) - log I(δ, D).
double log_post_unnorm(const BlockDecomposition& dec, const DataSet& data, const Hyperparams& h);

// Posterior evaluations memoized per model. Safe to share between chains.
class PosteriorEvaluator {
 public:
  PosteriorEvaluator(DataSet data, Hyperparams h, std::uint64_t decomposition_seed = 0);

  double operator()(const CyclicGroup& c);
  double operator()(const Group& g);

  const DataSet& data() const { return data_; }
  const Hyperparams& hyper() const { return hyper_; }
  DecompositionCache& decompositions() { return decompositions_; }

 private:
  double evaluate_cached(const std::string& key, const Group& g);

  DataSet data_;
  Hyperparams hyper_;
  std::uint64_t seed_;
  DecompositionCache decompositions_;
  std::shared_mutex mutex_;
  std::unordered_map<Permutation, double, PermutationHash> cyclic_values_;
  std::unordered_map<std::string, double> group_values_;
};

struct PosteriorRow {
  std::string label;
  std::string group;
  double log_post = 0.0;
  double probability = 0.0;
};

struct PosteriorTable {
  std::vector<PosteriorRow> rows;  // descending probability, ties in input order
  double delta = 0.0;
  std::string D_spec;
  int n = 0;
  std::uint64_t seed = 0;
  std::optional<double> effective_steps;  // N_T for weighted estimates
  std::optional<double> acceptance_rate;

  const PosteriorRow* find(const std::string& label) const;
};

/// Normalizes log weights with log-sum-exp and sorts.
PosteriorTable make_table(std::vector<PosteriorRow> rows);

PosteriorTable exhaustive_posterior(const ModelCatalog& catalog, PosteriorEvaluator& eval);

enum class Algorithm { Cyclic, Sym };

struct TraceStep {
  std::uint32_t state;  // index into ChainTrace::states
  std::uint32_t perm;   // current permutation σ_t, index into ChainTrace::perms (Sym only)
  bool accepted;
  double log_post;
  double weight;  // 1/Φ for Sym, 1 for Cyclic
};

struct ChainTrace {
  Algorithm algorithm = Algorithm::Cyclic;
  std::vector<CyclicGroup> states;
  std::vector<Permutation> perms;
  std::vector<TraceStep> steps;

  double acceptance_rate() const;
  double effective_steps() const;  // Σ weights

  std::uint32_t intern(const CyclicGroup& c);
  std::uint32_t intern(const Permutation& s);

 private:
  std::unordered_map<Permutation, std::uint32_t, PermutationHash> state_index_;
  std::unordered_map<Permutation, std::uint32_t, PermutationHash> perm_index_;
};

/// Metropolis-Hastings over cyclic subgroups with the transposition
/// proposal c' = <ν(C) ∘ x> and the Hastings correction.
ChainTrace mh_cyclic(PosteriorEvaluator& eval, long T, const CyclicGroup& start, Rng& rng);

/// Random walk on S_p by right multiplication with a transposition; the
/// acceptance uses the posterior ratio of the generated subgroups only.
ChainTrace mh_sym(PosteriorEvaluator& eval, long T, const Permutation& start, Rng& rng);

/// Visit frequencies (Cyclic) or the totient-weighted estimator (Sym).
PosteriorTable estimate_posterior(const ChainTrace& trace, std::size_t burn_in = 0);

/// Adjusted Rand index of two colorings as partitions of vertices and pairs.
double ari(const Coloring& a, const Coloring& b);

/// Total variation distance between two tables, matched by group string.
double total_variation(const PosteriorTable& a, const PosteriorTable& b);

}  // namespace rcop
