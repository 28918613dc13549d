// Command-line front end. Talks to the library exclusively through rcop.h.
#include <CLI11.hpp>
#include <rcop.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kCap = 4 };

struct Failure : std::runtime_error {
  Failure(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  int code;
};

int exit_code(rcop_status s) {
  switch (s) {
    case RCOP_OK: return kOk;
    case RCOP_E_DOMAIN:
    case RCOP_E_NUMERIC:
    case RCOP_E_DECOMPOSITION:
    case RCOP_E_INTERNAL: return kNumeric;
    case RCOP_E_CAP_EXCEEDED: return kCap;
    default: return kConfig;
  }
}

void check(rcop_status s) {
  if (s != RCOP_OK) throw Failure(exit_code(s), std::string(rcop_status_name(s)) + ": " + rcop_last_error());
}

[[noreturn]] void config_error(const std::string& msg) { throw Failure(kConfig, msg); }

// Unique-ownership wrappers for the opaque handles.
template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using GroupPtr = std::unique_ptr<rcop_group, Deleter<rcop_group, rcop_group_free>>;
using DecompPtr = std::unique_ptr<rcop_decomposition, Deleter<rcop_decomposition, rcop_decomposition_free>>;
using DataPtr = std::unique_ptr<rcop_dataset, Deleter<rcop_dataset, rcop_dataset_free>>;
using EvalPtr = std::unique_ptr<rcop_evaluator, Deleter<rcop_evaluator, rcop_evaluator_free>>;
using TablePtr = std::unique_ptr<rcop_table, Deleter<rcop_table, rcop_table_free>>;
using ChainPtr = std::unique_ptr<rcop_chain, Deleter<rcop_chain, rcop_chain_free>>;

template <class Fn>
std::string fetch_string(Fn&& fn) {
  std::size_t needed = 0;
  check(fn(nullptr, 0, &needed));
  std::string s(needed, '\0');
  check(fn(s.data(), s.size(), &needed));
  s.resize(needed ? needed - 1 : 0);
  return s;
}

GroupPtr parse_group(const std::string& text, int p) {
  rcop_group* g = nullptr;
  check(rcop_group_parse(text.c_str(), p, &g));
  return GroupPtr(g);
}

std::vector<double> read_grid(const std::string& path, int& rows, int& cols) {
  check(rcop_matrix_read(path.c_str(), nullptr, 0, &rows, &cols));
  std::vector<double> m(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  check(rcop_matrix_read(path.c_str(), m.data(), m.size(), &rows, &cols));
  return m;
}

std::vector<double> identity(int p, double scale) {
  std::vector<double> m(static_cast<std::size_t>(p * p), 0.0);
  for (int i = 0; i < p; ++i) m[static_cast<std::size_t>(i * p + i)] = scale;
  return m;
}

// "identity:<s>" or "file:<path>"
std::vector<double> matrix_spec(const std::string& spec, int p, const char* what) {
  if (spec.rfind("identity:", 0) == 0 || spec == "identity") {
    const std::string v = spec == "identity" ? "1" : spec.substr(9);
    double s = 0.0;
    try {
      std::size_t used = 0;
      s = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      config_error(std::string(what) + ": bad scale '" + v + "'");
    }
    if (!(s > 0.0)) config_error(std::string(what) + ": scale must be positive");
    return identity(p, s);
  }
  if (spec.rfind("file:", 0) == 0) {
    int rows = 0, cols = 0;
    auto m = read_grid(spec.substr(5), rows, cols);
    if (rows != p || cols != p) config_error(std::string(what) + " must be " + std::to_string(p) + "x" + std::to_string(p));
    return m;
  }
  if (spec == "circulant") {
    std::vector<double> m(static_cast<std::size_t>(p * p));
    check(rcop_circulant_sigma(p, m.data()));
    return m;
  }
  config_error(std::string(what) + ": expected identity:<scale>, file:<path> or circulant, got '" + spec + "'");
}

void write_file(const fs::path& path, const std::string& text) { check(rcop_write_text(path.string().c_str(), text.c_str())); }

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) config_error("cannot create output directory " + dir + ": " + ec.message());
}

// Data options shared by select-exact and mh.
struct DataOptions {
  std::string samples, scatter, fixture, generate;
  int n = -1;
  int p = 0;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--data", samples, "observations, one row per sample");
    app->add_option("--scatter", scatter, "scatter matrix (sum of outer products); needs --n");
    app->add_option("--fixture", fixture, "built-in data set")->check(CLI::IsMember({"frets"}));
    app->add_option("--generate", generate, "simulate N(0, Sigma): circulant or file:<path>; needs --p and --n");
    app->add_option("--n", n, "sample count");
  }

  DataPtr load() const {
    const int sources = !samples.empty() + !scatter.empty() + !fixture.empty() + !generate.empty();
    if (sources != 1) config_error("exactly one of --data, --scatter, --fixture, --generate is required");
    rcop_dataset* ds = nullptr;
    if (!samples.empty()) {
      check(rcop_dataset_read_samples(samples.c_str(), &ds));
    } else if (!scatter.empty()) {
      if (n < 0) config_error("--scatter needs --n");
      check(rcop_dataset_read_scatter(scatter.c_str(), n, &ds));
    } else if (!fixture.empty()) {
      check(rcop_dataset_frets(&ds));
    } else {
      if (p < 1 || n < 0) config_error("--generate needs --p and --n");
      const auto sigma = matrix_spec(generate, p, "--generate");
      check(rcop_dataset_gaussian(sigma.data(), p, n, seed, &ds));
    }
    DataPtr out(ds);
    if (p > 0 && rcop_dataset_p(ds) != p)
      config_error("--p " + std::to_string(p) + " disagrees with data dimension " + std::to_string(rcop_dataset_p(ds)));
    return out;
  }
};

void print_table(const rcop_table* t, int limit) {
  const int rows = std::min(rcop_table_size(t), limit);
  std::printf("%-6s %-28s %-28s %14s %10s\n", "rank", "label", "group", "log_post", "prob");
  for (int i = 0; i < rows; ++i) {
    double lp = 0.0, pr = 0.0;
    const std::string label = fetch_string([&](char* b, std::size_t c, std::size_t* n) {
      return rcop_table_row(t, i, b, c, n, &lp, &pr);
    });
    const std::string group = fetch_string([&](char* b, std::size_t c, std::size_t* n) {
      return rcop_table_row_group(t, i, b, c, n);
    });
    std::printf("%-6d %-28s %-28s %14.6f %10.6f\n", i + 1, label.c_str(), group.c_str(), lp, pr);
  }
}

int cmd_decompose(int p, const std::string& group, std::uint64_t seed, const std::string& out) {
  auto g = parse_group(group, p);
  rcop_decomposition* raw = nullptr;
  check(rcop_decompose(g.get(), seed, &raw));
  DecompPtr d(raw);
  int dim = 0, n0 = 0;
  double A = 0, B = 0;
  check(rcop_colored_dimension(g.get(), &dim));
  check(rcop_cone_constants(d.get(), &A, &B, &n0));
  std::cout << "group      " << fetch_string([&](char* b, std::size_t c, std::size_t* n) {
    return rcop_group_to_string(g.get(), b, c, n);
  }) << "\nstructure  " << fetch_string([&](char* b, std::size_t c, std::size_t* n) {
    return rcop_decomposition_structure(d.get(), b, c, n);
  }) << "\ndim Z      " << dim << "\nn0         " << n0 << "\nblocks     r d k columns\n";
  for (int i = 0; i < rcop_decomposition_block_count(d.get()); ++i) {
    int r = 0, f = 0, k = 0, c0 = 0;
    check(rcop_decomposition_block(d.get(), i, &r, &f, &k, &c0));
    std::printf("           %d %d %d [%d,%d)\n", r, f, k, c0, c0 + r * k);
  }
  if (!out.empty()) {
    ensure_dir(out);
    std::vector<double> U(static_cast<std::size_t>(p * p));
    check(rcop_decomposition_basis(d.get(), U.data()));
    check(rcop_matrix_write((fs::path(out) / "basis.csv").string().c_str(), U.data(), p, p));
    write_file(fs::path(out) / "decomposition.json", fetch_string([&](char* b, std::size_t c, std::size_t* n) {
      return rcop_decomposition_json(d.get(), b, c, n);
    }) + "\n");
  }
  return kOk;
}

EvalPtr make_evaluator(const rcop_dataset* ds, double delta, const std::string& D_spec) {
  const int p = rcop_dataset_p(ds);
  if (!(delta > 0.0)) config_error("--delta must be positive");
  const auto D = matrix_spec(D_spec, p, "--D");
  // D must be a positive definite symmetric matrix before any model is touched.
  auto trivial = parse_group("", p);
  rcop_decomposition* dec = nullptr;
  check(rcop_decompose(trivial.get(), 0, &dec));
  DecompPtr holder(dec);
  double logdet = 0.0;
  if (rcop_log_det(dec, D.data(), &logdet) != RCOP_OK) config_error("--D is not symmetric positive definite");
  rcop_evaluator* ev = nullptr;
  check(rcop_evaluator_new(ds, delta, D.data(), &ev));
  return EvalPtr(ev);
}

int cmd_select_exact(const DataOptions& data, double delta, const std::string& D_spec, const std::string& catalog,
                     const std::string& out) {
  auto ds = data.load();
  auto ev = make_evaluator(ds.get(), delta, D_spec);
  rcop_table* raw = nullptr;
  check(rcop_select_exact(ev.get(), catalog == "p4-all22" ? RCOP_CATALOG_P4_ALL22 : RCOP_CATALOG_CYCLIC, &raw));
  TablePtr t(raw);
  check(rcop_table_set_metadata(t.get(), D_spec.c_str(), data.seed));
  print_table(t.get(), 10);
  if (!out.empty()) {
    ensure_dir(out);
    write_file(fs::path(out) / "posterior.json",
               fetch_string([&](char* b, std::size_t c, std::size_t* n) { return rcop_table_json(t.get(), b, c, n); }) +
                   "\n");
  }
  return kOk;
}

int cmd_mh(const DataOptions& data, double delta, const std::string& D_spec, const std::string& algorithm, long T,
           int chains, long burn_in, const std::string& start, std::uint64_t seed, const std::string& out) {
  if (T <= 0) config_error("empty run: --T must be at least 1");
  if (chains < 1) config_error("--chains must be at least 1");
  auto ds = data.load();
  auto ev = make_evaluator(ds.get(), delta, D_spec);
  const rcop_algorithm alg = algorithm == "sym" ? RCOP_ALGORITHM_SYM : RCOP_ALGORITHM_CYCLIC;

  std::vector<ChainPtr> results(static_cast<std::size_t>(chains));
  std::vector<rcop_status> status(static_cast<std::size_t>(chains), RCOP_OK);
  std::vector<std::string> messages(static_cast<std::size_t>(chains));
  auto run = [&](int i) {
    rcop_chain* c = nullptr;
    status[static_cast<std::size_t>(i)] =
        rcop_mh_run(ev.get(), alg, T, start.c_str(), seed, static_cast<std::uint64_t>(i), &c);
    if (status[static_cast<std::size_t>(i)] != RCOP_OK) messages[static_cast<std::size_t>(i)] = rcop_last_error();
    results[static_cast<std::size_t>(i)].reset(c);
  };
  if (chains == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < chains; ++i) pool.emplace_back(run, i);
    for (auto& th : pool) th.join();
  }
  if (!out.empty()) ensure_dir(out);
  for (int i = 0; i < chains; ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (status[si] != RCOP_OK)
      throw Failure(exit_code(status[si]), std::string(rcop_status_name(status[si])) + ": " + messages[si]);
    rcop_table* raw = nullptr;
    check(rcop_chain_estimate(results[si].get(), burn_in, &raw));
    TablePtr t(raw);
    check(rcop_table_set_metadata(t.get(), D_spec.c_str(), seed));
    std::printf("chain %d: steps %ld, acceptance %.4f", i, rcop_chain_length(results[si].get()),
                rcop_chain_acceptance_rate(results[si].get()));
    if (alg == RCOP_ALGORITHM_SYM) std::printf(", effective steps %.1f", rcop_chain_effective_steps(results[si].get()));
    std::printf("\n");
    print_table(t.get(), 5);
    if (!out.empty()) {
      const std::string suffix = chains > 1 ? "_" + std::to_string(i) : "";
      check(rcop_chain_write_trace(results[si].get(), (fs::path(out) / ("trace" + suffix + ".csv")).string().c_str()));
      write_file(fs::path(out) / ("estimate" + suffix + ".json"),
                 fetch_string([&](char* b, std::size_t c, std::size_t* n) { return rcop_table_json(t.get(), b, c, n); }) +
                     "\n");
    }
  }
  return kOk;
}

int cmd_gen_data(int p, const std::string& sigma_spec, const std::string& fixture, int n, std::uint64_t seed,
                 const std::string& out, bool pgm) {
  if (out.empty()) config_error("gen-data needs --out");
  ensure_dir(out);
  DataPtr ds;
  std::vector<double> sigma;
  if (!fixture.empty()) {
    rcop_dataset* raw = nullptr;
    check(rcop_dataset_frets(&raw));
    ds.reset(raw);
    p = rcop_dataset_p(raw);
  } else {
    if (p < 1) config_error("--p must be positive");
    if (n < 0) config_error("--n is required");
    sigma = matrix_spec(sigma_spec, p, "--sigma");
    rcop_dataset* raw = nullptr;
    check(rcop_dataset_gaussian(sigma.data(), p, n, seed, &raw));
    ds.reset(raw);
  }
  n = rcop_dataset_n(ds.get());
  std::vector<double> scatter(static_cast<std::size_t>(p * p));
  check(rcop_dataset_scatter(ds.get(), scatter.data()));
  auto path = [&](const char* name) { return (fs::path(out) / name).string(); };
  check(rcop_matrix_write(path("scatter.csv").c_str(), scatter.data(), p, p));
  write_file(path("n.txt"), std::to_string(n) + "\n");
  if (rcop_dataset_has_samples(ds.get())) {
    std::vector<double> rows(static_cast<std::size_t>(n * p));
    check(rcop_dataset_samples(ds.get(), rows.data()));
    check(rcop_matrix_write(path("samples.csv").c_str(), rows.data(), n, p));
  }
  std::vector<double> cov(scatter);
  if (n > 0)
    for (auto& v : cov) v /= n;
  check(rcop_matrix_write(path("heatmap_covariance.csv").c_str(), cov.data(), p, p));
  if (pgm) check(rcop_matrix_write_pgm(path("heatmap_covariance.pgm").c_str(), cov.data(), p, p));
  if (!sigma.empty()) {
    check(rcop_matrix_write(path("sigma.csv").c_str(), sigma.data(), p, p));
    if (pgm) check(rcop_matrix_write_pgm(path("heatmap_sigma.pgm").c_str(), sigma.data(), p, p));
  }
  std::printf("wrote p=%d n=%d data to %s\n", p, n, out.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian model selection for permutation-symmetric Gaussian models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rcop_version());

  int p = 0;
  std::string group, out, D_spec = "identity:1", catalog = "p4-all22", algorithm = "cyclic", start, sigma_spec = "circulant",
                      fixture;
  double delta = 3.0;
  long T = 0, burn_in = 0;
  int chains = 1, n = -1;
  std::uint64_t seed = 1;
  bool pgm = false;
  DataOptions data;

  auto* dec = app.add_subcommand("decompose", "block structure of the colored space of a group");
  dec->add_option("--p", p, "number of variables")->required();
  dec->add_option("--group", group, "generators, e.g. \"(1,2,3,4),(1,3)\"; empty for the trivial group");
  dec->add_option("--seed", seed, "seed for the numeric splitter");
  dec->add_option("--out", out, "directory for basis.csv and decomposition.json");

  auto* sel = app.add_subcommand("select-exact", "exact posterior over a finite model catalog");
  data.add(sel);
  sel->add_option("--p", data.p, "number of variables (checked against the data)");
  sel->add_option("--delta", delta, "prior shape");
  sel->add_option("--D", D_spec, "prior matrix: identity:<scale> or file:<path>");
  sel->add_option("--catalog", catalog)->check(CLI::IsMember({"p4-all22", "cyclic"}));
  sel->add_option("--seed", data.seed, "seed for --generate");
  sel->add_option("--out", out, "directory for posterior.json");

  auto* mh = app.add_subcommand("mh", "Metropolis-Hastings over cyclic subgroups");
  data.add(mh);
  mh->add_option("--p", data.p, "number of variables (checked against the data)");
  mh->add_option("--delta", delta, "prior shape");
  mh->add_option("--D", D_spec, "prior matrix: identity:<scale> or file:<path>");
  mh->add_option("--algorithm", algorithm)->check(CLI::IsMember({"cyclic", "sym"}));
  mh->add_option("--T", T, "steps per chain")->required();
  mh->add_option("--chains", chains, "independent chains run concurrently");
  mh->add_option("--burn-in", burn_in, "initial steps excluded from the estimate");
  mh->add_option("--start", start, "initial permutation in cycle notation (default identity)");
  mh->add_option("--seed", seed, "chain seed (also used by --generate)");
  mh->add_option("--out", out, "directory for traces and estimates");

  auto* gen = app.add_subcommand("gen-data", "simulate Gaussian data or emit a fixture");
  gen->add_option("--p", p, "number of variables");
  gen->add_option("--sigma", sigma_spec, "covariance: circulant, identity:<scale> or file:<path>");
  gen->add_option("--fixture", fixture, "emit a built-in data set instead")->check(CLI::IsMember({"frets"}));
  gen->add_option("--n", n, "sample count");
  gen->add_option("--seed", seed, "seed");
  gen->add_option("--out", out, "output directory");
  gen->add_flag("--pgm", pgm, "also write grayscale PGM heat maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }

  try {
    if (*dec) return cmd_decompose(p, group, seed, out);
    if (*sel) return cmd_select_exact(data, delta, D_spec, catalog, out);
    if (*mh) {
      data.seed = seed;
      return cmd_mh(data, delta, D_spec, algorithm, T, chains, burn_in, start, seed, out);
    }
    if (*gen) return cmd_gen_data(p, sigma_spec, fixture, n, seed, out, pgm);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.what() << '\n';
    return f.code;
  }
  return kOk;
}
