#include "rcop.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>

#include "rcop/conefn.hpp"
#include "rcop/error.hpp"
#include "rcop/io.hpp"
#include "rcop/select.hpp"
#include "rcop/wishart.hpp"

struct rcop_group {
  rcop::Group g;
};
struct rcop_decomposition {
  rcop::BlockDecomposition d;
};
struct rcop_dataset {
  rcop::DataSet ds;
};
struct rcop_evaluator {
  rcop_evaluator(rcop::DataSet ds, rcop::Hyperparams h) : ev(std::move(ds), std::move(h)) {}
  rcop::PosteriorEvaluator ev;
};
struct rcop_table {
  rcop::PosteriorTable t;
};
struct rcop_chain {
  rcop::ChainTrace trace;
};

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

thread_local std::string last_error;

rcop_status status_of(rcop::ErrorKind k) {
  switch (k) {
    case rcop::ErrorKind::Parse: return RCOP_E_PARSE;
    case rcop::ErrorKind::InvalidArgument: return RCOP_E_INVALID_ARGUMENT;
    case rcop::ErrorKind::Domain: return RCOP_E_DOMAIN;
    case rcop::ErrorKind::Numeric: return RCOP_E_NUMERIC;
    case rcop::ErrorKind::Decomposition: return RCOP_E_DECOMPOSITION;
    case rcop::ErrorKind::CapExceeded: return RCOP_E_CAP_EXCEEDED;
    case rcop::ErrorKind::Io: return RCOP_E_IO;
  }
  return RCOP_E_INTERNAL;
}

template <class F>
rcop_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return RCOP_OK;
  } catch (const rcop::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RCOP_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RCOP_E_INTERNAL;
  }
}

void require(const void* ptr, const char* name) {
  if (!ptr) rcop::fail(rcop::ErrorKind::InvalidArgument, std::string(name) + " must not be NULL");
}

rcop::Matrix load(const double* data, int rows, int cols) {
  require(data, "matrix");
  return Eigen::Map<const RowMajor>(data, rows, cols);
}

void store(const rcop::Matrix& m, double* out) {
  require(out, "output");
  Eigen::Map<RowMajor>(out, m.rows(), m.cols()) = m;
}

void copy_string(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && cap >= s.size() + 1) std::memcpy(buf, s.c_str(), s.size() + 1);
}

const rcop::PosteriorRow& row_at(const rcop_table* t, int index) {
  require(t, "table");
  if (index < 0 || index >= static_cast<int>(t->t.rows.size()))
    rcop::fail(rcop::ErrorKind::InvalidArgument, "table row index out of range");
  return t->t.rows[static_cast<std::size_t>(index)];
}

}  // namespace

extern "C" {

const char* rcop_version(void) { return "0.1.0"; }
const char* rcop_last_error(void) { return last_error.c_str(); }

const char* rcop_status_name(rcop_status status) {
  switch (status) {
    case RCOP_OK: return "ok";
    case RCOP_E_PARSE: return "parse error";
    case RCOP_E_INVALID_ARGUMENT: return "invalid argument";
    case RCOP_E_DOMAIN: return "domain error";
    case RCOP_E_NUMERIC: return "numeric error";
    case RCOP_E_DECOMPOSITION: return "decomposition error";
    case RCOP_E_CAP_EXCEEDED: return "cap exceeded";
    case RCOP_E_IO: return "i/o error";
    case RCOP_E_INTERNAL: return "internal error";
  }
  return "unknown";
}

rcop_status rcop_group_parse(const char* text, int p, rcop_group** out) {
  return guard([&] {
    require(out, "out");
    if (p < 1) rcop::fail(rcop::ErrorKind::InvalidArgument, "p must be positive");
    *out = new rcop_group{rcop::Group::parse(text ? text : "", p)};
  });
}
void rcop_group_free(rcop_group* g) { delete g; }
int rcop_group_p(const rcop_group* g) { return g ? g->g.p : 0; }
int rcop_group_generator_count(const rcop_group* g) { return g ? static_cast<int>(g->g.generators.size()) : 0; }

rcop_status rcop_group_to_string(const rcop_group* g, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require(g, "group");
    copy_string(g->g.to_string(), buf, cap, needed);
  });
}

rcop_status rcop_cyclic_canonical(const char* cycle_text, int p, char* buf, size_t cap, size_t* needed,
                                  uint64_t* generator_count) {
  return guard([&] {
    const auto c = rcop::cyclic_group(rcop::parse_cycles(cycle_text ? cycle_text : "", p));
    copy_string(c.generator().to_string(), buf, cap, needed);
    if (generator_count) *generator_count = rcop::generator_count(c);
  });
}

rcop_status rcop_count_cyclic_subgroups(int p, uint64_t* out) {
  return guard([&] {
    require(out, "out");
    *out = rcop::enumerate_cyclic_subgroups(p).size();
  });
}

rcop_status rcop_coloring_grid(const rcop_group* g, int* out) {
  return guard([&] {
    require(g, "group");
    require(out, "out");
    const Eigen::MatrixXi grid = rcop::coloring(g->g).class_grid();
    Eigen::Map<Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, grid.rows(), grid.cols()) = grid;
  });
}

rcop_status rcop_colored_dimension(const rcop_group* g, int* out) {
  return guard([&] {
    require(g, "group");
    require(out, "out");
    *out = rcop::coloring(g->g).dimension();
  });
}

rcop_status rcop_project(const rcop_group* g, const double* x, double* out) {
  return guard([&] {
    require(g, "group");
    store(rcop::project(g->g, load(x, g->g.p, g->g.p)), out);
  });
}

rcop_status rcop_is_member(const rcop_group* g, const double* x, double tol, int* out) {
  return guard([&] {
    require(g, "group");
    require(out, "out");
    *out = rcop::is_member(g->g, load(x, g->g.p, g->g.p), tol) ? 1 : 0;
  });
}

rcop_status rcop_ari(const rcop_group* a, const rcop_group* b, double* out) {
  return guard([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = rcop::ari(rcop::coloring(a->g), rcop::coloring(b->g));
  });
}

rcop_status rcop_decompose(const rcop_group* g, uint64_t seed, rcop_decomposition** out) {
  return guard([&] {
    require(g, "group");
    require(out, "out");
    *out = new rcop_decomposition{rcop::decompose(g->g, seed)};
  });
}
void rcop_decomposition_free(rcop_decomposition* d) { delete d; }
int rcop_decomposition_p(const rcop_decomposition* d) { return d ? d->d.p() : 0; }
int rcop_decomposition_block_count(const rcop_decomposition* d) {
  return d ? static_cast<int>(d->d.blocks.size()) : 0;
}

rcop_status rcop_decomposition_block(const rcop_decomposition* d, int index, int* r, int* dim_field, int* k,
                                     int* col_begin) {
  return guard([&] {
    require(d, "decomposition");
    if (index < 0 || index >= static_cast<int>(d->d.blocks.size()))
      rcop::fail(rcop::ErrorKind::InvalidArgument, "block index out of range");
    const auto& b = d->d.blocks[static_cast<std::size_t>(index)];
    if (r) *r = b.r;
    if (dim_field) *dim_field = b.d;
    if (k) *k = b.k;
    if (col_begin) *col_begin = b.col_begin;
  });
}

rcop_status rcop_decomposition_basis(const rcop_decomposition* d, double* out) {
  return guard([&] {
    require(d, "decomposition");
    store(d->d.U, out);
  });
}

rcop_status rcop_decomposition_structure(const rcop_decomposition* d, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require(d, "decomposition");
    copy_string(d->d.structure(), buf, cap, needed);
  });
}

rcop_status rcop_decomposition_json(const rcop_decomposition* d, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require(d, "decomposition");
    copy_string(rcop::decomposition_json(d->d), buf, cap, needed);
  });
}

rcop_status rcop_cone_constants(const rcop_decomposition* d, double* A, double* B, int* n0) {
  return guard([&] {
    require(d, "decomposition");
    const auto c = rcop::cone_constants(d->d.blocks);
    if (A) *A = c.A;
    if (B) *B = c.B;
    if (n0) *n0 = c.n0;
  });
}

rcop_status rcop_log_gamma_omega(int r, int d, double lambda, double* out) {
  return guard([&] {
    require(out, "out");
    *out = rcop::log_gamma_omega(r, d, lambda);
  });
}

rcop_status rcop_log_gamma_P(const rcop_decomposition* d, double lambda, double* out) {
  return guard([&] {
    require(d, "decomposition");
    require(out, "out");
    *out = rcop::log_gamma_P(d->d, lambda);
  });
}

rcop_status rcop_log_I(const rcop_decomposition* d, double delta, const double* D, double* out) {
  return guard([&] {
    require(d, "decomposition");
    require(out, "out");
    *out = rcop::log_I(d->d, rcop::Hyperparams{delta, load(D, d->d.p(), d->d.p())});
  });
}

rcop_status rcop_log_phi(const rcop_decomposition* d, const double* x, double* out) {
  return guard([&] {
    require(d, "decomposition");
    require(out, "out");
    *out = rcop::log_phi(d->d, load(x, d->d.p(), d->d.p()));
  });
}

rcop_status rcop_log_det(const rcop_decomposition* d, const double* x, double* out) {
  return guard([&] {
    require(d, "decomposition");
    require(out, "out");
    const auto v = rcop::block_values(d->d, load(x, d->d.p(), d->d.p()));
    if (!v.positive_definite()) rcop::fail(rcop::ErrorKind::Domain, "matrix is not positive definite");
    *out = v.log_det(d->d.blocks);
  });
}

rcop_status rcop_dataset_from_samples(const double* rows, int n, int p, rcop_dataset** out) {
  return guard([&] {
    require(out, "out");
    if (n < 0 || p < 1) rcop::fail(rcop::ErrorKind::InvalidArgument, "bad sample dimensions");
    *out = new rcop_dataset{rcop::DataSet::from_samples(n ? load(rows, n, p) : rcop::Matrix(0, p))};
  });
}

rcop_status rcop_dataset_from_scatter(const double* scatter, int p, int n, rcop_dataset** out) {
  return guard([&] {
    require(out, "out");
    if (p < 1) rcop::fail(rcop::ErrorKind::InvalidArgument, "p must be positive");
    *out = new rcop_dataset{rcop::DataSet::from_scatter(load(scatter, p, p), n)};
  });
}

rcop_status rcop_dataset_read_samples(const char* path, rcop_dataset** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new rcop_dataset{rcop::read_samples(path)};
  });
}

rcop_status rcop_dataset_read_scatter(const char* path, int n, rcop_dataset** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new rcop_dataset{rcop::read_scatter(path, n)};
  });
}

rcop_status rcop_dataset_frets(rcop_dataset** out) {
  return guard([&] {
    require(out, "out");
    *out = new rcop_dataset{rcop::frets_fixture()};
  });
}

rcop_status rcop_dataset_gaussian(const double* sigma, int p, int n, uint64_t seed, rcop_dataset** out) {
  return guard([&] {
    require(out, "out");
    if (p < 1 || n < 0) rcop::fail(rcop::ErrorKind::InvalidArgument, "bad dimensions");
    auto rng = rcop::Rng::stream(seed, "gen-data");
    *out = new rcop_dataset{rcop::gaussian_sample(load(sigma, p, p), n, rng)};
  });
}

void rcop_dataset_free(rcop_dataset* ds) { delete ds; }
int rcop_dataset_p(const rcop_dataset* ds) { return ds ? ds->ds.p() : 0; }
int rcop_dataset_n(const rcop_dataset* ds) { return ds ? ds->ds.n : 0; }
int rcop_dataset_has_samples(const rcop_dataset* ds) { return ds && ds->ds.samples.size() > 0 ? 1 : 0; }

rcop_status rcop_dataset_scatter(const rcop_dataset* ds, double* out) {
  return guard([&] {
    require(ds, "dataset");
    store(ds->ds.scatter, out);
  });
}

rcop_status rcop_dataset_samples(const rcop_dataset* ds, double* out) {
  return guard([&] {
    require(ds, "dataset");
    if (ds->ds.samples.size() == 0) rcop::fail(rcop::ErrorKind::InvalidArgument, "dataset holds only a scatter matrix");
    store(ds->ds.samples, out);
  });
}

rcop_status rcop_circulant_sigma(int p, double* out) {
  return guard([&] { store(rcop::circulant_sigma(p), out); });
}

rcop_status rcop_mle(const rcop_decomposition* d, const rcop_dataset* ds, double* out) {
  return guard([&] {
    require(d, "decomposition");
    require(ds, "dataset");
    store(rcop::mle(d->d, ds->ds), out);
  });
}

rcop_status rcop_wishart_log_pdf(const rcop_decomposition* d, double eta, const double* sigma, const double* x,
                                 double* out) {
  return guard([&] {
    require(d, "decomposition");
    require(out, "out");
    const int p = d->d.p();
    *out = rcop::log_pdf(d->d, rcop::WishartParams{eta, load(sigma, p, p)}, load(x, p, p));
  });
}

rcop_status rcop_wishart_sample(const rcop_group* g, int n, const double* sigma, uint64_t seed, uint64_t index,
                                double* out) {
  return guard([&] {
    require(g, "group");
    auto rng = rcop::Rng::stream(seed, "wishart", index);
    store(rcop::sample_wn(g->g, n, load(sigma, g->g.p, g->g.p), rng), out);
  });
}

rcop_status rcop_evaluator_new(const rcop_dataset* ds, double delta, const double* D, rcop_evaluator** out) {
  return guard([&] {
    require(ds, "dataset");
    require(out, "out");
    const int p = ds->ds.p();
    *out = new rcop_evaluator(ds->ds, rcop::Hyperparams{delta, load(D, p, p)});
  });
}
void rcop_evaluator_free(rcop_evaluator* ev) { delete ev; }

rcop_status rcop_log_posterior(rcop_evaluator* ev, const rcop_group* g, double* out) {
  return guard([&] {
    require(ev, "evaluator");
    require(g, "group");
    require(out, "out");
    *out = ev->ev(g->g);
  });
}

rcop_status rcop_select_exact(rcop_evaluator* ev, rcop_catalog catalog, rcop_table** out) {
  return guard([&] {
    require(ev, "evaluator");
    require(out, "out");
    const int p = ev->ev.data().p();
    rcop::ModelCatalog cat;
    if (catalog == RCOP_CATALOG_P4_ALL22) {
      if (p != 4) rcop::fail(rcop::ErrorKind::InvalidArgument, "the 22-coloring catalog needs p = 4");
      cat = rcop::catalog_p4();
    } else {
      cat = rcop::catalog_cyclic(p, 6);
    }
    *out = new rcop_table{rcop::exhaustive_posterior(cat, ev->ev)};
  });
}

rcop_status rcop_mh_run(rcop_evaluator* ev, rcop_algorithm algorithm, long steps, const char* start, uint64_t seed,
                        uint64_t chain, rcop_chain** out) {
  return guard([&] {
    require(ev, "evaluator");
    require(out, "out");
    const int p = ev->ev.data().p();
    const rcop::Permutation s = rcop::parse_cycles(start ? start : "", p);
    auto rng = rcop::Rng::stream(seed, "mh", chain);
    auto* c = new rcop_chain{};
    try {
      c->trace = algorithm == RCOP_ALGORITHM_SYM ? rcop::mh_sym(ev->ev, steps, s, rng)
                                                 : rcop::mh_cyclic(ev->ev, steps, rcop::cyclic_group(s), rng);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

void rcop_chain_free(rcop_chain* c) { delete c; }
long rcop_chain_length(const rcop_chain* c) { return c ? static_cast<long>(c->trace.steps.size()) : 0; }
double rcop_chain_acceptance_rate(const rcop_chain* c) { return c ? c->trace.acceptance_rate() : 0.0; }
double rcop_chain_effective_steps(const rcop_chain* c) { return c ? c->trace.effective_steps() : 0.0; }

rcop_status rcop_chain_write_trace(const rcop_chain* c, const char* path) {
  return guard([&] {
    require(c, "chain");
    require(path, "path");
    std::ofstream out(path);
    if (!out) rcop::fail(rcop::ErrorKind::Io, std::string("cannot write ") + path);
    rcop::write_trace_csv(out, c->trace);
  });
}

rcop_status rcop_chain_estimate(const rcop_chain* c, long burn_in, rcop_table** out) {
  return guard([&] {
    require(c, "chain");
    require(out, "out");
    if (burn_in < 0) rcop::fail(rcop::ErrorKind::InvalidArgument, "burn-in must be non-negative");
    *out = new rcop_table{rcop::estimate_posterior(c->trace, static_cast<std::size_t>(burn_in))};
  });
}

void rcop_table_free(rcop_table* t) { delete t; }
int rcop_table_size(const rcop_table* t) { return t ? static_cast<int>(t->t.rows.size()) : 0; }

rcop_status rcop_table_row(const rcop_table* t, int index, char* label, size_t cap, size_t* needed, double* log_post,
                           double* probability) {
  return guard([&] {
    const auto& row = row_at(t, index);
    copy_string(row.label, label, cap, needed);
    if (log_post) *log_post = row.log_post;
    if (probability) *probability = row.probability;
  });
}

rcop_status rcop_table_row_group(const rcop_table* t, int index, char* buf, size_t cap, size_t* needed) {
  return guard([&] { copy_string(row_at(t, index).group, buf, cap, needed); });
}

rcop_status rcop_table_set_metadata(rcop_table* t, const char* D_spec, uint64_t seed) {
  return guard([&] {
    require(t, "table");
    t->t.D_spec = D_spec ? D_spec : "";
    t->t.seed = seed;
  });
}

rcop_status rcop_table_json(const rcop_table* t, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require(t, "table");
    copy_string(rcop::posterior_json(t->t), buf, cap, needed);
  });
}

rcop_status rcop_matrix_read(const char* path, double* out, size_t cap, int* rows, int* cols) {
  return guard([&] {
    require(path, "path");
    const rcop::Matrix m = rcop::read_matrix(path);
    if (rows) *rows = static_cast<int>(m.rows());
    if (cols) *cols = static_cast<int>(m.cols());
    if (out && cap >= static_cast<size_t>(m.size())) store(m, out);
  });
}

rcop_status rcop_matrix_write(const char* path, const double* m, int rows, int cols) {
  return guard([&] {
    require(path, "path");
    rcop::write_matrix(path, load(m, rows, cols));
  });
}

rcop_status rcop_matrix_write_pgm(const char* path, const double* m, int rows, int cols) {
  return guard([&] {
    require(path, "path");
    rcop::write_pgm(path, load(m, rows, cols));
  });
}

rcop_status rcop_write_text(const char* path, const char* text) {
  return guard([&] {
    require(path, "path");
    rcop::write_text(path, text ? text : "");
  });
}

}  // extern "C"
