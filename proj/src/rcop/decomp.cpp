#include "rcop/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "rcop/error.hpp"
#include "rcop/rng.hpp"

namespace rcop {

namespace {

constexpr double kClusterTol = 1e-6;     // relative eigenvalue gap for multiplicity grouping
constexpr double kCouplingTol = 1e-8;    // relative size of a nonzero off-diagonal coupling
constexpr double kRankTol = 1e-8;
constexpr double kValidationTol = 1e-8;
constexpr int kAttempts = 3;

// Signals a failed attempt; the numeric splitter retries with a fresh seed.
struct AttemptFailed {
  std::string reason;
};

std::vector<int> block_of_column(const BlockDecomposition& dec) {
  std::vector<int> out(static_cast<std::size_t>(dec.p()), -1);
  for (std::size_t b = 0; b < dec.blocks.size(); ++b)
    for (int c = 0; c < dec.blocks[b].width(); ++c)
      out[static_cast<std::size_t>(dec.blocks[b].col_begin + c)] = static_cast<int>(b);
  return out;
}

Matrix random_member(const Coloring& col, Rng& rng) {
  Matrix g(col.p, col.p);
  for (int i = 0; i < col.p; ++i)
    for (int j = i; j < col.p; ++j) g(i, j) = g(j, i) = rng.normal();
  return project(col, g);
}

// Columns of U sorted into blocks; each block stores its column range.
void assign_ranges(std::vector<BlockSpec>& blocks) {
  int col = 0;
  for (auto& b : blocks) {
    b.col_begin = col;
    col += b.width();
  }
}

// Orthonormal basis of the cycle-orbit (cosine/sine) vectors of a cyclic group.
struct OrbitVector {
  int beta;   // rotation numerator
  int size;   // orbit size p_c
  int orbit;  // c
  int index;  // k in v^{(c)}_k (1-based)
  Vector v;
};

std::vector<OrbitVector> orbit_vectors(const Permutation& gen) {
  const int p = gen.size();
  std::vector<OrbitVector> out;
  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  int orbit = 0;
  for (int i = 0; i < p; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    std::vector<int> cyc;
    for (int j = i; !seen[static_cast<std::size_t>(j)]; j = gen(j)) {
      seen[static_cast<std::size_t>(j)] = 1;
      cyc.push_back(j);
    }
    const int pc = static_cast<int>(cyc.size());
    auto make = [&](int index, auto coefficient) {
      OrbitVector ov{index / 2, pc, orbit, index, Vector::Zero(p)};
      for (int k = 0; k < pc; ++k) ov.v(cyc[static_cast<std::size_t>(k)]) = coefficient(k);
      out.push_back(std::move(ov));
    };
    const double two_pi = 2.0 * std::numbers::pi;
    make(1, [&](int) { return std::sqrt(1.0 / pc); });
    for (int beta = 1; 2 * beta < pc; ++beta) {
      make(2 * beta, [&](int k) { return std::sqrt(2.0 / pc) * std::cos(two_pi * beta * k / pc); });
      make(2 * beta + 1, [&](int k) { return std::sqrt(2.0 / pc) * std::sin(two_pi * beta * k / pc); });
    }
    if (pc % 2 == 0) make(pc, [&](int k) { return std::sqrt(1.0 / pc) * (k % 2 == 0 ? 1.0 : -1.0); });
    ++orbit;
  }
  return out;
}

// Compares rotation fractions beta/size.
int compare_fraction(const OrbitVector& a, const OrbitVector& b) {
  const long lhs = static_cast<long>(a.beta) * b.size, rhs = static_cast<long>(b.beta) * a.size;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

Matrix inverse_sqrt_spd(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Cluster {
  int begin;
  int size;
};

std::vector<Cluster> cluster_eigenvalues(const Vector& ev) {
  std::vector<Cluster> out;
  if (ev.size() == 0) return out;
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  int start = 0;
  for (int j = 1; j <= ev.size(); ++j) {
    if (j == ev.size() || ev(j) - ev(j - 1) > kClusterTol * scale) {
      out.push_back({start, j - start});
      start = j;
    }
  }
  return out;
}

int numeric_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > kRankTol * s(0)) ++rank;
  return rank;
}

// Orthonormal k×k basis change making the division algebra spanned by Id and
// `units` act as M_K(q) ⊗ I_{k/d}.
Matrix field_basis(const std::vector<Matrix>& units, int k) {
  const int d = static_cast<int>(units.size()) + 1;
  const int m = k / d;
  Matrix basis = Matrix::Zero(k, k);
  Matrix placed(k, 0);  // span is invariant under every unit
  for (int t = 0; t < m; ++t) {
    Vector best;
    double best_norm = -1.0;
    for (int i = 0; i < k; ++i) {
      Vector res = Vector::Unit(k, i);
      if (placed.cols()) res -= placed * (placed.transpose() * res);
      if (res.norm() > best_norm) {
        best_norm = res.norm();
        best = res;
      }
    }
    const Vector w = best.normalized();
    Matrix grown(k, placed.cols() + d);
    grown.leftCols(placed.cols()) = placed;
    basis.col(t) = w;
    grown.col(placed.cols()) = w;
    for (int a = 1; a < d; ++a) {
      basis.col(a * m + t) = units[static_cast<std::size_t>(a - 1)] * w;
      grown.col(placed.cols() + a) = basis.col(a * m + t);
    }
    placed = grown;
  }
  return basis;
}

struct Attempt {
  Matrix U;
  std::vector<BlockSpec> blocks;
};

Attempt split_once(const Group& g, const Coloring& col, Rng& rng) {
  const int p = g.p;
  const Orbits orb = orbits(g);
  const int C = static_cast<int>(orb.classes.size());

  // First stage: a cyclic group with the same vertex orbits supplies the
  // invariant vectors (first C columns) and a complement basis.
  std::vector<int> im(static_cast<std::size_t>(p));
  for (const auto& cls : orb.classes)
    for (std::size_t t = 0; t < cls.size(); ++t) im[static_cast<std::size_t>(cls[t])] = cls[(t + 1) % cls.size()];
  const BlockDecomposition surrogate = cyclic_basis(cyclic_group(Permutation(im)));
  const Matrix T = surrogate.U.leftCols(C);
  const Matrix Q = surrogate.U.rightCols(p - C);

  Attempt out;
  out.blocks.push_back({C, 1, 1, 0});
  std::vector<Matrix> block_columns{T};

  if (p > C) {
    const Matrix A = Q.transpose() * random_member(col, rng) * Q;
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    const Matrix QV = Q * es.eigenvectors();
    const auto clusters = cluster_eigenvalues(es.eigenvalues());
    const int nc = static_cast<int>(clusters.size());

    const Matrix B = QV.transpose() * random_member(col, rng) * QV;
    const double bscale = std::max(max_abs(B), 1e-300);
    std::vector<int> parent(static_cast<std::size_t>(nc));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
      return x;
    };
    for (int a = 0; a < nc; ++a)
      for (int b = a + 1; b < nc; ++b) {
        const auto& ca = clusters[static_cast<std::size_t>(a)];
        const auto& cb = clusters[static_cast<std::size_t>(b)];
        if (max_abs(B.block(ca.begin, cb.begin, ca.size, cb.size)) > kCouplingTol * bscale) {
          int ra = find(a), rb = find(b);
          if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
        }
      }
    std::map<int, std::vector<int>> components;  // keyed by smallest cluster index
    for (int a = 0; a < nc; ++a) components[find(a)].push_back(a);

    const Matrix G0 = random_member(col, rng);
    const Matrix G1 = random_member(col, rng);
    const Matrix G2 = random_member(col, rng);
    const auto zbasis = basis(col);

    for (const auto& [root, members] : components) {
      const int k = clusters[static_cast<std::size_t>(members.front())].size;
      const int r = static_cast<int>(members.size());
      for (int m : members)
        if (clusters[static_cast<std::size_t>(m)].size != k)
          throw AttemptFailed{"coupled eigenvalue groups have different multiplicities"};

      std::vector<Matrix> W(static_cast<std::size_t>(r));
      W[0] = QV.middleCols(clusters[static_cast<std::size_t>(members[0])].begin, k);
      for (int j = 1; j < r; ++j) {
        const Matrix Wj = QV.middleCols(clusters[static_cast<std::size_t>(members[static_cast<std::size_t>(j)])].begin, k);
        const Matrix M = Wj.transpose() * G0 * W[0];
        const double s2 = M.squaredNorm() / k;
        if (s2 < 1e-20 * std::max(G0.squaredNorm(), 1e-300))
          throw AttemptFailed{"vanishing intertwiner between equivalent components"};
        W[static_cast<std::size_t>(j)] = Wj * M / std::sqrt(s2);
      }

      Matrix Wb(p, r * k);
      for (int j = 0; j < r; ++j) Wb.middleCols(j * k, k) = W[static_cast<std::size_t>(j)];
      const int w = r * k;
      Matrix images(w * (w + 1) / 2, static_cast<int>(zbasis.size()));
      for (std::size_t e = 0; e < zbasis.size(); ++e) {
        const Matrix cmp = Wb.transpose() * zbasis[e] * Wb;
        int row = 0;
        for (int a = 0; a < w; ++a)
          for (int b = a; b < w; ++b) images(row++, static_cast<int>(e)) = cmp(a, b);
      }
      const int rank = numeric_rank(images);
      int d = 0;
      if (r == 1) {
        if (rank == 1) d = 1;
      } else {
        const int pairs = r * (r - 1) / 2;
        if ((rank - r) > 0 && (rank - r) % pairs == 0) d = (rank - r) / pairs;
      }
      if (d != 1 && d != 2 && d != 4)
        throw AttemptFailed{"block rank " + std::to_string(rank) + " inconsistent with r=" +
                            std::to_string(r) + " for any field dimension in {1,2,4}"};
      if (k % d != 0) throw AttemptFailed{"field dimension does not divide multiplicity"};

      if (d > 1) {
        std::vector<Matrix> units;
        for (const Matrix* G : {&G0, &G1, &G2}) {
          Matrix S = W[0].transpose() * (*G) * W[1];
          S = 0.5 * (S - S.transpose());
          for (const auto& u : units) S -= (u.cwiseProduct(S).sum() / k) * u;
          const double n2 = S.squaredNorm() / k;
          if (n2 < 1e-20) continue;
          units.push_back(S / std::sqrt(n2));
          if (static_cast<int>(units.size()) == 2 || (d == 2 && units.size() == 1)) break;
        }
        if (static_cast<int>(units.size()) < (d == 2 ? 1 : 2))
          throw AttemptFailed{"could not find imaginary units of the commutant"};
        if (d == 4) units.push_back(-(units[0] * units[1]));
        const Matrix P = field_basis(units, k);
        for (auto& wj : W) wj = wj * P;
        for (int j = 0; j < r; ++j) Wb.middleCols(j * k, k) = W[static_cast<std::size_t>(j)];
      }
      out.blocks.push_back({r, d, k, 0});
      block_columns.push_back(Wb);
    }
  }

  assign_ranges(out.blocks);
  out.U.resize(p, p);
  int c = 0;
  for (const auto& bc : block_columns) {
    out.U.middleCols(c, bc.cols()) = bc;
    c += static_cast<int>(bc.cols());
  }
  out.U = out.U * inverse_sqrt_spd(out.U.transpose() * out.U);
  return out;
}

}  // namespace

std::string BlockSpec::name() const {
  const char* field = d == 1 ? "R" : (d == 2 ? "C" : "H");
  return std::string(d == 1 ? "Sym(" : "Herm(") + std::to_string(r) + ";" + field + ")";
}

int BlockDecomposition::dimension() const {
  int dim = 0;
  for (const auto& b : blocks) dim += b.omega_dim();
  return dim;
}

std::string BlockDecomposition::structure() const {
  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) out += " ⊕ ";
    out += blocks[i].name();
    if (blocks[i].k / blocks[i].d > 1) out += "⊗I" + std::to_string(blocks[i].k / blocks[i].d);
  }
  return out;
}

std::vector<std::tuple<int, int, int>> normalized_signature(const std::vector<BlockSpec>& blocks) {
  std::vector<std::tuple<int, int, int>> out;
  for (const auto& b : blocks) out.emplace_back(b.r, b.r == 1 ? 1 : b.d, b.k);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BlockSpec> cyclic_structure_constants(const CyclicGroup& c) {
  const std::uint64_t n = c.order();
  const Orbits orb = orbits(c.p(), std::span<const Permutation>(&c.generator(), 1));
  std::map<std::uint64_t, int> r_of_alpha;
  for (int pc : orb.sizes)
    for (int beta = 0; 2 * beta <= pc; ++beta) ++r_of_alpha[static_cast<std::uint64_t>(beta) * (n / pc)];
  std::vector<BlockSpec> blocks;
  for (const auto& [alpha, r] : r_of_alpha) {
    const int d = (alpha == 0 || 2 * alpha == n) ? 1 : 2;
    blocks.push_back({r, d, d, 0});
  }
  assign_ranges(blocks);
  return blocks;
}

BlockDecomposition cyclic_basis(const CyclicGroup& c) {
  auto vecs = orbit_vectors(c.generator());
  std::stable_sort(vecs.begin(), vecs.end(), [](const OrbitVector& a, const OrbitVector& b) {
    if (int f = compare_fraction(a, b)) return f < 0;
    if (a.orbit != b.orbit) return a.orbit < b.orbit;
    return (a.index % 2 == 0) && (b.index % 2 == 1);
  });
  BlockDecomposition dec;
  dec.group = Group::from_cyclic(c);
  dec.key = c.generator().to_string();
  const int p = c.p();
  dec.U.resize(p, p);
  for (int j = 0; j < p; ++j) dec.U.col(j) = vecs[static_cast<std::size_t>(j)].v;
  // Consecutive runs with equal fraction form one block.
  for (std::size_t j = 0; j < vecs.size();) {
    std::size_t end = j;
    int r = 0;
    int last_orbit = -1;
    while (end < vecs.size() && compare_fraction(vecs[j], vecs[end]) == 0) {
      if (vecs[end].orbit != last_orbit) {
        ++r;
        last_orbit = vecs[end].orbit;
      }
      ++end;
    }
    const int d = static_cast<int>(end - j) / r;
    dec.blocks.push_back({r, d, d, static_cast<int>(j)});
    j = end;
  }
  return dec;
}

BlockDecomposition numeric_decompose(const Group& g, std::uint64_t seed) {
  const Coloring col = coloring(g);
  std::string last_reason;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng = Rng::stream(seed, "numeric_decompose", static_cast<std::uint64_t>(attempt));
    try {
      Attempt a = split_once(g, col, rng);
      BlockDecomposition dec{g, g.to_string(), std::move(a.U), std::move(a.blocks)};
      if (dec.dimension() != col.dimension())
        throw AttemptFailed{"block dimensions sum to " + std::to_string(dec.dimension()) +
                            " but dim Z_Γ = " + std::to_string(col.dimension())};
      for (const auto& s : g.generators)
        if (off_block_residual(dec, permutation_matrix(s)) > kValidationTol)
          throw AttemptFailed{"generator not block diagonal in the adapted basis"};
      const Matrix X = random_member(col, rng);
      const double scale = max_abs(X);
      if (off_block_residual(dec, X) > kValidationTol * scale ||
          pattern_residual(dec, X) > kValidationTol * scale)
        throw AttemptFailed{"invariant matrix not block diagonal in the adapted basis"};
      return dec;
    } catch (const AttemptFailed& f) {
      last_reason = f.reason;
    }
  }
  fail(ErrorKind::Decomposition,
       "numeric decomposition of " + g.to_string() + " failed after " + std::to_string(kAttempts) +
           " attempts: " + last_reason);
}

BlockDecomposition decompose(const Group& g, std::uint64_t seed) {
  if (g.generators.size() <= 1) {
    const Permutation s = g.generators.empty() ? Permutation::identity(g.p) : g.generators.front();
    BlockDecomposition dec = cyclic_basis(cyclic_group(s));
    dec.group = g;
    return dec;
  }
  return numeric_decompose(g, seed);
}

double BlockValues::log_det(const std::vector<BlockSpec>& specs) const {
  double total = 0.0;
  for (std::size_t i = 0; i < blocks.size(); ++i) total += specs[i].k * blocks[i].log_det;
  return total;
}

bool BlockValues::positive_definite(double rel_tol) const {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& b : blocks)
    for (double v : b.eigenvalues) {
      lo = std::min(lo, v);
      hi = std::max(hi, std::abs(v));
    }
  return lo > rel_tol * hi;
}

BlockValues block_values(const BlockDecomposition& dec, const Matrix& X, bool check_membership) {
  if (X.rows() != dec.p() || X.cols() != dec.p())
    fail(ErrorKind::InvalidArgument, "block_values: dimension mismatch");
  if (check_membership && !is_member(dec.group, X, 1e-9))
    fail(ErrorKind::Domain, "matrix is not invariant under " + dec.group.to_string());
  BlockValues out;
  out.blocks.reserve(dec.blocks.size());
  double scale = 0.0;
  std::vector<Vector> spectra;
  for (const auto& b : dec.blocks) {
    const Matrix Ub = dec.U.middleCols(b.col_begin, b.width());
    const Matrix Y = Ub.transpose() * X * Ub;
    Eigen::SelfAdjointEigenSolver<Matrix> es(Y, Eigen::EigenvaluesOnly);
    spectra.push_back(es.eigenvalues());
    scale = std::max(scale, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
    const auto& b = dec.blocks[i];
    const Vector& ev = spectra[i];
    BlockValue bv;
    bv.positive = true;
    for (int j = 0; j < b.r; ++j) {
      const auto grp = ev.segment(j * b.k, b.k);
      if (grp.maxCoeff() - grp.minCoeff() > 1e-7 * std::max(scale, 1e-300))
        fail(ErrorKind::Numeric, "block spectrum does not split into " + std::to_string(b.r) +
                                     " groups of multiplicity " + std::to_string(b.k));
      const double v = grp.mean();
      bv.eigenvalues.push_back(v);
      bv.log_det += std::log(std::abs(v));
      if (!(v > 0.0)) bv.positive = false;
    }
    out.blocks.push_back(std::move(bv));
  }
  return out;
}

double log_phi(const BlockDecomposition& dec, const BlockValues& values) {
  double total = 0.0;
  for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
    const auto& b = dec.blocks[i];
    if (!values.blocks[i].positive) fail(ErrorKind::Domain, "matrix is not positive definite");
    total -= static_cast<double>(b.omega_dim()) / b.r * values.blocks[i].log_det;
  }
  return total;
}

double log_phi(const BlockDecomposition& dec, const Matrix& X) {
  return log_phi(dec, block_values(dec, X));
}

double off_block_residual(const BlockDecomposition& dec, const Matrix& X) {
  const Matrix M = dec.U.transpose() * X * dec.U;
  const auto owner = block_of_column(dec);
  double worst = 0.0;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (owner[static_cast<std::size_t>(i)] != owner[static_cast<std::size_t>(j)])
        worst = std::max(worst, std::abs(M(i, j)));
  return worst;
}

Matrix field_matrix(int d, const double* q) {
  Matrix f(d, d);
  switch (d) {
    case 1:
      f << q[0];
      break;
    case 2:
      f << q[0], -q[1],
           q[1], q[0];
      break;
    case 4:
      f << q[0], -q[1], -q[2], -q[3],
           q[1], q[0], q[3], -q[2],
           q[2], -q[3], q[0], q[1],
           q[3], q[2], -q[1], q[0];
      break;
    default:
      fail(ErrorKind::InvalidArgument, "field dimension must be 1, 2 or 4");
  }
  return f;
}

double pattern_residual(const BlockDecomposition& dec, const Matrix& X) {
  double worst = 0.0;
  for (const auto& b : dec.blocks) {
    const Matrix Ub = dec.U.middleCols(b.col_begin, b.width());
    const Matrix Y = Ub.transpose() * X * Ub;
    const int m = b.k / b.d;
    for (int a = 0; a < b.r; ++a)
      for (int c = 0; c < b.r; ++c) {
        const Matrix sub = Y.block(a * b.k, c * b.k, b.k, b.k);
        Matrix fd = Matrix::Zero(b.d, b.d);
        for (int u = 0; u < b.d; ++u)
          for (int v = 0; v < b.d; ++v)
            for (int t = 0; t < m; ++t) fd(u, v) += sub(u * m + t, v * m + t) / m;
        const Vector q = fd.col(0);
        const Matrix f = field_matrix(b.d, q.data());
        Matrix expected = Matrix::Zero(b.k, b.k);
        for (int u = 0; u < b.d; ++u)
          for (int v = 0; v < b.d; ++v)
            for (int t = 0; t < m; ++t) expected(u * m + t, v * m + t) = f(u, v);
        worst = std::max(worst, max_abs(sub - expected));
      }
  }
  return worst;
}

DecompositionCache::Ptr DecompositionCache::get_or_build(
    const std::string& key, const std::function<BlockDecomposition()>& build) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = map_.find(key); it != map_.end()) return it->second;
  }
  auto built = std::make_shared<const BlockDecomposition>(build());
  std::unique_lock lock(mutex_);
  auto [it, inserted] = map_.emplace(key, std::move(built));
  return it->second;
}

std::size_t DecompositionCache::size() const {
  std::shared_lock lock(mutex_);
  return map_.size();
}

}  // namespace rcop
