#include "rcop/colored.hpp"

#include <numeric>

#include "rcop/error.hpp"

namespace rcop {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Relabels roots to 0,1,2,... in order of first occurrence.
std::vector<int> relabel(UnionFind& uf, std::size_t n, int& count) {
  std::vector<int> label(n, -1), out(n);
  count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = uf.find(i);
    if (label[r] < 0) label[r] = count++;
    out[i] = label[r];
  }
  return out;
}

}  // namespace

std::size_t Coloring::pair_index(int p, int i, int j) {
  if (i > j) std::swap(i, j);
  // pairs (0,1),(0,2),...,(0,p-1),(1,2),...
  const auto pi = static_cast<std::size_t>(i), pp = static_cast<std::size_t>(p);
  return pi * pp - pi * (pi + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

Eigen::MatrixXi Coloring::class_grid() const {
  Eigen::MatrixXi grid(p, p);
  for (int i = 0; i < p; ++i) {
    grid(i, i) = vertex_class[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < p; ++j)
      grid(i, j) = grid(j, i) = vertex_class_count + edge_class[pair_index(p, i, j)];
  }
  return grid;
}

Coloring coloring(const Group& g) {
  const int p = g.p;
  Coloring c;
  c.p = p;
  UnionFind vertices(static_cast<std::size_t>(p));
  const std::size_t npairs = static_cast<std::size_t>(p) * static_cast<std::size_t>(p > 0 ? p - 1 : 0) / 2;
  UnionFind pairs(npairs);
  for (const auto& s : g.generators) {
    if (s.size() != p) fail(ErrorKind::InvalidArgument, "coloring: generator size mismatch");
    for (int i = 0; i < p; ++i) {
      vertices.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(s(i)));
      for (int j = i + 1; j < p; ++j)
        pairs.unite(Coloring::pair_index(p, i, j), Coloring::pair_index(p, s(i), s(j)));
    }
  }
  c.vertex_class = relabel(vertices, static_cast<std::size_t>(p), c.vertex_class_count);
  c.edge_class = relabel(pairs, npairs, c.edge_class_count);
  return c;
}

Matrix project(const Coloring& c, const Matrix& x) {
  const int p = c.p;
  if (x.rows() != p || x.cols() != p) fail(ErrorKind::InvalidArgument, "project: dimension mismatch");
  std::vector<double> vsum(static_cast<std::size_t>(c.vertex_class_count), 0.0);
  std::vector<double> esum(static_cast<std::size_t>(c.edge_class_count), 0.0);
  std::vector<int> vcount(vsum.size(), 0), ecount(esum.size(), 0);
  for (int i = 0; i < p; ++i) {
    const auto v = static_cast<std::size_t>(c.vertex_class[static_cast<std::size_t>(i)]);
    vsum[v] += x(i, i);
    ++vcount[v];
    for (int j = i + 1; j < p; ++j) {
      const auto e = static_cast<std::size_t>(c.edge_class[Coloring::pair_index(p, i, j)]);
      esum[e] += 0.5 * (x(i, j) + x(j, i));
      ++ecount[e];
    }
  }
  Matrix out(p, p);
  for (int i = 0; i < p; ++i) {
    const auto v = static_cast<std::size_t>(c.vertex_class[static_cast<std::size_t>(i)]);
    out(i, i) = vsum[v] / vcount[v];
    for (int j = i + 1; j < p; ++j) {
      const auto e = static_cast<std::size_t>(c.edge_class[Coloring::pair_index(p, i, j)]);
      out(i, j) = out(j, i) = esum[e] / ecount[e];
    }
  }
  return out;
}

std::vector<Matrix> basis(const Coloring& c) {
  const int p = c.p;
  std::vector<Matrix> out(static_cast<std::size_t>(c.dimension()), Matrix::Zero(p, p));
  for (int i = 0; i < p; ++i) {
    out[static_cast<std::size_t>(c.vertex_class[static_cast<std::size_t>(i)])](i, i) = 1.0;
    for (int j = i + 1; j < p; ++j) {
      auto& b = out[static_cast<std::size_t>(c.vertex_class_count +
                                             c.edge_class[Coloring::pair_index(p, i, j)])];
      b(i, j) = b(j, i) = 1.0;
    }
  }
  return out;
}

bool is_member(const Group& g, const Matrix& x, double tol) {
  const int p = g.p;
  if (x.rows() != p || x.cols() != p) return false;
  const double scale = std::max(x.cwiseAbs().maxCoeff(), 1e-300);
  if ((x - x.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
  for (const auto& s : g.generators)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        if (std::abs(x(s(i), s(j)) - x(i, j)) > tol * scale) return false;
  return true;
}

Matrix permutation_matrix(const Permutation& s) {
  Matrix r = Matrix::Zero(s.size(), s.size());
  for (int i = 0; i < s.size(); ++i) r(s(i), i) = 1.0;
  return r;
}

Matrix symmetrize(const Matrix& x) { return 0.5 * (x + x.transpose()); }

}  // namespace rcop
