#include "rcop/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "rcop/conefn.hpp"
#include "rcop/error.hpp"

namespace rcop {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  return out;
}

std::vector<double> parse_row(const std::string& line, const std::string& path, int lineno) {
  std::vector<double> row;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
      fail(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": not a number: '" + token + "'");
    row.push_back(v);
    token.clear();
  };
  for (char ch : line) {
    if (ch == '#') break;
    if (ch == ',' || ch == ';' || ch == ' ' || ch == '\t' || ch == '\r')
      flush();
    else
      token += ch;
  }
  flush();
  return row;
}

}  // namespace

Matrix read_matrix(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = parse_row(line, path, lineno);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_matrix(const std::string& path, const Matrix& m) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

DataSet read_samples(const std::string& path) { return DataSet::from_samples(read_matrix(path)); }

DataSet read_scatter(const std::string& path, int n) {
  Matrix u = read_matrix(path);
  if (u.rows() != u.cols()) fail(ErrorKind::Parse, path + ": scatter matrix must be square");
  return DataSet::from_scatter(std::move(u), n);
}

void write_pgm(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  const double lo = m.size() ? m.minCoeff() : 0.0, hi = m.size() ? m.maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double t = hi > lo ? (m(i, j) - lo) / (hi - lo) : 0.5;
      out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(t, 0.0, 1.0) * 255.0 + 0.5)));
    }
}

std::string decomposition_json(const BlockDecomposition& dec) {
  nlohmann::json j;
  j["p"] = dec.p();
  j["group"] = dec.group.to_string();
  j["structure"] = dec.structure();
  j["dim_Z"] = dec.dimension();
  const ConeConstants c = cone_constants(dec.blocks);
  j["n0"] = c.n0;
  j["A"] = c.A;
  j["B"] = c.B;
  for (const auto& b : dec.blocks)
    j["blocks"].push_back({{"r", b.r}, {"d", b.d}, {"k", b.k}, {"field", b.d == 1 ? "R" : b.d == 2 ? "C" : "H"},
                           {"columns", {b.col_begin, b.col_begin + b.width()}}});
  return j.dump(2);
}

std::string posterior_json(const PosteriorTable& t) {
  nlohmann::json j;
  j["delta"] = t.delta;
  j["D"] = t.D_spec;
  j["n"] = t.n;
  j["seed"] = t.seed;
  if (t.effective_steps) j["effective_steps"] = *t.effective_steps;
  if (t.acceptance_rate) j["acceptance_rate"] = *t.acceptance_rate;
  j["models"] = nlohmann::json::array();
  for (const auto& r : t.rows)
    j["models"].push_back({{"label", r.label}, {"group", r.group}, {"log_post", r.log_post}, {"probability", r.probability}});
  return j.dump(2);
}

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  const bool sym = trace.algorithm == Algorithm::Sym;
  out << "step,generator,accepted,log_post,weight" << (sym ? ",state" : "") << '\n';
  out << std::setprecision(17);
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& s = trace.steps[t];
    out << t + 1 << ",\"" << trace.states[s.state].generator().to_string() << "\"," << (s.accepted ? 1 : 0) << ','
        << s.log_post << ',' << s.weight;
    if (sym) out << ",\"" << trace.perms[s.perm].to_string() << '"';
    out << '\n';
  }
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace rcop
