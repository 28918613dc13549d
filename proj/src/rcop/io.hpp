#pragma once

#include <iosfwd>
#include <string>

#include "rcop/decomp.hpp"
#include "rcop/select.hpp"
#include "rcop/wishart.hpp"

namespace rcop {

/// Comma, semicolon, tab or space separated numeric grid; '#' starts a comment.
Matrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix& m);

/// Rows are observations.
DataSet read_samples(const std::string& path);
DataSet read_scatter(const std::string& path, int n);

/// 8-bit grayscale PGM, values scaled linearly from min (black) to max (white).
void write_pgm(const std::string& path, const Matrix& m);

std::string decomposition_json(const BlockDecomposition& dec);
std::string posterior_json(const PosteriorTable& t);
void write_trace_csv(std::ostream& out, const ChainTrace& trace);

void write_text(const std::string& path, const std::string& text);

}  // namespace rcop
