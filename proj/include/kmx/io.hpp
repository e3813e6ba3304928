#pragma once

#include <iosfwd>
#include <string>

#include "kmx/classify.hpp"
#include "kmx/lie_algebra.hpp"
#include "kmx/series.hpp"

namespace kmx {

/// Complex entry format "re+imj" used by all text exchange formats.
std::string format_complex(Complex z);
Complex parse_complex(const std::string& token);

/// Matrix format: header "rows cols", then one row per line, entries
/// separated by single spaces.
void write_matrix(std::ostream& os, const Matrix& M);
Matrix read_matrix(std::istream& is);
void save_matrix(const std::string& path, const Matrix& M);
Matrix load_matrix(const std::string& path);

/// Series format: header "d_rows d_cols order", then the coefficient
/// matrices in increasing r, each in the matrix format.
void write_series(std::ostream& os, const MatrixSeries& s);
MatrixSeries read_series(std::istream& is);
void save_series(const std::string& path, const MatrixSeries& s);
MatrixSeries load_series(const std::string& path);

/// Structure constants as sparse triplets "A B C value" (value in the
/// complex entry format).
void write_structure_constants(std::ostream& os, const LieAlgebra& g);
void save_structure_constants(const std::string& path, const LieAlgebra& g);

/// Flat key-value rendering of a classification report; deterministic bytes
/// for fixed input.
std::string report_to_text(const ClassificationReport& rep);

/// Machine-readable rendering: one JSON object per check.
std::string report_to_json(const ClassificationReport& rep);

}  // namespace kmx
