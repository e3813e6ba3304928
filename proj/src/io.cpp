#include "kmx/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kmx {

std::string format_complex(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

Complex parse_complex(const std::string& token) {
  const char* s = token.c_str();
  char* end = nullptr;
  const double re = std::strtod(s, &end);
  if (end == s) throw FormatError("parse_complex: cannot parse '" + token + "'");
  const char* s2 = end;
  const double im = std::strtod(s2, &end);
  if (end == s2 || *end != 'j') throw FormatError("parse_complex: cannot parse '" + token + "'");
  return {re, im};
}

void write_matrix(std::ostream& os, const Matrix& M) {
  os << M.rows() << " " << M.cols() << "\n";
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) os << " ";
      os << format_complex(M(i, j));
    }
    os << "\n";
  }
}

Matrix read_matrix(std::istream& is) {
  Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw FormatError("read_matrix: bad header");
  Matrix M(rows, cols);
  std::string tok;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      if (!(is >> tok)) throw FormatError("read_matrix: truncated data");
      M(i, j) = parse_complex(tok);
    }
  return M;
}

void save_matrix(const std::string& path, const Matrix& M) {
  std::ofstream os(path);
  if (!os) throw FormatError("save_matrix: cannot open " + path);
  write_matrix(os, M);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("load_matrix: cannot open " + path);
  return read_matrix(is);
}

void write_series(std::ostream& os, const MatrixSeries& s) {
  os << s.rows << " " << s.cols << " " << s.order << "\n";
  for (int r = 0; r <= s.order; ++r) write_matrix(os, s.coeff(r));
}

MatrixSeries read_series(std::istream& is) {
  MatrixSeries s;
  if (!(is >> s.rows >> s.cols >> s.order) || s.order < 0) throw FormatError("read_series: bad header");
  s.coeffs.reserve(static_cast<size_t>(s.order) + 1);
  for (int r = 0; r <= s.order; ++r) {
    Matrix M = read_matrix(is);
    if (M.rows() != s.rows || M.cols() != s.cols) throw FormatError("read_series: coefficient shape mismatch");
    s.coeffs.push_back(std::move(M));
  }
  return s;
}

void save_series(const std::string& path, const MatrixSeries& s) {
  std::ofstream os(path);
  if (!os) throw FormatError("save_series: cannot open " + path);
  write_series(os, s);
}

MatrixSeries load_series(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("load_series: cannot open " + path);
  return read_series(is);
}

void write_structure_constants(std::ostream& os, const LieAlgebra& g) {
  for (Index A = 0; A < g.dim; ++A)
    for (Index B = 0; B < g.dim; ++B)
      for (Index C = 0; C < g.dim; ++C) {
        const Complex f = g.structure_constant(A, B, C);
        if (f != Complex(0, 0)) os << A << " " << B << " " << C << " " << format_complex(f) << "\n";
      }
}

void save_structure_constants(const std::string& path, const LieAlgebra& g) {
  std::ofstream os(path);
  if (!os) throw FormatError("save_structure_constants: cannot open " + path);
  write_structure_constants(os, g);
}

namespace {

std::string fixed(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

}  // namespace

std::string report_to_text(const ClassificationReport& rep) {
  std::ostringstream os;
  os << "family = " << rep.k_family << "\n";
  os << "quasi_classical = " << (rep.quasi_classical ? "yes" : "no") << "\n";
  os << "twist_class = " << to_string(rep.twist) << "\n";
  os << "residual_algebra.dim = " << rep.residual_algebra.dim << "\n";
  os << "residual_algebra.tag = " << to_string(rep.residual_algebra.tag) << "\n";
  os << "residual_algebra.center_dim = " << rep.residual_algebra.center_dim << "\n";
  os << "residual_algebra.radical_dim = " << rep.residual_algebra.radical_dim << "\n";
  os << "residual_algebra.levi_dim = " << rep.residual_algebra.levi_dim << "\n";
  os << "residual_algebra.derived_series =";
  for (Index dmm : rep.residual_algebra.derived_series) os << " " << dmm;
  os << "\n";
  if (rep.involution) {
    os << "involution.fixed_dim = " << rep.involution->plus_space.dim() << "\n";
    os << "involution.odd_dim = " << rep.involution->minus_space.dim() << "\n";
    os << "involution.n_defect = " << fixed(rep.involution->n_defect) << "\n";
  }
  for (const auto& c : rep.checks) {
    os << "check \"" << c.name << "\" residual=" << fixed(c.residual) << " tol=" << fixed(c.tolerance) << " "
       << (c.pass ? "PASS" : "FAIL") << "\n";
  }
  os << "all_pass = " << (rep.all_pass() ? "yes" : "no") << "\n";
  return os.str();
}

std::string report_to_json(const ClassificationReport& rep) {
  nlohmann::ordered_json j;
  j["family"] = rep.k_family;
  j["quasi_classical"] = rep.quasi_classical;
  j["twist_class"] = to_string(rep.twist);
  j["residual_algebra"] = {{"dim", rep.residual_algebra.dim},
                           {"tag", to_string(rep.residual_algebra.tag)},
                           {"center_dim", rep.residual_algebra.center_dim},
                           {"radical_dim", rep.residual_algebra.radical_dim},
                           {"levi_dim", rep.residual_algebra.levi_dim},
                           {"derived_series", rep.residual_algebra.derived_series}};
  if (rep.involution) {
    j["involution"] = {{"fixed_dim", rep.involution->plus_space.dim()},
                       {"odd_dim", rep.involution->minus_space.dim()},
                       {"n_defect", rep.involution->n_defect}};
  }
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  j["checks"] = checks;
  j["all_pass"] = rep.all_pass();
  return j.dump(2) + "\n";
}

}  // namespace kmx
