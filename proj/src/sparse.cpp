#include "blkorth/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <fstream>
#include <sstream>

#include "blkorth/errors.hpp"

namespace blkorth {

CsrMatrix CsrMatrix::from_triplets(std::size_t nrows, std::size_t ncols,
                                   std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  CsrMatrix m;
  m.nrows_ = nrows;
  m.ncols_ = ncols;
  m.row_ptr_.assign(nrows + 1, 0);
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());

  for (std::size_t i = 0; i < entries.size();) {
    const std::size_t r = entries[i].row;
    const std::size_t c = entries[i].col;
    assert(r < nrows && c < ncols);
    double v = 0.0;
    while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
      v += entries[i].value;
      ++i;
    }
    m.col_idx_.push_back(c);
    m.values_.push_back(v);
    m.row_ptr_[r + 1] = m.col_idx_.size();
  }
  for (std::size_t r = 0; r < nrows; ++r)
    m.row_ptr_[r + 1] = std::max(m.row_ptr_[r + 1], m.row_ptr_[r]);
  return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  assert(x.size() == a.ncols());
  std::vector<double> y(a.nrows(), 0.0);
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& vv = a.values();
  for (std::size_t r = 0; r < a.nrows(); ++r) {
    double s = 0.0;
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) s += vv[k] * x[ci[k]];
    y[r] = s;
  }
  return y;
}

DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& v) {
  assert(s.ncols() == v.rows());
  DenseMatrix out(s.nrows(), v.cols());
  const auto& rp = s.row_ptr();
  const auto& ci = s.col_idx();
  const auto& vv = s.values();
  for (std::size_t c = 0; c < v.cols(); ++c) {
    for (std::size_t r = 0; r < s.nrows(); ++r) {
      double acc = 0.0;
      for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) acc += vv[k] * v(ci[k], c);
      out(r, c) = acc;
    }
  }
  return out;
}

namespace {
std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}
} // namespace

CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open file '" + path + "'");

  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++lineno;
  {
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket") throw BannerError(line);
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix" || format != "coordinate" || field != "real" ||
        (symmetry != "general" && symmetry != "symmetric"))
      throw BannerError(line);
    const bool symmetric = symmetry == "symmetric";

    std::size_t nrows = 0, ncols = 0, nnz = 0;
    bool have_sizes = false;
    std::vector<CsrMatrix::Triplet> entries;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '%') continue;
      std::istringstream ls(line);
      if (!have_sizes) {
        if (!(ls >> nrows >> ncols >> nnz)) throw ParseError(lineno, "bad size line");
        have_sizes = true;
        entries.reserve(symmetric ? 2 * nnz : nnz);
        continue;
      }
      long long r = 0, c = 0;
      double v = 0.0;
      if (!(ls >> r >> c >> v)) throw ParseError(lineno, "bad entry line");
      if (r < 1 || c < 1 || static_cast<std::size_t>(r) > nrows ||
          static_cast<std::size_t>(c) > ncols)
        throw ParseError(lineno, "index out of range");
      const auto ri = static_cast<std::size_t>(r - 1);
      const auto cj = static_cast<std::size_t>(c - 1);
      entries.push_back({ri, cj, v});
      if (symmetric && ri != cj) entries.push_back({cj, ri, v});
    }
    if (!have_sizes) throw ParseError(lineno, "missing size line");
    return CsrMatrix::from_triplets(nrows, ncols, std::move(entries));
  }
}

void write_matrix_market(const std::string& path, const CsrMatrix& a) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot open file '" + path + "' for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.nrows() << " " << a.ncols() << " " << a.nnz() << "\n";
  out.precision(17);
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& vv = a.values();
  for (std::size_t r = 0; r < a.nrows(); ++r)
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
      out << r + 1 << " " << ci[k] + 1 << " " << vv[k] << "\n";
}

} // namespace blkorth
