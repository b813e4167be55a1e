#include "dqs/matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "dqs/errors.hpp"

namespace dqs {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SymMatrix::SymMatrix(int dim) : dim_(dim) {
  if (dim < 1) throw InvalidMatrix("SymMatrix: dim must be >= 1");
  entries_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
}

SymMatrix::SymMatrix(int dim, std::span<const double> row_major) : SymMatrix(dim) {
  if (row_major.size() != entries_.size())
    throw InvalidMatrix("SymMatrix: entry count does not match dim*dim");
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = 0.5 * (row_major[static_cast<std::size_t>(i) * dim_ + j] +
                              row_major[static_cast<std::size_t>(j) * dim_ + i]);
      set(i, j, v);
    }
  }
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int dim = static_cast<int>(rows.size());
  if (dim < 1) throw InvalidMatrix("SymMatrix: dim must be >= 1");
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(dim) * dim);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim) throw InvalidMatrix("SymMatrix: ragged rows");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return SymMatrix(dim, flat);
}

void SymMatrix::set(int i, int j, double value) {
  entries_[static_cast<std::size_t>(i) * dim_ + j] = value;
  entries_[static_cast<std::size_t>(j) * dim_ + i] = value;
}

void SymMatrix::add(int i, int j, double value) {
  set(i, j, (*this)(i, j) + value);
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, std::abs(v));
  return m;
}

bool SymMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::vector<double> SymMatrix::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw InvalidInput("apply: size mismatch");
  std::vector<double> y(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double SymMatrix::quadratic_form(std::span<const double> x) const {
  return dot(apply(x), x);
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("matrix +: dim mismatch");
  SymMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j <= i; ++j) r.set(i, j, a(i, j) + b(i, j));
  return r;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("matrix -: dim mismatch");
  SymMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j <= i; ++j) r.set(i, j, a(i, j) - b(i, j));
  return r;
}

SymMatrix operator*(double c, const SymMatrix& a) {
  SymMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j <= i; ++j) r.set(i, j, c * a(i, j));
  return r;
}

namespace {

void validate_spectral_input(const SymMatrix& a, double rank_threshold) {
  if (!a.all_finite()) throw InvalidMatrix("eigensym: non-finite entries");
  if (!(rank_threshold >= 0.0 && rank_threshold < 1.0))
    throw InvalidInput("eigensym: rank_threshold must be in [0, 1)");
}

// Fixed sign convention: the largest-magnitude component of each eigenvector
// is positive; ties go to the lowest index.
void canonicalize_sign(std::vector<double>& v) {
  std::size_t pivot = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;
  if (v[pivot] < 0.0)
    for (double& x : v) x = -x;
}

}  // namespace

EigenSystem eigensym(const SymMatrix& a, double rank_threshold) {
  validate_spectral_input(a, rank_threshold);
  const int m = a.dim();

  Eigen::MatrixXd mat(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) mat(i, j) = a(i, j);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat);
  if (solver.info() != Eigen::Success)
    throw InvalidMatrix("eigensym: eigensolver failed to converge");

  EigenSystem out;
  out.rank_threshold = rank_threshold;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(m);
  // Eigen sorts ascending; flip to descending.
  for (int k = 0; k < m; ++k) {
    const int src = m - 1 - k;
    out.eigenvalues[k] = solver.eigenvalues()(src);
    auto& v = out.eigenvectors[k];
    v.resize(m);
    for (int i = 0; i < m; ++i) v[i] = solver.eigenvectors()(i, src);
    canonicalize_sign(v);
  }

  const double cutoff = rank_threshold * std::max(out.eigenvalues.front(), 0.0);
  out.rank = static_cast<int>(std::count_if(out.eigenvalues.begin(), out.eigenvalues.end(),
                                            [cutoff](double l) { return l > cutoff; }));
  return out;
}

SymMatrix pinv(const SymMatrix& a, double rank_threshold) {
  const EigenSystem es = eigensym(a, rank_threshold);
  SymMatrix r(a.dim());
  for (int k = 0; k < es.rank; ++k) {
    const auto& v = es.eigenvectors[k];
    const double inv = 1.0 / es.eigenvalues[k];
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j <= i; ++j) r.add(i, j, inv * v[i] * v[j]);
  }
  return r;
}

SymMatrix support_projector(const SymMatrix& a, double rank_threshold) {
  const EigenSystem es = eigensym(a, rank_threshold);
  SymMatrix r(a.dim());
  for (int k = 0; k < es.rank; ++k) {
    const auto& v = es.eigenvectors[k];
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j <= i; ++j) r.add(i, j, v[i] * v[j]);
  }
  return r;
}

namespace {

// Residual of x against the orthonormal set, two Gram-Schmidt passes.
std::vector<double> orthogonal_residual(std::span<const double> x,
                                        const std::vector<std::vector<double>>& basis) {
  std::vector<double> r(x.begin(), x.end());
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const double c = dot(r, q);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * q[i];
    }
  }
  return r;
}

}  // namespace

Basis complement_basis(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) throw InvalidInput("complement_basis: no input vectors");
  const int m = static_cast<int>(vectors.front().size());
  if (m < 1) throw InvalidInput("complement_basis: zero-dimensional input");

  double max_norm = 0.0;
  for (const auto& w : vectors) {
    if (static_cast<int>(w.size()) != m)
      throw InvalidInput("complement_basis: inconsistent dimensions");
    max_norm = std::max(max_norm, norm(w));
  }
  if (max_norm == 0.0) throw InvalidInput("complement_basis: all input vectors are zero");

  // Orthonormal basis of the input span; rank at relative threshold 1e-10.
  std::vector<std::vector<double>> span_basis;
  const double span_cutoff = 1e-10 * max_norm;
  for (const auto& w : vectors) {
    auto r = orthogonal_residual(w, span_basis);
    const double n = norm(r);
    if (n > span_cutoff) {
      for (double& x : r) x /= n;
      span_basis.push_back(std::move(r));
    }
  }

  // Extend over e1..em; anything left orthogonal to the span is kept.
  Basis out;
  out.dim = m;
  std::vector<std::vector<double>> accumulated = span_basis;
  for (int c = 0; c < m; ++c) {
    std::vector<double> e(m, 0.0);
    e[c] = 1.0;
    auto r = orthogonal_residual(e, accumulated);
    const double n = norm(r);
    if (n > 1e-8) {
      for (double& x : r) x /= n;
      accumulated.push_back(r);
      out.vectors.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace dqs
