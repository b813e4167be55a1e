#pragma once

#include <span>
#include <vector>

namespace dqs {

/// Relative eigenvalue cutoff for matrices known in closed form.
inline constexpr double kAnalyticRankThreshold = 1e-8;
/// Relative eigenvalue cutoff for matrices reconstructed from noisy data,
/// where the "zero" mode is small but inexact.
inline constexpr double kNoisyRankThreshold = 0.05;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Dense real symmetric matrix. Entries are symmetrized on construction, so
/// (i,j) and (j,i) always compare equal as stored.
class SymMatrix {
 public:
  explicit SymMatrix(int dim);
  SymMatrix(int dim, std::span<const double> row_major);

  static SymMatrix identity(int dim);
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * dim_ + j]; }

  /// Sets both (i,j) and (j,i).
  void set(int i, int j, double value);
  /// Adds to both (i,j) and (j,i); the diagonal is added once.
  void add(int i, int j, double value);

  double max_abs() const;
  bool all_finite() const;

  std::vector<double> apply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;

  std::span<const double> data() const { return entries_; }

 private:
  int dim_;
  std::vector<double> entries_;  // row-major, dim*dim
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double c, const SymMatrix& a);

/// Spectral decomposition of a symmetric matrix.
///
/// Eigenvalues are sorted descending; eigenvectors[i] is the orthonormal
/// eigenvector paired with eigenvalues[i]. Signs follow a fixed convention
/// (largest-magnitude component positive, ties broken by lowest index) so
/// repeated runs produce identical output. `rank` counts eigenvalues above
/// rank_threshold * max(lambda_max, 0); negative eigenvalues never count.
struct EigenSystem {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  int rank = 0;
  double rank_threshold = 0.0;
};

/// Orthonormal set of k <= dim vectors.
struct Basis {
  int dim = 0;
  std::vector<std::vector<double>> vectors;

  int size() const { return static_cast<int>(vectors.size()); }
};

EigenSystem eigensym(const SymMatrix& a, double rank_threshold = kAnalyticRankThreshold);

/// Moore-Penrose pseudoinverse: inverts retained eigenvalues, annihilates the
/// rest. Retention follows the same thresholding as eigensym.
SymMatrix pinv(const SymMatrix& a, double rank_threshold = kAnalyticRankThreshold);

/// Projector onto the span of eigenvectors with retained eigenvalues.
SymMatrix support_projector(const SymMatrix& a, double rank_threshold = kAnalyticRankThreshold);

/// Orthonormal basis of the orthogonal complement of span(vectors), built by
/// Gram-Schmidt over the standard basis in candidate order e1..em. Input rank
/// is decided at relative threshold 1e-10. Empty result when the input spans
/// the whole space.
Basis complement_basis(const std::vector<std::vector<double>>& vectors);

}  // namespace dqs
