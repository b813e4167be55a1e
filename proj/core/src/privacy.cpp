#include "dqs/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "dqs/errors.hpp"

namespace dqs {

namespace {

constexpr double kHiddenTol = 1e-6;
constexpr double kExposedTol = 1e-9;
constexpr double kDeltaFloor = 1e-14;

std::vector<bool> hidden_flags(const SymMatrix& projector) {
  const int m = projector.dim();
  std::vector<bool> hidden(m);
  for (int mu = 0; mu < m; ++mu) {
    std::vector<double> e(m, 0.0);
    e[mu] = 1.0;
    const std::vector<double> pe = projector.apply(e);
    double n2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = e[i] - pe[i];
      n2 += d * d;
    }
    hidden[mu] = std::sqrt(n2) > kHiddenTol;
  }
  return hidden;
}

}  // namespace

WeightSet WeightSet::single(std::vector<double> w) {
  return WeightSet(std::vector<std::vector<double>>{std::move(w)});
}

WeightSet::WeightSet(std::vector<std::vector<double>> vs) : vectors(std::move(vs)) {
  if (vectors.empty()) throw InvalidInput("WeightSet: at least one weight vector required");
  dim = static_cast<int>(vectors.front().size());
  if (dim < 1) throw InvalidInput("WeightSet: zero-dimensional weight");
  for (const auto& w : vectors) {
    if (static_cast<int>(w.size()) != dim)
      throw InvalidInput("WeightSet: inconsistent dimensions");
    if (!(norm(w) > 1e-12)) throw InvalidInput("WeightSet: weight vector is (near) zero");
  }
}

PrivacyReport privacy_quantifier(const SymMatrix& f, const WeightSet& weights,
                                 double rank_threshold) {
  if (f.dim() != weights.dim)
    throw InvalidInput("privacy_quantifier: matrix/weight dimension mismatch");
  const int m = f.dim();

  const EigenSystem es = eigensym(f, rank_threshold);
  const SymMatrix projector = support_projector(f, rank_threshold);

  PrivacyReport report;
  report.support_rank = es.rank;
  report.rank_threshold = rank_threshold;
  report.per_parameter_hidden = hidden_flags(projector);

  const Basis complement = complement_basis(weights.vectors);
  if (complement.size() == 0) {
    report.value = 0.0;
    report.reason = "no orthogonal directions exist";
    return report;
  }

  // Restrict the projector to the complement; the constrained minimum of
  // v^T Pi v over the unit sphere is the smallest eigenvalue of B^T Pi B.
  const int k = complement.size();
  SymMatrix restricted(k);
  std::vector<std::vector<double>> projected(k);
  for (int a = 0; a < k; ++a) projected[a] = projector.apply(complement.vectors[a]);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b <= a; ++b)
      restricted.set(a, b, dot(complement.vectors[a], projected[b]));

  const EigenSystem res = eigensym(restricted, 0.0);
  const double lambda_min = res.eigenvalues.back();
  report.value = std::clamp(1.0 - lambda_min, 0.0, 1.0);

  const auto& u = res.eigenvectors.back();
  report.minimizer.assign(m, 0.0);
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < m; ++i) report.minimizer[i] += u[a] * complement.vectors[a][i];
  return report;
}

ContinuityResult continuity_probe(const SymMatrix& f, const WeightSet& weights,
                                  const SymMatrix& perturbation,
                                  std::span<const double> eps_list,
                                  double rank_threshold) {
  if (f.dim() != perturbation.dim())
    throw InvalidInput("continuity_probe: perturbation dimension mismatch");
  if (std::abs(perturbation.max_abs() - 1.0) > 1e-9)
    throw InvalidInput("continuity_probe: perturbation must have unit max-abs entry");
  for (double eps : eps_list)
    if (!(eps >= 0.0 && eps <= 0.1))
      throw InvalidInput("continuity_probe: eps values must lie in [0, 0.1]");

  const PrivacyReport base = privacy_quantifier(f, weights, rank_threshold);
  const int base_rank = eigensym(f, rank_threshold).rank;

  ContinuityResult result;
  for (double eps : eps_list) {
    const SymMatrix fp = f + eps * perturbation;
    if (eigensym(fp, rank_threshold).rank != base_rank)
      throw RankInstability("continuity_probe: numerical rank changed at eps = " +
                            std::to_string(eps));
    const PrivacyReport p = privacy_quantifier(fp, weights, rank_threshold);
    result.points.push_back({eps, std::abs(p.value - base.value)});
  }

  // Log-log slope over points that moved measurably.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& pt : result.points) {
    if (pt.eps <= 0.0 || pt.delta <= kDeltaFloor) continue;
    const double x = std::log(pt.eps);
    const double y = std::log(pt.delta);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n == 0) {
    result.exact_invariance = true;
  } else if (n >= 2) {
    const double denom = n * sxx - sx * sx;
    if (denom > 0.0) {
      result.slope = (n * sxy - sx * sy) / denom;
      result.slope_defined = true;
    }
  }
  return result;
}

double invariance_check(const SymMatrix& f, const WeightSet& weights,
                        const std::vector<std::vector<double>>& orthogonal,
                        double rank_threshold) {
  const int m = f.dim();
  if (static_cast<int>(orthogonal.size()) != m)
    throw InvalidInput("invariance_check: O has wrong dimension");
  for (const auto& row : orthogonal)
    if (static_cast<int>(row.size()) != m)
      throw InvalidInput("invariance_check: O has ragged rows");

  // O^T O = I within 1e-9
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int r = 0; r < m; ++r) s += orthogonal[r][i] * orthogonal[r][j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-9)
        throw InvalidInput("invariance_check: matrix is not orthogonal");
    }

  // F' = O F O^T, w' = O w
  SymMatrix rotated(m);
  for (int i = 0; i < m; ++i) {
    const std::vector<double> fo = f.apply(orthogonal[i]);
    for (int j = 0; j <= i; ++j) rotated.set(i, j, dot(orthogonal[j], fo));
  }
  std::vector<std::vector<double>> rotated_weights;
  rotated_weights.reserve(weights.vectors.size());
  for (const auto& w : weights.vectors) {
    std::vector<double> rw(m, 0.0);
    for (int i = 0; i < m; ++i) rw[i] = dot(orthogonal[i], w);
    rotated_weights.push_back(std::move(rw));
  }

  const double p0 = privacy_quantifier(f, weights, rank_threshold).value;
  const double p1 =
      privacy_quantifier(rotated, WeightSet(rotated_weights), rank_threshold).value;
  return std::abs(p1 - p0);
}

std::vector<ParameterExposure> identifiability_audit(const SymMatrix& f,
                                                     double rank_threshold) {
  const SymMatrix projector = support_projector(f, rank_threshold);
  const int m = f.dim();
  std::vector<ParameterExposure> audit(m);
  for (int mu = 0; mu < m; ++mu) {
    std::vector<double> e(m, 0.0);
    e[mu] = 1.0;
    const std::vector<double> pe = projector.apply(e);
    double n2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = e[i] - pe[i];
      n2 += d * d;
    }
    const double overlap = std::sqrt(n2);
    audit[mu].kernel_overlap = overlap;
    audit[mu].hidden = overlap > kHiddenTol;
    audit[mu].fully_exposed = overlap <= kExposedTol;
  }
  return audit;
}

}  // namespace dqs
