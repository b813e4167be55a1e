#pragma once

#include <span>
#include <string>
#include <vector>

#include "dqs/matrix.hpp"

namespace dqs {

/// One or more weight vectors, each defining a global linear function of the
/// phases. Vectors must be nonzero (norm > 1e-12) and share one dimension.
struct WeightSet {
  int dim = 0;
  std::vector<std::vector<double>> vectors;

  static WeightSet single(std::vector<double> w);
  WeightSet() = default;
  explicit WeightSet(std::vector<std::vector<double>> vs);
};

/// Result of the privacy quantifier.
///
/// `value` is 1 - min v^T Pi v over unit v orthogonal to every weight
/// vector, with Pi the support projector of the Fisher matrix. 1 means some
/// direction the clients do not target is entirely invisible to the servers;
/// 0 means every such direction is fully resolved.
struct PrivacyReport {
  double value = 0.0;
  std::vector<double> minimizer;        // empty when no orthogonal direction exists
  int support_rank = 0;
  double rank_threshold = 0.0;
  std::vector<bool> per_parameter_hidden;
  std::string reason;                   // set when the weights span everything
};

PrivacyReport privacy_quantifier(const SymMatrix& f, const WeightSet& weights,
                                 double rank_threshold = kAnalyticRankThreshold);

struct ContinuityPoint {
  double eps = 0.0;
  double delta = 0.0;  // |P(F + eps E) - P(F)|
};

struct ContinuityResult {
  std::vector<ContinuityPoint> points;
  bool exact_invariance = false;  // every delta below 1e-14
  bool slope_defined = false;
  double slope = 0.0;             // least-squares slope of log|delta| vs log eps
};

/// Sweeps P over F + eps*perturbation with the numerical rank pinned by the
/// threshold; throws RankInstability if the rank moves anywhere in the sweep.
/// The perturbation must be normalized to unit max-abs entry.
ContinuityResult continuity_probe(const SymMatrix& f, const WeightSet& weights,
                                  const SymMatrix& perturbation,
                                  std::span<const double> eps_list,
                                  double rank_threshold = kAnalyticRankThreshold);

/// |P(O F O^T, Ow) - P(F, w)| for an orthogonal matrix O given as rows.
double invariance_check(const SymMatrix& f, const WeightSet& weights,
                        const std::vector<std::vector<double>>& orthogonal,
                        double rank_threshold = kAnalyticRankThreshold);

struct ParameterExposure {
  bool hidden = false;         // e_mu has a component outside the support
  bool fully_exposed = false;  // e_mu lies in the support entirely
  double kernel_overlap = 0.0; // ||(I - Pi) e_mu||
};

std::vector<ParameterExposure> identifiability_audit(const SymMatrix& f,
                                                     double rank_threshold = kAnalyticRankThreshold);

}  // namespace dqs
