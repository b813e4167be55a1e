#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dqs/matrix.hpp"
#include "dqs/privacy.hpp"

namespace dqs {

/// Pseudoinverse Cramer-Rao bound w^T F+ w for one weight vector, per probe
/// event.
double crb_scalar(const SymMatrix& f, std::span<const double> w,
                  double rank_threshold = kAnalyticRankThreshold);

/// Tr(W F+) with W = sum_j w_j w_j^T, the total-variance bound for
/// estimating every weighted function simultaneously.
double crb_trace(const SymMatrix& f, const WeightSet& weights,
                 double rank_threshold = kAnalyticRankThreshold);

/// True when w lies in the support of the matrix (relative tolerance 1e-6),
/// i.e. the pseudoinverse bound is attainable for this weight.
bool saturable(const SymMatrix& q_or_f, std::span<const double> w,
               double rank_threshold = kAnalyticRankThreshold);

struct ScalarBound {
  double f_bound = 0.0;
  std::optional<double> q_bound;
  bool saturable = false;
};

struct BoundReport {
  std::vector<ScalarBound> scalar_bounds;  // one per weight vector
  double trace_f = 0.0;
  std::optional<double> trace_q;
  std::vector<std::string> warnings;
};

/// Assembles the full report. Bounds are divided by `events` (>= 1) to turn
/// per-event bounds into bounds for a budget of repeated probes. A weight
/// with a component outside the support gets a warning, not an error.
BoundReport bound_report(const SymMatrix& f, const std::optional<SymMatrix>& q,
                         const WeightSet& weights, double rank_threshold,
                         std::uint64_t events = 1);

}  // namespace dqs
