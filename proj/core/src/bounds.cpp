#include "dqs/bounds.hpp"

#include <cmath>
#include <string>

#include "dqs/errors.hpp"

namespace dqs {

namespace {
constexpr double kSupportTol = 1e-6;
}

double crb_scalar(const SymMatrix& f, std::span<const double> w, double rank_threshold) {
  if (static_cast<int>(w.size()) != f.dim())
    throw InvalidInput("crb_scalar: weight dimension mismatch");
  if (!(norm(w) > 0.0)) throw InvalidInput("crb_scalar: zero weight vector");
  return pinv(f, rank_threshold).quadratic_form(w);
}

double crb_trace(const SymMatrix& f, const WeightSet& weights, double rank_threshold) {
  if (weights.dim != f.dim()) throw InvalidInput("crb_trace: weight dimension mismatch");
  const SymMatrix fp = pinv(f, rank_threshold);
  double total = 0.0;
  for (const auto& w : weights.vectors) total += fp.quadratic_form(w);
  return total;
}

bool saturable(const SymMatrix& q_or_f, std::span<const double> w, double rank_threshold) {
  if (static_cast<int>(w.size()) != q_or_f.dim())
    throw InvalidInput("saturable: weight dimension mismatch");
  const double wn = norm(w);
  if (!(wn > 0.0)) throw InvalidInput("saturable: zero weight vector");
  const SymMatrix projector = support_projector(q_or_f, rank_threshold);
  const std::vector<double> pw = projector.apply(w);
  double n2 = 0.0;
  for (int i = 0; i < q_or_f.dim(); ++i) {
    const double d = w[i] - pw[i];
    n2 += d * d;
  }
  return std::sqrt(n2) <= kSupportTol * wn;
}

BoundReport bound_report(const SymMatrix& f, const std::optional<SymMatrix>& q,
                         const WeightSet& weights, double rank_threshold,
                         std::uint64_t events) {
  if (weights.dim != f.dim()) throw InvalidInput("bound_report: weight dimension mismatch");
  if (q && q->dim() != f.dim()) throw InvalidInput("bound_report: Q dimension mismatch");
  if (events == 0) throw InvalidInput("bound_report: events must be >= 1");
  const double scale = 1.0 / static_cast<double>(events);

  const SymMatrix f_pinv = pinv(f, rank_threshold);
  std::optional<SymMatrix> q_pinv;
  if (q) q_pinv = pinv(*q, rank_threshold);

  BoundReport report;
  report.trace_f = 0.0;
  if (q) report.trace_q = 0.0;
  for (std::size_t j = 0; j < weights.vectors.size(); ++j) {
    const auto& w = weights.vectors[j];
    ScalarBound sb;
    sb.f_bound = scale * f_pinv.quadratic_form(w);
    report.trace_f += sb.f_bound;
    if (q_pinv) {
      sb.q_bound = scale * q_pinv->quadratic_form(w);
      *report.trace_q += *sb.q_bound;
    }
    sb.saturable = saturable(f, w, rank_threshold);
    if (!sb.saturable)
      report.warnings.push_back("weight " + std::to_string(j) +
                                " has a component outside the support; the bound is "
                                "not attainable by any estimator");
    report.scalar_bounds.push_back(sb);
  }
  return report;
}

}  // namespace dqs
