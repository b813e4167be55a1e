#include "dqs/fisher.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "dqs/errors.hpp"

namespace dqs {

namespace {

constexpr double kGradientFloor = 1e-6;  // |dp| above this with p ~ 0 diverges
constexpr double kProbBand = 1e-12;      // tolerated excursion outside [0,1]
constexpr double kProbSumTol = 1e-9;

// Evaluates all outcome probabilities, validates the model contract at this
// point, clamps into [0,1].
std::vector<double> evaluate_probabilities(const ProbabilityModel& model,
                                           std::span<const double> phases) {
  std::vector<double> p(model.outcome_count);
  double sum = 0.0;
  for (int k = 0; k < model.outcome_count; ++k) {
    double v = model.prob(k, phases);
    if (!std::isfinite(v)) throw InvalidModel("probability model returned non-finite value");
    if (v < -kProbBand || v > 1.0 + kProbBand)
      throw InvalidModel("probability outside [0,1] band at outcome " + std::to_string(k));
    v = std::min(std::max(v, 0.0), 1.0);
    p[k] = v;
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbSumTol)
    throw InvalidModel("outcome probabilities do not sum to 1");
  return p;
}

}  // namespace

SymMatrix cfim(const ProbabilityModel& model, std::span<const double> phases,
               const CfimOptions& options) {
  if (model.outcome_count < 1 || model.param_dim < 1 || !model.prob)
    throw InvalidModel("cfim: incomplete probability model");
  if (static_cast<int>(phases.size()) != model.param_dim)
    throw InvalidInput("cfim: phase vector has wrong dimension");

  const int m = model.param_dim;
  const bool analytic = static_cast<bool>(model.dprob) && !options.force_finite_difference;
  if (!analytic && !(options.fd_step > 0.0))
    throw InvalidInput("cfim: fd_step must be positive without analytic gradients");

  const std::vector<double> p = evaluate_probabilities(model, phases);

  // grad[k][mu] = dp_k / dphi_mu
  std::vector<std::vector<double>> grad(model.outcome_count, std::vector<double>(m, 0.0));
  if (analytic) {
    for (int k = 0; k < model.outcome_count; ++k)
      for (int mu = 0; mu < m; ++mu) {
        const double g = model.dprob(k, phases, mu);
        if (!std::isfinite(g)) throw InvalidModel("gradient model returned non-finite value");
        grad[k][mu] = g;
      }
  } else {
    std::vector<double> shifted(phases.begin(), phases.end());
    const double h = options.fd_step;
    for (int mu = 0; mu < m; ++mu) {
      shifted[mu] = phases[mu] + h;
      const std::vector<double> up = evaluate_probabilities(model, shifted);
      shifted[mu] = phases[mu] - h;
      const std::vector<double> down = evaluate_probabilities(model, shifted);
      shifted[mu] = phases[mu];
      for (int k = 0; k < model.outcome_count; ++k)
        grad[k][mu] = (up[k] - down[k]) / (2.0 * h);
    }
  }

  SymMatrix f(m);
  for (int k = 0; k < model.outcome_count; ++k) {
    if (p[k] < options.prob_floor) {
      double gmax = 0.0;
      for (int mu = 0; mu < m; ++mu) gmax = std::max(gmax, std::abs(grad[k][mu]));
      if (gmax > kGradientFloor)
        throw SingularOutcome("outcome " + std::to_string(k) +
                              " has vanishing probability but gradient " + std::to_string(gmax));
      continue;  // 0/0 limit contributes nothing
    }
    const double inv = 1.0 / p[k];
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu <= mu; ++nu) f.add(mu, nu, inv * grad[k][mu] * grad[k][nu]);
  }
  return f;
}

int PureStateModel::param_dim() const {
  return terms.empty() ? 0 : static_cast<int>(terms.front().generator_values.size());
}

SymMatrix qfim_pure(const PureStateModel& state) {
  if (state.terms.empty()) throw InvalidModel("qfim_pure: empty state");
  const int m = state.param_dim();
  if (m < 1) throw InvalidModel("qfim_pure: terms carry no generator values");

  double weight_sum = 0.0;
  for (const auto& t : state.terms) {
    if (static_cast<int>(t.generator_values.size()) != m)
      throw InvalidModel("qfim_pure: inconsistent generator dimensions");
    weight_sum += std::norm(t.amplitude);
  }
  if (std::abs(weight_sum - 1.0) > kProbSumTol)
    throw InvalidModel("qfim_pure: state is not normalized");

  std::vector<double> mean(m, 0.0);
  for (const auto& t : state.terms) {
    const double w = std::norm(t.amplitude);
    for (int mu = 0; mu < m; ++mu) mean[mu] += w * t.generator_values[mu];
  }

  SymMatrix q(m);
  for (const auto& t : state.terms) {
    const double w = std::norm(t.amplitude);
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu <= mu; ++nu)
        q.add(mu, nu, 4.0 * w * t.generator_values[mu] * t.generator_values[nu]);
  }
  for (int mu = 0; mu < m; ++mu)
    for (int nu = 0; nu <= mu; ++nu) q.add(mu, nu, -4.0 * mean[mu] * mean[nu]);
  return q;
}

OrderReport verify_cfim_qfim_order(const SymMatrix& f, const SymMatrix& q) {
  if (f.dim() != q.dim()) throw InvalidInput("verify_cfim_qfim_order: dimension mismatch");
  const EigenSystem es = eigensym(q - f, 0.0);
  OrderReport report;
  report.min_eigenvalue = es.eigenvalues.back();
  report.ok = report.min_eigenvalue >= -1e-9;
  return report;
}

}  // namespace dqs
