#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "dqs/matrix.hpp"

namespace dqs {

/// Explicit outcome-probability model p(k | phases).
///
/// `prob` must return values in [-1e-12, 1+1e-12] that sum to 1 within 1e-9
/// at every evaluated point. `dprob` is optional; when absent, derivatives
/// are taken by central finite differences.
struct ProbabilityModel {
  int outcome_count = 0;
  int param_dim = 0;
  std::function<double(int outcome, std::span<const double> phases)> prob;
  std::function<double(int outcome, std::span<const double> phases, int param)> dprob;
};

struct CfimOptions {
  double fd_step = 1e-5;       // radians, central differences
  double prob_floor = 1e-12;   // below this an outcome is treated as extinct
  bool force_finite_difference = false;
};

/// Classical Fisher information matrix of the model at the given phases.
///
/// Outcomes with probability below prob_floor contribute nothing when their
/// gradient also vanishes (the 0/0 limit); a sub-floor probability with a
/// gradient above 1e-6 is a divergent term and throws SingularOutcome.
SymMatrix cfim(const ProbabilityModel& model, std::span<const double> phases,
               const CfimOptions& options = {});

struct PureStateTerm {
  std::complex<double> amplitude;
  std::vector<double> generator_values;  // one entry per parameter
};

/// Pure state written in a basis of joint eigenstates of commuting diagonal
/// phase generators: |psi> = sum_t a_t |g_t>, encoding exp(i phi . g).
struct PureStateModel {
  std::vector<PureStateTerm> terms;

  int param_dim() const;
};

/// Quantum Fisher information for PureStateModel: 4 times the covariance of
/// the generator values under the weights |a_t|^2.
SymMatrix qfim_pure(const PureStateModel& state);

struct OrderReport {
  double min_eigenvalue = 0.0;  // of Q - F
  bool ok = false;
};

/// Checks the matrix order F <= Q via the smallest eigenvalue of Q - F,
/// with tolerance -1e-9.
OrderReport verify_cfim_qfim_order(const SymMatrix& f, const SymMatrix& q);

}  // namespace dqs
