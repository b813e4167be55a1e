#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "dqs/fisher.hpp"
#include "dqs/matrix.hpp"

namespace dqs::protocol {

inline constexpr int kNodeCount = 4;
inline constexpr int kPairCount = 4;     // node pairs 12, 23, 34, 41
inline constexpr int kOutcomeCount = 4;  // joint signs ++, +-, -+, --
inline constexpr int kChannelCount = kPairCount * kOutcomeCount;

/// Pair labels in wire order. Pair p couples nodes pair_nodes(p).
inline constexpr std::array<const char*, kPairCount> kPairNames = {"12", "23", "34", "41"};
inline constexpr std::array<const char*, kOutcomeCount> kOutcomeNames = {"pp", "pm", "mp", "mm"};

constexpr std::pair<int, int> pair_nodes(int pair) {
  constexpr std::array<std::pair<int, int>, kPairCount> nodes = {
      {{0, 1}, {1, 2}, {2, 3}, {3, 0}}};
  return nodes[pair];
}

/// +1 for correlated outcomes (pp, mm), -1 for anticorrelated (pm, mp).
constexpr int outcome_sign(int outcome) { return (outcome == 0 || outcome == 3) ? +1 : -1; }

constexpr int channel_index(int pair, int outcome) { return pair * kOutcomeCount + outcome; }

/// Interference visibilities, one per (pair, outcome) channel.
struct Visibilities {
  std::array<double, kChannelCount> values{};

  static Visibilities shared(double v);
  double operator()(int pair, int outcome) const { return values[channel_index(pair, outcome)]; }
  double& operator()(int pair, int outcome) { return values[channel_index(pair, outcome)]; }
};

struct ProtocolConfig {
  std::array<double, kNodeCount> phases{};  // radians
  Visibilities visibilities = Visibilities::shared(1.0);
  std::uint64_t events = 0;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidInput
};

/// The 16 coincidence probabilities at the configured phases, ordered
/// pair-major then outcome (pp, pm, mp, mm). Each is
/// (1 +/- V cos(phi_mu + phi_nu)) / 16 and the set sums to 1.
std::array<double, kChannelCount> outcome_probabilities(const ProtocolConfig& config);

/// Closed-form Fisher matrix of the coincidence model. Each pair contributes
/// a rank-one block on e_mu + e_nu, so the alternating vector (1,-1,1,-1) is
/// annihilated exactly for every visibility setting. Removable 0/0 limits at
/// unit visibility are evaluated analytically.
SymMatrix analytic_cfim(const ProtocolConfig& config);

/// The same model packaged for the generic Fisher machinery; analytic
/// gradients included unless with_gradient is false.
ProbabilityModel probability_model(const ProtocolConfig& config, bool with_gradient = true);

/// Ideal two-photon state across the four nodes: an even superposition of
/// one Bell pair per adjacent node pair. Generators count the phase-carrying
/// photon at each node.
PureStateModel ideal_state();

/// Aggregated coincidence counts for one phase setting.
struct PhaseSetting {
  std::array<double, kNodeCount> phases{};
  std::array<std::uint64_t, kChannelCount> counts{};

  std::uint64_t total() const;
  std::uint64_t pair_total(int pair) const;
};

/// Simulator/experiment interchange table: counts per (setting, pair,
/// outcome).
struct CountsTable {
  std::vector<PhaseSetting> settings;
};

/// Draws config.events independent coincidence events and aggregates them.
/// Identical configs (including seed) give identical tables.
CountsTable simulate(const ProtocolConfig& config);

/// Scans each phase over [0, pi] on a uniform grid of grid_size points while
/// the others stay at the base value, one setting per grid point; every
/// setting receives config.events events on its own RNG stream.
CountsTable simulate_scan(const ProtocolConfig& base, int grid_size);

/// Least-squares visibility fit per (pair, outcome) channel.
struct FitResult {
  std::array<double, kChannelCount> visibilities{};   // clamped to [0, 1]
  std::array<double, kChannelCount> std_errors{};     // per-fit standard error
  double mean_visibility = 0.0;
  double mean_std_error = 0.0;  // std deviation of the 16 fits over sqrt(16)
  double rss = 0.0;             // total squared frequency residual
};

/// Fits each channel's fringe to f = (1 +/- V cos(phi_mu + phi_nu)) / 16
/// with V the only free parameter. Requires >= 5 distinct pair sums per pair;
/// throws FitDegenerate otherwise.
FitResult fit_visibilities(const CountsTable& scan);

/// Evaluates the closed-form Fisher matrix with the fitted visibilities.
SymMatrix reconstruct_cfim(const FitResult& fit, const std::array<double, kNodeCount>& phases);

struct PhaseEstimate {
  double value = 0.0;  // radians
  bool clamped = false;  // some per-pair contrast exceeded the fitted visibility
};

/// Method-of-moments estimate of the average phase (phi1+...+phi4)/4 from a
/// single-setting counts table: per pair, s = arccos(C / V) with C the
/// signed contrast; the eight appearances of the phases average out to the
/// global mean. Requires weights (1,1,1,1)/4 and every pair sum in (0, pi).
PhaseEstimate estimate_global_phase(const CountsTable& counts,
                                    const std::array<double, kNodeCount>& weights,
                                    double fitted_visibility);

}  // namespace dqs::protocol
