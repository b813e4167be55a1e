#include "dqs/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "dqs/errors.hpp"
#include "dqs/rng.hpp"

namespace dqs::protocol {

namespace {

double pair_sum(const std::array<double, kNodeCount>& phases, int pair) {
  const auto [mu, nu] = pair_nodes(pair);
  return phases[mu] + phases[nu];
}

double channel_probability(double visibility, int sign, double s) {
  return (1.0 + sign * visibility * std::cos(s)) / 16.0;
}

// d/ds of the channel probability.
double channel_probability_dds(double visibility, int sign, double s) {
  return -sign * visibility * std::sin(s) / 16.0;
}

// Fisher weight (dp/ds)^2 / p of one channel as a function of the pair sum.
// At V = 1 the vanishing-probability point is a removable 0/0 limit; the
// factored form (1 -/+ cos s)/16 is exact there and everywhere else.
double channel_fisher_weight(double visibility, int sign, double s) {
  if (visibility == 0.0) return 0.0;
  const double c = std::cos(s);
  if (visibility == 1.0) return (1.0 - sign * c) / 16.0;
  const double sin2 = std::sin(s) * std::sin(s);
  return visibility * visibility * sin2 / (16.0 * (1.0 + sign * visibility * c));
}

}  // namespace

Visibilities Visibilities::shared(double v) {
  Visibilities out;
  out.values.fill(v);
  return out;
}

void ProtocolConfig::validate() const {
  for (double phi : phases)
    if (!std::isfinite(phi)) throw InvalidInput("ProtocolConfig: non-finite phase");
  for (double v : visibilities.values)
    if (!(v >= 0.0 && v <= 1.0))
      throw InvalidInput("ProtocolConfig: visibilities must lie in [0, 1]");
}

std::array<double, kChannelCount> outcome_probabilities(const ProtocolConfig& config) {
  config.validate();
  std::array<double, kChannelCount> p{};
  for (int pair = 0; pair < kPairCount; ++pair) {
    const double s = pair_sum(config.phases, pair);
    for (int outcome = 0; outcome < kOutcomeCount; ++outcome)
      p[channel_index(pair, outcome)] =
          channel_probability(config.visibilities(pair, outcome), outcome_sign(outcome), s);
  }
  return p;
}

SymMatrix analytic_cfim(const ProtocolConfig& config) {
  config.validate();
  SymMatrix f(kNodeCount);
  for (int pair = 0; pair < kPairCount; ++pair) {
    const double s = pair_sum(config.phases, pair);
    double weight = 0.0;
    for (int outcome = 0; outcome < kOutcomeCount; ++outcome)
      weight += channel_fisher_weight(config.visibilities(pair, outcome),
                                      outcome_sign(outcome), s);
    const auto [mu, nu] = pair_nodes(pair);
    f.add(mu, mu, weight);
    f.add(nu, nu, weight);
    f.add(mu, nu, weight);
  }
  return f;
}

ProbabilityModel probability_model(const ProtocolConfig& config, bool with_gradient) {
  config.validate();
  const Visibilities vis = config.visibilities;

  ProbabilityModel model;
  model.outcome_count = kChannelCount;
  model.param_dim = kNodeCount;
  model.prob = [vis](int k, std::span<const double> phases) {
    const int pair = k / kOutcomeCount;
    const int outcome = k % kOutcomeCount;
    const auto [mu, nu] = pair_nodes(pair);
    return channel_probability(vis(pair, outcome), outcome_sign(outcome),
                               phases[mu] + phases[nu]);
  };
  if (with_gradient) {
    model.dprob = [vis](int k, std::span<const double> phases, int param) {
      const int pair = k / kOutcomeCount;
      const int outcome = k % kOutcomeCount;
      const auto [mu, nu] = pair_nodes(pair);
      if (param != mu && param != nu) return 0.0;
      return channel_probability_dds(vis(pair, outcome), outcome_sign(outcome),
                                     phases[mu] + phases[nu]);
    };
  }
  return model;
}

PureStateModel ideal_state() {
  // One Bell pair per adjacent node pair, all in even superposition: eight
  // basis terms of amplitude 1/sqrt(8). The phase-carrying component of pair
  // (mu, nu) accumulates phi_mu + phi_nu, so its generator is e_mu + e_nu;
  // the other component is phase-blind.
  PureStateModel state;
  const double amp = 1.0 / std::sqrt(8.0);
  for (int pair = 0; pair < kPairCount; ++pair) {
    const auto [mu, nu] = pair_nodes(pair);
    std::vector<double> carrier(kNodeCount, 0.0);
    carrier[mu] = 1.0;
    carrier[nu] = 1.0;
    state.terms.push_back({amp, std::move(carrier)});
    state.terms.push_back({amp, std::vector<double>(kNodeCount, 0.0)});
  }
  return state;
}

std::uint64_t PhaseSetting::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::uint64_t PhaseSetting::pair_total(int pair) const {
  std::uint64_t t = 0;
  for (int outcome = 0; outcome < kOutcomeCount; ++outcome)
    t += counts[channel_index(pair, outcome)];
  return t;
}

namespace {

PhaseSetting sample_setting(const ProtocolConfig& config, std::uint64_t stream_index) {
  const std::array<double, kChannelCount> p = outcome_probabilities(config);
  std::array<double, kChannelCount> cdf{};
  double acc = 0.0;
  for (int k = 0; k < kChannelCount; ++k) {
    acc += p[k];
    cdf[k] = acc;
  }
  cdf[kChannelCount - 1] = 1.0;  // absorb rounding in the last bin

  PhaseSetting setting;
  setting.phases = config.phases;
  std::mt19937_64 engine = make_stream(config.seed, stream_index);
  for (std::uint64_t e = 0; e < config.events; ++e) {
    const double u = uniform01(engine);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int k = static_cast<int>(it - cdf.begin());
    ++setting.counts[std::min(k, kChannelCount - 1)];
  }
  return setting;
}

}  // namespace

CountsTable simulate(const ProtocolConfig& config) {
  config.validate();
  CountsTable table;
  table.settings.push_back(sample_setting(config, 0));
  return table;
}

CountsTable simulate_scan(const ProtocolConfig& base, int grid_size) {
  base.validate();
  if (grid_size < 2) throw InvalidInput("simulate_scan: grid_size must be >= 2");

  CountsTable table;
  std::uint64_t stream = 0;
  for (int node = 0; node < kNodeCount; ++node) {
    for (int k = 0; k < grid_size; ++k) {
      ProtocolConfig point = base;
      point.phases[node] = std::numbers::pi * k / (grid_size - 1);
      table.settings.push_back(sample_setting(point, stream++));
    }
  }
  return table;
}

FitResult fit_visibilities(const CountsTable& scan) {
  // Data points per channel: (pair sum, frequency). Settings without events
  // carry no frequency information and are skipped.
  struct Point {
    double s;
    double freq;
  };
  std::array<std::vector<Point>, kChannelCount> data;
  std::array<std::set<double>, kPairCount> distinct_sums;
  for (const auto& setting : scan.settings) {
    const std::uint64_t total = setting.total();
    if (total == 0) continue;
    for (int pair = 0; pair < kPairCount; ++pair) {
      const double s = pair_sum(setting.phases, pair);
      distinct_sums[pair].insert(s);
      for (int outcome = 0; outcome < kOutcomeCount; ++outcome) {
        const int k = channel_index(pair, outcome);
        data[k].push_back({s, static_cast<double>(setting.counts[k]) /
                                  static_cast<double>(total)});
      }
    }
  }

  for (int pair = 0; pair < kPairCount; ++pair) {
    if (distinct_sums[pair].size() < 5)
      throw FitDegenerate(std::string("fit_visibilities: pair ") + kPairNames[pair] +
                          " has fewer than 5 distinct phase sums");
  }

  FitResult fit;
  double rss = 0.0;
  for (int pair = 0; pair < kPairCount; ++pair) {
    for (int outcome = 0; outcome < kOutcomeCount; ++outcome) {
      const int k = channel_index(pair, outcome);
      const int sign = outcome_sign(outcome);
      // Linear least squares: 16 f - 1 = V * (sign cos s).
      double stt = 0.0, sty = 0.0;
      for (const auto& pt : data[k]) {
        const double t = sign * std::cos(pt.s);
        const double y = 16.0 * pt.freq - 1.0;
        stt += t * t;
        sty += t * y;
      }
      if (!(stt > 1e-12))
        throw FitDegenerate("fit_visibilities: phase sums carry no fringe contrast");
      const double v_raw = sty / stt;
      const double v = std::clamp(v_raw, 0.0, 1.0);
      fit.visibilities[k] = v;

      double res2 = 0.0;
      for (const auto& pt : data[k]) {
        const double model = channel_probability(v, sign, pt.s);
        const double r = pt.freq - model;
        res2 += r * r;
      }
      rss += res2;
      const auto n = static_cast<double>(data[k].size());
      if (n > 1.5) {
        // Residual variance of the unclamped linear fit, in y units.
        double yres2 = 0.0;
        for (const auto& pt : data[k]) {
          const double t = sign * std::cos(pt.s);
          const double y = 16.0 * pt.freq - 1.0;
          const double r = y - v_raw * t;
          yres2 += r * r;
        }
        fit.std_errors[k] = std::sqrt(yres2 / (n - 1.0) / stt);
      }
    }
  }
  fit.rss = rss;

  double mean = 0.0;
  for (double v : fit.visibilities) mean += v;
  mean /= kChannelCount;
  fit.mean_visibility = mean;
  double var = 0.0;
  for (double v : fit.visibilities) var += (v - mean) * (v - mean);
  var /= (kChannelCount - 1);
  fit.mean_std_error = std::sqrt(var / kChannelCount);
  return fit;
}

SymMatrix reconstruct_cfim(const FitResult& fit, const std::array<double, kNodeCount>& phases) {
  ProtocolConfig config;
  config.phases = phases;
  config.visibilities.values = fit.visibilities;
  return analytic_cfim(config);
}

PhaseEstimate estimate_global_phase(const CountsTable& counts,
                                    const std::array<double, kNodeCount>& weights,
                                    double fitted_visibility) {
  for (double w : weights)
    if (std::abs(w - 0.25) > 1e-12)
      throw InvalidInput("estimate_global_phase: only the uniform average weight "
                         "(1,1,1,1)/4 is supported");
  if (counts.settings.size() != 1)
    throw InvalidInput("estimate_global_phase: counts must come from a single phase setting");
  if (!(fitted_visibility > 0.0 && fitted_visibility <= 1.0))
    throw InvalidInput("estimate_global_phase: visibility must lie in (0, 1]");

  const PhaseSetting& setting = counts.settings.front();
  for (int pair = 0; pair < kPairCount; ++pair) {
    const double s = pair_sum(setting.phases, pair);
    if (!(s > 0.0 && s < std::numbers::pi))
      throw InvalidInput(std::string("estimate_global_phase: pair sum for pair ") +
                         kPairNames[pair] + " must lie in (0, pi)");
  }

  PhaseEstimate estimate;
  double sum = 0.0;
  for (int pair = 0; pair < kPairCount; ++pair) {
    const std::uint64_t n = setting.pair_total(pair);
    if (n == 0)
      throw InsufficientData(std::string("estimate_global_phase: no counts for pair ") +
                             kPairNames[pair]);
    double contrast = 0.0;
    for (int outcome = 0; outcome < kOutcomeCount; ++outcome)
      contrast += outcome_sign(outcome) *
                  static_cast<double>(setting.counts[channel_index(pair, outcome)]);
    contrast /= static_cast<double>(n);

    double x = contrast / fitted_visibility;
    if (x > 1.0 || x < -1.0) {
      x = std::clamp(x, -1.0, 1.0);
      estimate.clamped = true;
    }
    sum += std::acos(x);
  }
  // Each phase enters exactly two pair sums, so the four arccos estimates
  // total 2 * (phi1 + ... + phi4).
  estimate.value = sum / 8.0;
  return estimate;
}

}  // namespace dqs::protocol
