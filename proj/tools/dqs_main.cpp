// dqs: command-line front end for the distributed-sensing privacy library.
//
// Exit codes: 0 success (privacy certified where applicable), 1 privacy gate
// failed, 2 usage or malformed input, 3 unusable data (degenerate fit,
// missing counts).

#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dqs/bounds.hpp"
#include "dqs/errors.hpp"
#include "dqs/io.hpp"
#include "dqs/matrix.hpp"
#include "dqs/privacy.hpp"
#include "dqs/protocol.hpp"
#include "dqs/version.hpp"

namespace {

namespace fs = std::filesystem;
using dqs::io::RunManifest;

constexpr int kExitOk = 0;
constexpr int kExitNotPrivate = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBadData = 3;

std::array<double, 4> parse_phase_quad(const std::string& csv) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw dqs::InvalidInput("cannot parse '" + tok + "' as a phase in radians");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.size() != 4) throw dqs::InvalidInput("expected 4 comma-separated phases");
  return {values[0], values[1], values[2], values[3]};
}

std::vector<double> parse_vector(const std::string& csv) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw dqs::InvalidInput("cannot parse '" + tok + "' as a number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

dqs::WeightSet parse_weights(const std::vector<std::string>& specs) {
  std::vector<std::vector<double>> vectors;
  vectors.reserve(specs.size());
  for (const auto& s : specs) vectors.push_back(parse_vector(s));
  return dqs::WeightSet(std::move(vectors));
}

std::string phases_fragment(const std::array<double, 4>& phases) {
  std::string out = "[";
  for (int i = 0; i < 4; ++i) {
    if (i) out += ',';
    out += dqs::io::json_number(phases[i]);
  }
  out += ']';
  return out;
}

void write_with_digest(RunManifest& manifest, const fs::path& path, const std::string& content) {
  dqs::io::write_file(path, content);
  manifest.outputs.emplace_back(path.filename().string(), dqs::io::digest(content));
}

struct SimulateArgs {
  std::string phases_csv;
  int scan = 0;
  double visibility = 1.0;
  std::string visibilities_file;
  std::uint64_t events = 0;
  std::uint64_t seed = 0;
  std::string out = "counts.csv";
};

int run_simulate(const SimulateArgs& args) {
  dqs::protocol::ProtocolConfig config;
  if (!args.phases_csv.empty()) config.phases = parse_phase_quad(args.phases_csv);
  config.events = args.events;
  config.seed = args.seed;
  if (!args.visibilities_file.empty())
    config.visibilities =
        dqs::io::parse_visibilities_json(dqs::io::read_file(args.visibilities_file));
  else
    config.visibilities = dqs::protocol::Visibilities::shared(args.visibility);

  if (args.scan == 0 && args.phases_csv.empty())
    throw dqs::InvalidInput("either --phases or --scan is required");

  const dqs::protocol::CountsTable table =
      args.scan > 0 ? dqs::protocol::simulate_scan(config, args.scan)
                    : dqs::protocol::simulate(config);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.tool_version = std::string(dqs::kVersion);
  manifest.seed = args.seed;
  manifest.config.emplace_back("phases", phases_fragment(config.phases));
  manifest.config.emplace_back("scan", std::to_string(args.scan));
  manifest.config.emplace_back("events", std::to_string(args.events));
  std::string vis_values = "[";
  for (int k = 0; k < dqs::protocol::kChannelCount; ++k) {
    if (k) vis_values += ',';
    vis_values += dqs::io::json_number(config.visibilities.values[k]);
  }
  vis_values += ']';
  manifest.config.emplace_back("visibilities", vis_values);

  const fs::path out_path(args.out);
  write_with_digest(manifest, out_path, dqs::io::counts_csv(table));
  dqs::io::write_file(out_path.string() + ".manifest.json", dqs::io::manifest_json(manifest));
  std::cout << "wrote " << out_path.string() << " (" << table.settings.size()
            << " phase settings)\n";
  return kExitOk;
}

struct ReconstructArgs {
  std::string counts;
  std::string phases_csv;
  std::string out = "reconstructed";
};

int run_reconstruct(const ReconstructArgs& args) {
  const std::string counts_text = dqs::io::read_file(args.counts);
  const auto table = dqs::io::parse_counts_csv(counts_text);
  const auto fit = dqs::protocol::fit_visibilities(table);
  const auto phases = parse_phase_quad(args.phases_csv);
  const dqs::SymMatrix cfim = dqs::protocol::reconstruct_cfim(fit, phases);

  RunManifest manifest;
  manifest.command = "reconstruct";
  manifest.tool_version = std::string(dqs::kVersion);
  // inputs are recorded by name and content, so reruns in other directories
  // still compare byte-identical
  manifest.config.emplace_back("counts",
                               dqs::io::json_string(fs::path(args.counts).filename().string()));
  manifest.config.emplace_back("counts_digest",
                               dqs::io::json_string(dqs::io::digest(counts_text)));
  manifest.config.emplace_back("phases", phases_fragment(phases));

  write_with_digest(manifest, args.out + ".fit.json", dqs::io::fit_result_json(fit));
  write_with_digest(manifest, args.out + ".cfim.json", dqs::io::matrix_json(cfim));
  dqs::io::write_file(args.out + ".manifest.json", dqs::io::manifest_json(manifest));
  std::cout << "mean fitted visibility " << fit.mean_visibility << "\n";
  return kExitOk;
}

struct PrivacyArgs {
  std::string matrix;
  std::vector<std::string> weights;
  double rank_threshold = dqs::kNoisyRankThreshold;
};

int run_privacy(const PrivacyArgs& args) {
  const dqs::SymMatrix f = dqs::io::parse_matrix_json(dqs::io::read_file(args.matrix));
  const dqs::WeightSet weights = parse_weights(args.weights);
  const dqs::PrivacyReport report =
      dqs::privacy_quantifier(f, weights, args.rank_threshold);
  std::cout << dqs::io::privacy_report_json(report);
  return std::abs(report.value - 1.0) <= 1e-6 ? kExitOk : kExitNotPrivate;
}

struct BoundsArgs {
  std::string matrix;
  std::string qmatrix;
  std::vector<std::string> weights;
  double rank_threshold = dqs::kNoisyRankThreshold;
  std::uint64_t events = 1;
};

int run_bounds(const BoundsArgs& args) {
  const dqs::SymMatrix f = dqs::io::parse_matrix_json(dqs::io::read_file(args.matrix));
  std::optional<dqs::SymMatrix> q;
  if (!args.qmatrix.empty())
    q = dqs::io::parse_matrix_json(dqs::io::read_file(args.qmatrix));
  const dqs::WeightSet weights = parse_weights(args.weights);
  const dqs::BoundReport report =
      dqs::bound_report(f, q, weights, args.rank_threshold, args.events);
  std::cout << dqs::io::bound_report_json(report);
  return kExitOk;
}

struct ReportArgs {
  std::string counts;
  std::string out = "report";
  std::vector<double> phase_points;
  double rank_threshold = dqs::kNoisyRankThreshold;
};

int run_report(const ReportArgs& args) {
  const std::string counts_text = dqs::io::read_file(args.counts);
  const auto table = dqs::io::parse_counts_csv(counts_text);
  const auto fit = dqs::protocol::fit_visibilities(table);

  std::vector<double> points = args.phase_points;
  if (points.empty()) points = {0.25 * std::numbers::pi, 0.75 * std::numbers::pi};

  std::vector<dqs::io::EigenReportPoint> eigen_points;
  for (double c : points) {
    dqs::io::EigenReportPoint pt;
    pt.phases = {c, c, c, c};
    pt.eigen = dqs::eigensym(dqs::protocol::reconstruct_cfim(fit, pt.phases),
                             args.rank_threshold);
    eigen_points.push_back(std::move(pt));
  }

  fs::create_directories(args.out);
  RunManifest manifest;
  manifest.command = "report";
  manifest.tool_version = std::string(dqs::kVersion);
  manifest.config.emplace_back("counts",
                               dqs::io::json_string(fs::path(args.counts).filename().string()));
  manifest.config.emplace_back("counts_digest",
                               dqs::io::json_string(dqs::io::digest(counts_text)));
  std::string pts = "[";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) pts += ',';
    pts += dqs::io::json_number(points[i]);
  }
  pts += ']';
  manifest.config.emplace_back("phase_points", pts);
  manifest.config.emplace_back("rank_threshold", dqs::io::json_number(args.rank_threshold));

  const fs::path dir(args.out);
  write_with_digest(manifest, dir / "fit_curves.csv", dqs::io::fit_curves_csv(fit));
  write_with_digest(manifest, dir / "fit.json", dqs::io::fit_result_json(fit));
  write_with_digest(manifest, dir / "eigen_report.json",
                    dqs::io::eigen_report_json(eigen_points, args.rank_threshold));
  dqs::io::write_file(dir / "manifest.json", dqs::io::manifest_json(manifest));
  std::cout << "wrote report bundle to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed quantum sensing privacy toolkit"};
  app.set_version_flag("--version", std::string(dqs::kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "sample coincidence counts from the model");
  sim_cmd->add_option("--phases", sim.phases_csv, "phi1,phi2,phi3,phi4 in radians");
  sim_cmd->add_option("--scan", sim.scan, "scan each phase over [0, pi] on this many points");
  sim_cmd->add_option("--visibility", sim.visibility, "shared visibility in [0, 1]");
  sim_cmd->add_option("--visibilities", sim.visibilities_file, "per-channel visibility JSON");
  sim_cmd->add_option("--events", sim.events, "coincidence events per setting")->required();
  sim_cmd->add_option("--seed", sim.seed, "master RNG seed")->required();
  sim_cmd->add_option("--out", sim.out, "counts CSV path");

  ReconstructArgs rec;
  auto* rec_cmd = app.add_subcommand("reconstruct", "fit visibilities and rebuild the CFIM");
  rec_cmd->add_option("--counts", rec.counts, "counts CSV from a phase scan")->required();
  rec_cmd->add_option("--phases", rec.phases_csv, "evaluation phases phi1..phi4")->required();
  rec_cmd->add_option("--out", rec.out, "output prefix for .fit.json/.cfim.json");

  PrivacyArgs priv;
  auto* priv_cmd = app.add_subcommand("privacy", "evaluate the privacy quantifier");
  priv_cmd->add_option("--matrix", priv.matrix, "Fisher matrix JSON")->required();
  priv_cmd->add_option("--weights", priv.weights, "weight vector (repeatable)")->required();
  priv_cmd->add_option("--rank-threshold", priv.rank_threshold, "relative eigenvalue cutoff");

  BoundsArgs bnd;
  auto* bnd_cmd = app.add_subcommand("bounds", "pseudoinverse Cramer-Rao bounds");
  bnd_cmd->add_option("--matrix", bnd.matrix, "Fisher matrix JSON")->required();
  bnd_cmd->add_option("--qmatrix", bnd.qmatrix, "quantum Fisher matrix JSON");
  bnd_cmd->add_option("--weights", bnd.weights, "weight vector (repeatable)")->required();
  bnd_cmd->add_option("--rank-threshold", bnd.rank_threshold, "relative eigenvalue cutoff");
  bnd_cmd->add_option("--events", bnd.events, "probe event budget dividing the bounds");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "figure-data bundle from a scan");
  rep_cmd->add_option("--counts", rep.counts, "counts CSV from a phase scan")->required();
  rep_cmd->add_option("--out", rep.out, "output directory");
  rep_cmd->add_option("--phase-points", rep.phase_points,
                      "uniform phase values for eigen reports (radians)");
  rep_cmd->add_option("--rank-threshold", rep.rank_threshold, "relative eigenvalue cutoff");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (rec_cmd->parsed()) return run_reconstruct(rec);
    if (priv_cmd->parsed()) return run_privacy(priv);
    if (bnd_cmd->parsed()) return run_bounds(bnd);
    if (rep_cmd->parsed()) return run_report(rep);
  } catch (const dqs::FitDegenerate& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadData;
  } catch (const dqs::InsufficientData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadData;
  } catch (const dqs::RankInstability& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadData;
  } catch (const dqs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
