#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dqs/bounds.hpp"
#include "dqs/matrix.hpp"
#include "dqs/privacy.hpp"
#include "dqs/protocol.hpp"

namespace dqs::io {

/// Doubles in emitted JSON/CSV are formatted with up to 17 significant
/// digits, enough to round-trip exactly; emission order is fixed, so
/// identical inputs give byte-identical files.

std::string json_number(double v);
std::string json_string(std::string_view s);

// Matrix JSON: {"dim": m, "rows": [[...], ...]}. The reader symmetrizes via
// (A + A^T)/2 and rejects asymmetry beyond 1e-6 relative.
std::string matrix_json(const SymMatrix& m);
SymMatrix parse_matrix_json(const std::string& text);

std::string privacy_report_json(const PrivacyReport& report);
std::string bound_report_json(const BoundReport& report);
std::string fit_result_json(const protocol::FitResult& fit);

/// Eigenvalue/eigenvector listing of reconstructed matrices at chosen phase
/// points.
struct EigenReportPoint {
  std::array<double, protocol::kNodeCount> phases{};
  EigenSystem eigen;
};
std::string eigen_report_json(const std::vector<EigenReportPoint>& points,
                              double rank_threshold);

/// Fitted fringe curves sampled on a uniform pair-sum grid:
/// pair,outcome,phase_sum,probability rows for plotting.
std::string fit_curves_csv(const protocol::FitResult& fit, int samples = 101);

// Counts CSV: header phi1,phi2,phi3,phi4,pair,outcome,count with pair in
// {12,23,34,41}, outcome in {pp,pm,mp,mm}, phases in radians with 12
// significant digits. Rows with equal phase tuples merge into one setting.
std::string counts_csv(const protocol::CountsTable& table);
protocol::CountsTable parse_counts_csv(const std::string& text);

// Visibilities JSON: {"pairs": {"12": {"pp": v, "pm": v, "mp": v, "mm": v},
// ...}} or {"shared": v}.
std::string visibilities_json(const protocol::Visibilities& vis);
protocol::Visibilities parse_visibilities_json(const std::string& text);

/// Reproducibility record written next to every file-emitting command.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;   // key -> JSON fragment
  std::vector<std::pair<std::string, std::string>> outputs;  // file name -> digest
};
std::string manifest_json(const RunManifest& manifest);

std::uint64_t fnv1a64(std::string_view bytes);
std::string digest(std::string_view bytes);  // "fnv1a64:<16 hex digits>"

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace dqs::io
