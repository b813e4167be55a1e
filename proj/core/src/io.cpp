#include "dqs/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "dqs/errors.hpp"

namespace dqs::io {

namespace {

using ordered_json = nlohmann::ordered_json;

// nlohmann's dump() picks the shortest round-trip representation; we want a
// fixed format, so the tree is serialized here instead.
void emit(const ordered_json& j, std::string& out) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json_string(it.key());
        out += ':';
        emit(it.value(), out);
      }
      out += '}';
      break;
    }
    case ordered_json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        emit(v, out);
      }
      out += ']';
      break;
    }
    case ordered_json::value_t::number_float:
      out += json_number(j.get<double>());
      break;
    case ordered_json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case ordered_json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case ordered_json::value_t::string:
      out += json_string(j.get<std::string>());
      break;
    case ordered_json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    default:
      out += "null";
      break;
  }
}

std::string render(const ordered_json& j) {
  std::string out;
  emit(j, out);
  out += '\n';
  return out;
}

double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ParseError(std::string(what) + ": non-finite value");
  return v;
}

int pair_index_from_token(const std::string& token) {
  for (int p = 0; p < protocol::kPairCount; ++p)
    if (token == protocol::kPairNames[p]) return p;
  throw ParseError("counts CSV: unknown pair token '" + token + "'");
}

int outcome_index_from_token(const std::string& token) {
  for (int o = 0; o < protocol::kOutcomeCount; ++o)
    if (token == protocol::kOutcomeNames[o]) return o;
  throw ParseError("counts CSV: unknown outcome token '" + token + "'");
}

std::string format_phase(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string matrix_json(const SymMatrix& m) {
  ordered_json j;
  j["dim"] = m.dim();
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.dim(); ++i) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < m.dim(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return render(j);
}

SymMatrix parse_matrix_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("matrix JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j.contains("rows"))
    throw ParseError("matrix JSON: expected object with 'dim' and 'rows'");
  const int dim = j["dim"].get<int>();
  if (dim < 1) throw ParseError("matrix JSON: dim must be >= 1");
  const auto& rows = j["rows"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
    throw ParseError("matrix JSON: 'rows' must hold dim rows");

  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(dim) * dim);
  for (const auto& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw ParseError("matrix JSON: ragged row");
    for (const auto& v : row) {
      if (!v.is_number()) throw ParseError("matrix JSON: non-numeric entry");
      flat.push_back(require_finite(v.get<double>(), "matrix JSON"));
    }
  }

  double max_abs = 0.0;
  for (double v : flat) max_abs = std::max(max_abs, std::abs(v));
  const double scale = max_abs > 0.0 ? max_abs : 1.0;
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < i; ++k) {
      const double a = flat[static_cast<std::size_t>(i) * dim + k];
      const double b = flat[static_cast<std::size_t>(k) * dim + i];
      if (std::abs(a - b) > 1e-6 * scale)
        throw ParseError("matrix JSON: asymmetry beyond 1e-6 relative");
    }
  return SymMatrix(dim, flat);
}

std::string privacy_report_json(const PrivacyReport& report) {
  ordered_json j;
  j["value"] = report.value;
  j["minimizer"] = report.minimizer;
  j["support_rank"] = report.support_rank;
  j["rank_threshold"] = report.rank_threshold;
  ordered_json hidden = ordered_json::array();
  for (bool h : report.per_parameter_hidden) hidden.push_back(h);
  j["per_parameter_hidden"] = std::move(hidden);
  j["reason"] = report.reason;
  return render(j);
}

std::string bound_report_json(const BoundReport& report) {
  ordered_json j;
  ordered_json scalars = ordered_json::array();
  ordered_json saturable = ordered_json::array();
  for (const auto& sb : report.scalar_bounds) {
    ordered_json s;
    s["f"] = sb.f_bound;
    if (sb.q_bound) s["q"] = *sb.q_bound;
    scalars.push_back(std::move(s));
    saturable.push_back(sb.saturable);
  }
  j["scalar_bounds"] = std::move(scalars);
  j["trace_f"] = report.trace_f;
  if (report.trace_q)
    j["trace_q"] = *report.trace_q;
  else
    j["trace_q"] = nullptr;
  j["saturable"] = std::move(saturable);
  j["warnings"] = report.warnings;
  return render(j);
}

std::string fit_result_json(const protocol::FitResult& fit) {
  ordered_json j;
  ordered_json vis, errs;
  for (int p = 0; p < protocol::kPairCount; ++p) {
    ordered_json vp, ep;
    for (int o = 0; o < protocol::kOutcomeCount; ++o) {
      vp[protocol::kOutcomeNames[o]] = fit.visibilities[protocol::channel_index(p, o)];
      ep[protocol::kOutcomeNames[o]] = fit.std_errors[protocol::channel_index(p, o)];
    }
    vis[protocol::kPairNames[p]] = std::move(vp);
    errs[protocol::kPairNames[p]] = std::move(ep);
  }
  j["visibilities"] = std::move(vis);
  j["std_errors"] = std::move(errs);
  j["mean_visibility"] = fit.mean_visibility;
  j["std_error"] = fit.mean_std_error;
  j["rss"] = fit.rss;
  return render(j);
}

std::string eigen_report_json(const std::vector<EigenReportPoint>& points,
                              double rank_threshold) {
  ordered_json j;
  j["rank_threshold"] = rank_threshold;
  ordered_json arr = ordered_json::array();
  for (const auto& pt : points) {
    ordered_json p;
    p["phases"] = pt.phases;
    p["eigenvalues"] = pt.eigen.eigenvalues;
    p["eigenvectors"] = pt.eigen.eigenvectors;
    p["rank"] = pt.eigen.rank;
    arr.push_back(std::move(p));
  }
  j["phase_points"] = std::move(arr);
  return render(j);
}

std::string fit_curves_csv(const protocol::FitResult& fit, int samples) {
  if (samples < 2) throw InvalidInput("fit_curves_csv: need at least 2 samples");
  std::string out = "pair,outcome,phase_sum,probability\n";
  for (int p = 0; p < protocol::kPairCount; ++p)
    for (int o = 0; o < protocol::kOutcomeCount; ++o) {
      const double v = fit.visibilities[protocol::channel_index(p, o)];
      const int sign = protocol::outcome_sign(o);
      for (int k = 0; k < samples; ++k) {
        const double s = 2.0 * std::numbers::pi * k / (samples - 1);
        const double prob = (1.0 + sign * v * std::cos(s)) / 16.0;
        out += protocol::kPairNames[p];
        out += ',';
        out += protocol::kOutcomeNames[o];
        out += ',';
        out += format_phase(s);
        out += ',';
        out += json_number(prob);
        out += '\n';
      }
    }
  return out;
}

std::string counts_csv(const protocol::CountsTable& table) {
  std::string out = "phi1,phi2,phi3,phi4,pair,outcome,count\n";
  for (const auto& setting : table.settings) {
    std::array<std::string, protocol::kNodeCount> phases;
    for (int i = 0; i < protocol::kNodeCount; ++i) phases[i] = format_phase(setting.phases[i]);
    for (int p = 0; p < protocol::kPairCount; ++p)
      for (int o = 0; o < protocol::kOutcomeCount; ++o) {
        for (const auto& ph : phases) {
          out += ph;
          out += ',';
        }
        out += protocol::kPairNames[p];
        out += ',';
        out += protocol::kOutcomeNames[o];
        out += ',';
        out += std::to_string(setting.counts[protocol::channel_index(p, o)]);
        out += '\n';
      }
  }
  return out;
}

protocol::CountsTable parse_counts_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("counts CSV: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "phi1,phi2,phi3,phi4,pair,outcome,count")
    throw ParseError("counts CSV: unexpected header '" + line + "'");

  protocol::CountsTable table;
  std::map<std::array<std::string, 4>, std::size_t> setting_index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::array<std::string, 7> fields;
    std::size_t start = 0;
    for (int f = 0; f < 7; ++f) {
      const std::size_t comma = line.find(',', start);
      if (f < 6) {
        if (comma == std::string::npos)
          throw ParseError("counts CSV: line " + std::to_string(line_no) + " has too few fields");
        fields[f] = line.substr(start, comma - start);
        start = comma + 1;
      } else {
        if (comma != std::string::npos)
          throw ParseError("counts CSV: line " + std::to_string(line_no) + " has too many fields");
        fields[f] = line.substr(start);
      }
    }

    std::array<std::string, 4> key = {fields[0], fields[1], fields[2], fields[3]};
    auto [it, inserted] = setting_index.try_emplace(key, table.settings.size());
    if (inserted) {
      protocol::PhaseSetting setting;
      for (int i = 0; i < protocol::kNodeCount; ++i) {
        double phase = 0.0;
        const auto pr =
            std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), phase);
        if (pr.ec != std::errc{} || pr.ptr != fields[i].data() + fields[i].size())
          throw ParseError("counts CSV: bad phase '" + fields[i] + "' on line " +
                           std::to_string(line_no));
        setting.phases[i] = require_finite(phase, "counts CSV");
      }
      table.settings.push_back(setting);
    }

    const int pair = pair_index_from_token(fields[4]);
    const int outcome = outcome_index_from_token(fields[5]);
    std::uint64_t count = 0;
    const auto res =
        std::from_chars(fields[6].data(), fields[6].data() + fields[6].size(), count);
    if (res.ec != std::errc{} || res.ptr != fields[6].data() + fields[6].size())
      throw ParseError("counts CSV: bad count '" + fields[6] + "' on line " +
                       std::to_string(line_no));
    table.settings[it->second].counts[protocol::channel_index(pair, outcome)] += count;
  }
  return table;
}

std::string visibilities_json(const protocol::Visibilities& vis) {
  ordered_json j;
  ordered_json pairs;
  for (int p = 0; p < protocol::kPairCount; ++p) {
    ordered_json vp;
    for (int o = 0; o < protocol::kOutcomeCount; ++o)
      vp[protocol::kOutcomeNames[o]] = vis(p, o);
    pairs[protocol::kPairNames[p]] = std::move(vp);
  }
  j["pairs"] = std::move(pairs);
  return render(j);
}

protocol::Visibilities parse_visibilities_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("visibilities JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("shared"))
    return protocol::Visibilities::shared(j["shared"].get<double>());
  if (!j.is_object() || !j.contains("pairs"))
    throw ParseError("visibilities JSON: expected 'pairs' or 'shared'");

  protocol::Visibilities vis = protocol::Visibilities::shared(1.0);
  const auto& pairs = j["pairs"];
  for (int p = 0; p < protocol::kPairCount; ++p) {
    if (!pairs.contains(protocol::kPairNames[p]))
      throw ParseError(std::string("visibilities JSON: missing pair ") +
                       protocol::kPairNames[p]);
    const auto& vp = pairs[protocol::kPairNames[p]];
    for (int o = 0; o < protocol::kOutcomeCount; ++o) {
      if (!vp.contains(protocol::kOutcomeNames[o]))
        throw ParseError(std::string("visibilities JSON: pair ") + protocol::kPairNames[p] +
                         " missing outcome " + protocol::kOutcomeNames[o]);
      vis(p, o) = vp[protocol::kOutcomeNames[o]].get<double>();
    }
  }
  return vis;
}

std::string manifest_json(const RunManifest& manifest) {
  std::string out = "{";
  out += json_string("command");
  out += ':';
  out += json_string(manifest.command);
  out += ',';
  out += json_string("tool_version");
  out += ':';
  out += json_string(manifest.tool_version);
  out += ',';
  out += json_string("seed");
  out += ':';
  out += std::to_string(manifest.seed);
  out += ',';
  out += json_string("config");
  out += ":{";
  for (std::size_t i = 0; i < manifest.config.size(); ++i) {
    if (i) out += ',';
    out += json_string(manifest.config[i].first);
    out += ':';
    out += manifest.config[i].second;
  }
  out += "},";
  out += json_string("outputs");
  out += ":{";
  for (std::size_t i = 0; i < manifest.outputs.size(); ++i) {
    if (i) out += ',';
    out += json_string(manifest.outputs[i].first);
    out += ':';
    out += json_string(manifest.outputs[i].second);
  }
  out += "}}\n";
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string digest(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("short write: " + path.string());
}

}  // namespace dqs::io
