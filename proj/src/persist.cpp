// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/persist.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "prnu/errors.hpp"

namespace prnu {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

const char* label_name(Hypothesis h) { return h == Hypothesis::H1 ? "H1" : "H0"; }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw InvalidArgument("not a number: '" + text + "'");
  return v;
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("expected key=value, got '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void write_emphasis_csv(const std::filesystem::path& path, const EmphasisCurve& curve) {
  curve.validate();
  auto out = open_out(path);
  out << "bin_center,value,count\n";
  for (std::size_t i = 0; i < curve.bins(); ++i)
    out << format_double(curve.center(i)) << ',' << format_double(curve.values[i]) << ',' << curve.counts[i] << '\n';
  out << "scale," << format_double(curve.scale) << '\n';
}

EmphasisCurve read_emphasis_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  require(lines.size() >= 2 && lines[0] == "bin_center,value,count", "emphasis csv: bad header in " + path.string());
  EmphasisCurve curve;
  std::vector<double> centers;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i]);
    if (f.size() == 2 && f[0] == "scale") {
      curve.scale = parse_double(f[1]);
      continue;
    }
    require(f.size() == 3, "emphasis csv: expected 3 fields on line " + std::to_string(i + 1));
    centers.push_back(parse_double(f[0]));
    curve.values.push_back(parse_double(f[1]));
    curve.counts.push_back(std::stoull(f[2]));
  }
  require(!centers.empty(), "emphasis csv: no bins");
  // Uniform edges when the centers match them, otherwise midpoints.
  const auto uniform = uniform_edges(centers.size());
  bool is_uniform = true;
  for (std::size_t i = 0; i < centers.size(); ++i)
    is_uniform = is_uniform && std::abs(0.5 * (uniform[i] + uniform[i + 1]) - centers[i]) < 1e-12;
  if (is_uniform) {
    curve.edges = uniform;
  } else {
    curve.edges.assign(centers.size() + 1, 0.0);
    for (std::size_t i = 1; i < centers.size(); ++i) curve.edges[i] = 0.5 * (centers[i - 1] + centers[i]);
    curve.edges.back() = 1.0;
  }
  curve.validate();
  return curve;
}

void write_phi_csv(const std::filesystem::path& values_path, const std::filesystem::path& counts_path,
                   const PhiMatrix& phi) {
  auto vals = open_out(values_path);
  auto cnts = open_out(counts_path);
  const std::size_t b = phi.bins();
  for (std::size_t p = 0; p < b; ++p) {
    for (std::size_t q = 0; q < b; ++q) {
      const char* sep = q + 1 < b ? "," : "\n";
      vals << (phi.valid(p, q) ? format_double(phi.value(p, q)) : std::string("nan")) << sep;
      cnts << phi.counts[phi.index(p, q)] << sep;
    }
  }
}

void write_transfer_csv(const std::filesystem::path& path, const TransferCurve& curve) {
  auto out = open_out(path);
  out << "u,h\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    out << format_double(curve.grid[i]) << ',' << format_double(curve.values[i]) << '\n';
  out << "a," << format_double(curve.a) << ",epsilon," << format_double(curve.epsilon) << '\n';
}

TransferCurve read_transfer_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  require(lines.size() >= 2 && lines[0] == "u,h", "transfer csv: bad header in " + path.string());
  TransferCurve curve;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i]);
    if (f.size() == 4 && f[0] == "a") {
      curve.a = parse_double(f[1]);
      curve.epsilon = parse_double(f[3]);
      continue;
    }
    require(f.size() == 2, "transfer csv: expected 2 fields on line " + std::to_string(i + 1));
    curve.grid.push_back(parse_double(f[0]));
    curve.values.push_back(parse_double(f[1]));
  }
  return curve;
}

void write_fingerprint(const std::filesystem::path& path, const FingerprintEstimate& fp) {
  write_plane(path, fp.plane);
  KeyValues kv{{"scheme", fp.scheme.name()},
               {"gain", format_double(fp.scheme.gain())},
               {"source_count", std::to_string(fp.source_count)},
               {"starved", std::to_string(fp.starved)},
               {"cleaned", fp.cleaned ? "1" : "0"}};
  write_key_values(path.string() + ".meta", kv);
}

ImagePlane read_fingerprint(const std::filesystem::path& path, KeyValues* meta) {
  if (meta != nullptr) {
    const std::filesystem::path side = path.string() + ".meta";
    *meta = std::filesystem::exists(side) ? read_key_values(side) : KeyValues{};
  }
  return read_plane(path);
}

void write_scores_csv(const std::filesystem::path& path, std::span<const DetectionScore> scores) {
  auto out = open_out(path);
  out << "pce,shift_row,shift_col,aligned,label\n";
  for (const auto& s : scores)
    out << format_double(s.pce) << ',' << s.shift.row << ',' << s.shift.col << ',' << (s.aligned ? 1 : 0) << ','
        << label_name(s.label) << '\n';
}

std::vector<DetectionScore> read_scores_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  require(!lines.empty() && lines[0] == "pce,shift_row,shift_col,aligned,label",
          "score csv: bad header in " + path.string());
  std::vector<DetectionScore> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i]);
    require(f.size() == 5, "score csv: expected 5 fields on line " + std::to_string(i + 1));
    DetectionScore s;
    s.pce = parse_double(f[0]);
    s.shift = {std::stol(f[1]), std::stol(f[2])};
    s.aligned = f[3] == "1";
    require(f[4] == "H0" || f[4] == "H1", "score csv: label must be H0 or H1");
    s.label = f[4] == "H1" ? Hypothesis::H1 : Hypothesis::H0;
    out.push_back(s);
  }
  return out;
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  auto out = open_out(path);
  out << "fpr,tpr,threshold\n";
  for (const auto& p : curve.points)
    out << format_double(p.fpr) << ',' << format_double(p.tpr) << ',' << format_double(p.threshold) << '\n';
  out << "tpr_ceiling," << format_double(curve.tpr_ceiling) << '\n';
}

void write_residual_pair(const std::filesystem::path& stem, const ResidualPair& pair) {
  write_plane(stem.string() + ".w", pair.residual);
  write_plane(stem.string() + ".x", pair.denoised);
}

ResidualPair read_residual_pair(const std::filesystem::path& stem) {
  ResidualPair pair;
  pair.residual = read_plane(stem.string() + ".w");
  pair.denoised = read_plane(stem.string() + ".x");
  require(pair.residual.same_shape(pair.denoised), "residual pair: planes differ in size for " + stem.string());
  return pair;
}

}  // namespace prnu
