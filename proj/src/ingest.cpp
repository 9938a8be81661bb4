// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "prnu/errors.hpp"
#include "prnu/image_io.hpp"
#include "prnu/persist.hpp"

namespace fs = std::filesystem;

namespace prnu {

namespace {

constexpr const char* kManifestHeader = "device,path,height,width,checksum,residual";

std::string settings_text(const DenoiseParams& params, bool clean) {
  std::ostringstream ss;
  ss << "levels=" << params.levels << "\nsigma0=" << format_double(params.sigma0) << "\nwindows=";
  for (std::size_t i = 0; i < params.windows.size(); ++i) ss << (i ? ":" : "") << params.windows[i];
  ss << "\nclean=" << (clean ? 1 : 0) << '\n';
  return ss.str();
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

// Commas and newlines would break the CSV; such names are rejected upfront.
bool csv_safe(const std::string& s) { return s.find_first_of(",\n\r") == std::string::npos; }

}  // namespace

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::vector<ManifestEntry> read_manifest(const fs::path& cache_dir) {
  const fs::path path = cache_dir / "manifest.csv";
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  std::string line;
  std::getline(in, line);
  require(line == kManifestHeader, "manifest: bad header in " + path.string());
  std::vector<ManifestEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) f.push_back(field);
    require(f.size() == 6, "manifest: malformed line '" + line + "'");
    out.push_back({f[0], f[1], std::stoul(f[2]), std::stoul(f[3]), f[4], f[5]});
  }
  return out;
}

IngestReport ingest(const fs::path& dataset_dir, const fs::path& cache_dir, const DenoiseParams& params, bool clean) {
  params.validate();
  if (!fs::is_directory(dataset_dir)) throw IoError("ingest: not a directory: " + dataset_dir.string());
  fs::create_directories(cache_dir / "residuals");
  const fs::path root = fs::is_directory(dataset_dir / "device") ? dataset_dir / "device" : dataset_dir;

  const std::string settings = settings_text(params, clean);
  const fs::path settings_path = cache_dir / "ingest.settings";
  std::map<std::string, ManifestEntry> previous;
  if (read_text(settings_path) == settings && fs::exists(cache_dir / "manifest.csv")) {
    for (auto& e : read_manifest(cache_dir)) previous.emplace(e.path, e);
  }

  std::vector<std::pair<std::string, fs::path>> files;  // device, file
  for (const auto& dev : fs::directory_iterator(root)) {
    if (!dev.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(dev.path()))
      if (f.is_regular_file() && is_image_file(f.path())) files.emplace_back(dev.path().filename().string(), f.path());
  }
  std::sort(files.begin(), files.end());

  IngestReport report;
  for (const auto& [device, file] : files) {
    const std::string rel = fs::relative(file, dataset_dir).generic_string();
    try {
      require(csv_safe(device) && csv_safe(rel), "path contains ',' or a newline");
      const std::string checksum = file_checksum(file);
      const std::string stem = "residuals/" + device + "/" + file.stem().string() + "_" + checksum.substr(0, 8);
      const auto prev = previous.find(rel);
      if (prev != previous.end() && prev->second.checksum == checksum &&
          fs::exists(cache_dir / (prev->second.residual + ".w")) &&
          fs::exists(cache_dir / (prev->second.residual + ".x"))) {
        report.entries.push_back(prev->second);
        ++report.skipped;
        continue;
      }
      const auto channels = load_image(file);
      const ResidualPair pair = extract_residual(channels, params, clean);
      fs::create_directories(cache_dir / "residuals" / device);
      write_residual_pair(cache_dir / stem, pair);
      report.entries.push_back({device, rel, pair.residual.height(), pair.residual.width(), checksum, stem});
      ++report.computed;
    } catch (const std::exception& e) {
      report.errors.emplace_back(rel, e.what());
    }
  }

  std::ostringstream manifest;
  manifest << kManifestHeader << '\n';
  for (const auto& e : report.entries)
    manifest << e.device << ',' << e.path << ',' << e.height << ',' << e.width << ',' << e.checksum << ','
             << e.residual << '\n';
  write_text(cache_dir / "manifest.csv", manifest.str());
  std::ostringstream errors;
  errors << "path,error\n";
  for (const auto& [path, msg] : report.errors) {
    std::string clean_msg = msg;
    std::replace(clean_msg.begin(), clean_msg.end(), ',', ';');
    std::replace(clean_msg.begin(), clean_msg.end(), '\n', ' ');
    errors << path << ',' << clean_msg << '\n';
  }
  write_text(cache_dir / "errors.csv", errors.str());
  write_text(settings_path, settings);
  return report;
}

}  // namespace prnu
