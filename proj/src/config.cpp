// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/config.hpp"

#include <functional>
#include <map>

#include "prnu/errors.hpp"
#include "prnu/sensor_sim.hpp"

namespace prnu {

namespace {

std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == v.size() && pos > 0 && n >= 0, "config: " + key + " must be a nonnegative integer");
  return static_cast<std::size_t>(n);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw InvalidArgument("config: " + key + " must be true or false");
}

}  // namespace

void ExperimentConfig::apply(const KeyValues& kv) {
  using Setter = std::function<void(const std::string&)>;
  auto count = [this](std::size_t& field, const char* key) {
    return Setter([&field, key](const std::string& v) { field = parse_count(key, v); });
  };
  auto real = [](double& field) { return Setter([&field](const std::string& v) { field = parse_double(v); }); };
  const std::map<std::string, Setter> setters{
      {"source", [this](const std::string& v) { source = v; }},
      {"devices", count(devices, "devices")},
      {"images_per_device", count(images_per_device, "images_per_device")},
      {"image_height", count(image_height, "image_height")},
      {"image_width", count(image_width, "image_width")},
      {"transfer", [this](const std::string& v) { transfer = TransferSpec::parse(v).to_string(); }},
      {"sigma_k", real(sigma_k)},
      {"sigma_n", real(sigma_n)},
      {"scene_correlation", real(scene_correlation)},
      {"scene_low", real(scene_low)},
      {"scene_high", real(scene_high)},
      {"l_emphasis", count(l_emphasis, "l_emphasis")},
      {"l_train", count(l_train, "l_train")},
      {"l_test", count(l_test, "l_test")},
      {"square", count(square, "square")},
      {"patch", count(patch, "patch")},
      {"bins", count(bins, "bins")},
      {"iterations", [this](const std::string& v) { iterations = static_cast<int>(parse_count("iterations", v)); }},
      {"shuffles", count(shuffles, "shuffles")},
      {"origins", count(origins, "origins")},
      {"crops", count(crops, "crops")},
      {"h0_per_device", count(h0_per_device, "h0_per_device")},
      {"fpr_target", real(fpr_target)},
      {"neighborhood",
       [this](const std::string& v) { neighborhood = static_cast<int>(parse_count("neighborhood", v)); }},
      {"kref", [this](const std::string& v) {
         require(v == "loo" || v == "shared", "config: kref must be loo or shared");
         leave_one_out = v == "loo";
       }},
      {"sigma0", real(sigma0)},
      {"clean", [this](const std::string& v) { clean = parse_bool("clean", v); }},
      {"seed", [this](const std::string& v) {
         seed = parse_count("seed", v);
         seed_set = true;
       }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    require(it != setters.end(), "config: unknown key '" + key + "'");
    it->second(value);
  }
}

KeyValues ExperimentConfig::to_key_values() const {
  KeyValues kv{
      {"source", source},
      {"devices", std::to_string(devices)},
      {"images_per_device", std::to_string(images_per_device)},
      {"image_height", std::to_string(image_height)},
      {"image_width", std::to_string(image_width)},
      {"transfer", transfer},
      {"sigma_k", format_double(sigma_k)},
      {"sigma_n", format_double(sigma_n)},
      {"scene_correlation", format_double(scene_correlation)},
      {"scene_low", format_double(scene_low)},
      {"scene_high", format_double(scene_high)},
      {"l_emphasis", std::to_string(l_emphasis)},
      {"l_train", std::to_string(l_train)},
      {"l_test", std::to_string(l_test)},
      {"square", std::to_string(square)},
      {"patch", std::to_string(patch)},
      {"bins", std::to_string(bins)},
      {"iterations", std::to_string(iterations)},
      {"shuffles", std::to_string(shuffles)},
      {"origins", std::to_string(origins)},
      {"crops", std::to_string(crops)},
      {"h0_per_device", std::to_string(h0_per_device)},
      {"fpr_target", format_double(fpr_target)},
      {"neighborhood", std::to_string(neighborhood)},
      {"kref", leave_one_out ? "loo" : "shared"},
      {"sigma0", format_double(sigma0)},
      {"clean", clean ? "true" : "false"},
  };
  if (seed_set) kv["seed"] = std::to_string(seed);
  return kv;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : to_key_values()) {
    for (unsigned char c : k + "=" + v + "\n") {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

DenoiseParams ExperimentConfig::denoise_params() const {
  DenoiseParams p;
  p.sigma0 = sigma0;
  p.validate();
  return p;
}

void ExperimentConfig::validate() const {
  require(l_emphasis >= 1 && l_train >= 1 && l_test >= 1, "config: l_emphasis, l_train and l_test must be at least 1");
  require(l_emphasis >= 2, "config: emphasis estimation needs at least 2 residuals");
  require(shuffles >= 1 && origins >= 1 && crops >= 1 && h0_per_device >= 1,
          "config: shuffles, origins, crops and h0_per_device must be at least 1");
  require(bins >= 3, "config: bins must be at least 3");
  require(iterations >= 1, "config: iterations must be at least 1");
  require(patch >= 1 && patch <= square, "config: patch must fit inside the square");
  require(fpr_target >= 0.0 && fpr_target <= 1.0, "config: fpr_target must lie in [0,1]");
  require(neighborhood >= 1 && neighborhood % 2 == 1, "config: neighborhood must be odd");
  const std::size_t valid_shifts = (square - patch + 1) * (square - patch + 1);
  require(static_cast<std::size_t>(neighborhood * neighborhood) < valid_shifts,
          "config: square - patch leaves too few shifts for the PCE neighborhood");
  if (synthetic()) {
    require(devices >= 2, "config: need at least 2 devices for H0 samples");
    require(l_emphasis + l_train + l_test <= images_per_device,
            "config: l_emphasis + l_train + l_test exceeds images_per_device");
    require(image_height >= square && image_width >= square, "config: square does not fit inside the image");
    require(sigma_k >= 0.0 && sigma_n >= 0.0, "config: noise levels must be nonnegative");
    require(scene_low >= 0.0 && scene_low < scene_high && scene_high <= 1.0, "config: need 0 <= scene_low < scene_high <= 1");
    TransferSpec::parse(transfer);
  }
  denoise_params();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig cfg;
  cfg.apply(read_key_values(path));
  return cfg;
}

}  // namespace prnu
