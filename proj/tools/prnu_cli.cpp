// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0
//
// prnu: command-line front end for the toolkit.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "prnu/config.hpp"
#include "prnu/detection.hpp"
#include "prnu/emphasis.hpp"
#include "prnu/errors.hpp"
#include "prnu/experiment.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/image_io.hpp"
#include "prnu/ingest.hpp"
#include "prnu/persist.hpp"
#include "prnu/rng.hpp"
#include "prnu/roc.hpp"
#include "prnu/sensor_sim.hpp"
#include "prnu/transfer.hpp"
#include "prnu/version.hpp"

namespace fs = std::filesystem;
using namespace prnu;

namespace {

// Residual stems (files ending in .w with a matching .x) below dir, sorted.
std::vector<fs::path> residual_stems(const fs::path& dir) {
  require(fs::is_directory(dir), "not a directory: " + dir.string());
  std::vector<fs::path> stems;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".w") continue;
    fs::path stem = e.path();
    stem.replace_extension();
    if (fs::exists(stem.string() + ".x")) stems.push_back(stem);
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

std::vector<ResidualPair> load_residuals(const fs::path& dir) {
  std::vector<ResidualPair> pairs;
  for (const auto& stem : residual_stems(dir)) pairs.push_back(read_residual_pair(stem));
  require(!pairs.empty(), "no residual pairs (*.w + *.x) found in " + dir.string());
  return pairs;
}

WeightScheme parse_scheme(const std::string& text, double scale) {
  WeightScheme scheme = WeightScheme::baseline();
  if (text == "baseline") {
    scheme = WeightScheme::baseline();
  } else if (text == "fixed") {
    scheme = WeightScheme::fixed_parabola();
    // 255 reproduces -v^2 + 255 v on the 8-bit scale exactly.
    if (scale > 0.0) scheme = scheme.with_gain(scale * scale / 4.0);
  } else if (text.rfind("emphasis:", 0) == 0) {
    scheme = WeightScheme::emphasis(read_emphasis_csv(text.substr(9)));
  } else {
    throw InvalidArgument("unknown weight scheme '" + text + "' (baseline, fixed or emphasis:<curve.csv>)");
  }
  return scheme;
}

ResidualPair patch_pair(const fs::path& path, const DenoiseParams& params, bool clean) {
  if (path.extension() == ".w") {
    fs::path stem = path;
    stem.replace_extension();
    return read_residual_pair(stem);
  }
  const auto channels = load_image(path);
  return extract_residual(channels, params, clean);
}

Shift parse_shift(const std::string& text) {
  const auto comma = text.find(',');
  require(comma != std::string::npos, "shift must be given as ROW,COL");
  return {std::stol(text.substr(0, comma)), std::stol(text.substr(comma + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PRNU fingerprinting with brightness-dependent emphasis"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate captures from devices with known PRNU and transfer curve");
  std::string sim_spec = "gamma:0.45", sim_format = "png";
  double sim_sk = 0.02, sim_sn = 0.01, sim_corr = 6.0, sim_low = 0.02, sim_high = 0.9;
  std::size_t sim_count = 10, sim_devices = 1, sim_h = 512, sim_w = 512;
  std::uint64_t sim_seed = 0;
  fs::path sim_out;
  sim->add_option("--spec", sim_spec, "Transfer curve: gamma:G[,C1], smoothstep, pwl:u:v,..., poly:b0,...");
  sim->add_option("--sigma-k", sim_sk, "PRNU standard deviation");
  sim->add_option("--sigma-n", sim_sn, "Additive noise standard deviation");
  sim->add_option("--count", sim_count, "Images per device");
  sim->add_option("--devices", sim_devices, "Number of devices");
  sim->add_option("--height", sim_h);
  sim->add_option("--width", sim_w);
  sim->add_option("--scene-correlation", sim_corr, "Scene smoothness in pixels");
  sim->add_option("--scene-low", sim_low);
  sim->add_option("--scene-high", sim_high);
  sim->add_option("--format", sim_format, "png (16 bit) or bin (lossless planes)")->check(CLI::IsMember({"png", "bin"}));
  sim->add_option("--seed", sim_seed)->required();
  sim->add_option("--out", sim_out)->required();

  // ingest
  auto* ing = app.add_subcommand("ingest", "Extract and cache residuals for a device/<name>/ image tree");
  fs::path ing_in, ing_out;
  double ing_sigma0 = 3.0;
  bool ing_no_clean = false;
  ing->add_option("--in", ing_in)->required();
  ing->add_option("--out", ing_out)->required();
  ing->add_option("--sigma0", ing_sigma0, "Denoiser noise level on the 0-255 scale");
  ing->add_flag("--no-clean", ing_no_clean, "Skip zero-meaning and Wiener cleaning");

  // residual
  auto* res = app.add_subcommand("residual", "Extract residual (.w) and denoised (.x) planes for images in a directory");
  fs::path res_in, res_out;
  double res_sigma0 = 3.0;
  bool res_no_clean = false;
  res->add_option("--in", res_in)->required();
  res->add_option("--out", res_out)->required();
  res->add_option("--sigma0", res_sigma0);
  res->add_flag("--no-clean", res_no_clean);

  // emphasis
  auto* emp = app.add_subcommand("emphasis", "Estimate the PRNU emphasis from residual pairs");
  fs::path emp_dir, emp_out, emp_phi;
  std::size_t emp_bins = kDefaultBins;
  std::string emp_method = "simplified", emp_kref = "loo";
  int emp_iters = 2;
  emp->add_option("--residuals", emp_dir)->required();
  emp->add_option("--bins", emp_bins);
  emp->add_option("--method", emp_method)->check(CLI::IsMember({"2d", "simplified"}));
  emp->add_option("--iters", emp_iters);
  emp->add_option("--kref", emp_kref, "loo or shared")->check(CLI::IsMember({"loo", "shared"}));
  emp->add_option("--phi-out", emp_phi, "With --method 2d: write <prefix>.csv and <prefix>_counts.csv");
  emp->add_option("--out", emp_out)->required();

  // transfer
  auto* tr = app.add_subcommand("transfer", "Recover the transfer curve from an emphasis curve");
  fs::path tr_curve, tr_out;
  double tr_eps = kDefaultEpsilon;
  std::size_t tr_grid = kDefaultGridSize;
  tr->add_option("--curve", tr_curve)->required();
  tr->add_option("--epsilon", tr_eps);
  tr->add_option("--grid", tr_grid);
  tr->add_option("--out", tr_out)->required();

  // fingerprint
  auto* fpc = app.add_subcommand("fingerprint", "Estimate a camera fingerprint");
  fs::path fp_dir, fp_out;
  std::string fp_scheme = "baseline";
  double fp_scale = 0.0;
  bool fp_no_clean = false;
  fpc->add_option("--residuals", fp_dir)->required();
  fpc->add_option("--scheme", fp_scheme, "baseline, fixed or emphasis:<curve.csv>");
  fpc->add_option("--scale", fp_scale, "Brightness scale of the fixed parabola (255 gives -v^2+255v)");
  fpc->add_flag("--no-clean", fp_no_clean);
  fpc->add_option("--out", fp_out)->required();

  // detect
  auto* det = app.add_subcommand("detect", "Score a patch against a fingerprint with crop search");
  fs::path det_fp, det_patch, det_out;
  std::string det_weights = "baseline", det_truth;
  double det_sigma0 = 3.0, det_scale = 0.0;
  bool det_no_clean = false;
  int det_nbh = kDefaultPceNeighborhood;
  det->add_option("--fingerprint", det_fp)->required();
  det->add_option("--weights", det_weights, "baseline, fixed or emphasis:<curve.csv>");
  det->add_option("--scale", det_scale);
  det->add_option("--patch", det_patch, "Image file, or a residual .w file with its .x sibling")->required();
  det->add_option("--truth-shift", det_truth, "ROW,COL of the true crop (H1 protocol)");
  det->add_option("--sigma0", det_sigma0);
  det->add_flag("--no-clean", det_no_clean);
  det->add_option("--neighborhood", det_nbh);
  det->add_option("--out", det_out)->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run the device-identification experiment");
  fs::path exp_config, exp_out;
  std::vector<std::string> exp_set;
  std::uint64_t exp_seed = 0;
  exp->add_option("--config", exp_config, "key=value file");
  exp->add_option("--set", exp_set, "Override a config key (key=value), repeatable");
  exp->add_option("--seed", exp_seed)->required();
  exp->add_option("--out", exp_out)->required();

  // roc
  auto* rc = app.add_subcommand("roc", "Modified ROC curve from H1 and H0 score CSVs");
  fs::path roc_h1, roc_h0, roc_out;
  double roc_fpr = 0.01;
  rc->add_option("--h1", roc_h1)->required();
  rc->add_option("--h0", roc_h0)->required();
  rc->add_option("--fpr", roc_fpr);
  rc->add_option("--out", roc_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const TransferSpec spec = TransferSpec::parse(sim_spec);
      fs::create_directories(sim_out / "truth");
      std::ofstream(sim_out / "truth" / "transfer.txt") << spec.to_string() << '\n';
      double worst_clip = 0.0;
      for (std::size_t d = 0; d < sim_devices; ++d) {
        char name[32];
        std::snprintf(name, sizeof name, "dev%02zu", d);
        const fs::path dir = sim_out / "device" / name;
        fs::create_directories(dir);
        const PrnuPattern k = make_prnu(derive_seed(sim_seed, "prnu", {d}), sim_h, sim_w, sim_sk);
        write_plane(sim_out / "truth" / (std::string(name) + ".prnu.bin"), k.plane);
        for (std::size_t i = 0; i < sim_count; ++i) {
          const ImagePlane z = smooth_scene(derive_seed(sim_seed, "scene", {d, i}), sim_h, sim_w,
                                            {sim_corr, sim_low, sim_high});
          const Capture cap = simulate_capture(z, spec, k, sim_sn, derive_seed(sim_seed, "noise", {d, i}));
          worst_clip = std::max(worst_clip, cap.clip_fraction());
          char file[32];
          std::snprintf(file, sizeof file, "img_%04zu.%s", i, sim_format.c_str());
          if (sim_format == "png") write_png16(dir / file, {cap.image});
          else write_plane(dir / file, cap.image);
        }
      }
      std::cout << "wrote " << sim_devices * sim_count << " captures to " << sim_out.string()
                << " (max clip fraction " << worst_clip << ")\n";
    } else if (*ing) {
      DenoiseParams params;
      params.sigma0 = ing_sigma0;
      const IngestReport report = ingest(ing_in, ing_out, params, !ing_no_clean);
      std::cout << "manifest: " << report.entries.size() << " entries, " << report.computed << " computed, "
                << report.skipped << " skipped, " << report.errors.size() << " errors\n";
      for (const auto& [path, msg] : report.errors) std::cerr << "error: " << path << ": " << msg << '\n';
    } else if (*res) {
      DenoiseParams params;
      params.sigma0 = res_sigma0;
      require(fs::is_directory(res_in), "not a directory: " + res_in.string());
      fs::create_directories(res_out);
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(res_in))
        if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      int failures = 0;
      for (const auto& f : files) {
        try {
          const ResidualPair pair = extract_residual(load_image(f), params, !res_no_clean);
          fs::path rel = fs::relative(f, res_in);
          rel.replace_extension();
          fs::create_directories((res_out / rel).parent_path());
          write_residual_pair(res_out / rel, pair);
        } catch (const std::exception& e) {
          std::cerr << "error: " << f.string() << ": " << e.what() << '\n';
          ++failures;
        }
      }
      std::cout << files.size() - failures << " residual pairs written to " << res_out.string() << '\n';
    } else if (*emp) {
      const auto pairs = load_residuals(emp_dir);
      EmphasisCurve curve;
      if (emp_method == "2d") {
        const PhiMatrix phi = symmetrize(regressogram_2d(pairs, emp_bins));
        if (!emp_phi.empty()) write_phi_csv(emp_phi.string() + ".csv", emp_phi.string() + "_counts.csv", phi);
        curve = rank1_emphasis(phi);
      } else {
        curve = iterate_emphasis(pairs, emp_iters, emp_bins,
                                 emp_kref == "loo" ? KrefMode::leave_one_out : KrefMode::shared);
      }
      write_emphasis_csv(emp_out, curve);
      std::cout << "gamma_linearity_score " << gamma_linearity_score(curve) << '\n';
    } else if (*tr) {
      EmphasisCurve curve = read_emphasis_csv(tr_curve);
      const TransferCurve h = recover_transfer_and_scale(curve, tr_eps, tr_grid);
      write_transfer_csv(tr_out, h);
      std::cout << "a " << format_double(h.a) << '\n';
    } else if (*fpc) {
      const auto pairs = load_residuals(fp_dir);
      FingerprintOptions opts;
      opts.clean = !fp_no_clean;
      const FingerprintEstimate fp = estimate_fingerprint(pairs, parse_scheme(fp_scheme, fp_scale), opts);
      write_fingerprint(fp_out, fp);
      std::cout << "fingerprint from " << fp.source_count << " residuals, " << fp.starved << " starved pixels\n";
    } else if (*det) {
      DenoiseParams params;
      params.sigma0 = det_sigma0;
      const ImagePlane fp = read_fingerprint(det_fp);
      const ResidualPair patch = patch_pair(det_patch, params, !det_no_clean);
      const WeightScheme scheme = parse_scheme(det_weights, det_scale);
      std::optional<Shift> truth;
      if (!det_truth.empty()) truth = parse_shift(det_truth);
      const DetectionScore s =
          align_and_score(FingerprintSpectrum(fp), scheme.plane(patch.denoised), patch.residual, truth, det_nbh);
      write_scores_csv(det_out, std::span<const DetectionScore>(&s, 1));
      std::cout << "pce " << format_double(s.pce) << " shift " << s.shift.row << ',' << s.shift.col << '\n';
    } else if (*exp) {
      ExperimentConfig cfg;
      if (!exp_config.empty()) cfg.apply(read_key_values(exp_config));
      for (const auto& kv : exp_set) cfg.apply(parse_key_values(kv));
      cfg.seed = exp_seed;
      cfg.seed_set = true;
      const ExperimentResult result = run_device_id(cfg);
      write_experiment(result, exp_out);
      for (const auto& s : result.schemes)
        std::cout << s.scheme << " TPR@FPR=" << cfg.fpr_target << ": " << format_double(s.mean_tpr) << '\n';
    } else if (*rc) {
      const auto h1 = read_scores_csv(roc_h1);
      const auto h0 = read_scores_csv(roc_h0);
      const RocCurve curve = roc_points(h1, h0);
      write_roc_csv(roc_out, curve);
      std::cout << "tpr@fpr=" << roc_fpr << ' ' << format_double(tpr_at_fpr(curve, roc_fpr)) << " ceiling "
                << format_double(curve.tpr_ceiling) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
