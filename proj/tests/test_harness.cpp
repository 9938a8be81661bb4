// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tiffio.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "prnu/config.hpp"
#include "prnu/errors.hpp"
#include "prnu/experiment.hpp"
#include "prnu/image_io.hpp"
#include "prnu/ingest.hpp"
#include "prnu/persist.hpp"
#include "prnu/roc.hpp"
#include "prnu/sensor_sim.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace prnu;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("prnu_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

DetectionScore score(double pce, bool aligned) {
  DetectionScore s;
  s.pce = pce;
  s.aligned = aligned;
  s.label = aligned ? Hypothesis::H1 : Hypothesis::H0;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_tiff(const fs::path& path, const std::vector<ImagePlane>& ch, int bits) {
  TIFF* t = TIFFOpen(path.c_str(), "w");
  REQUIRE(t != nullptr);
  const std::uint32_t h = static_cast<std::uint32_t>(ch[0].height()), w = static_cast<std::uint32_t>(ch[0].width());
  const std::uint16_t spp = static_cast<std::uint16_t>(ch.size());
  TIFFSetField(t, TIFFTAG_IMAGEWIDTH, w);
  TIFFSetField(t, TIFFTAG_IMAGELENGTH, h);
  TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, spp);
  TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(bits));
  TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(t, TIFFTAG_PHOTOMETRIC, spp == 3 ? PHOTOMETRIC_RGB : PHOTOMETRIC_MINISBLACK);
  const double top = bits == 8 ? 255.0 : 65535.0;
  std::vector<std::uint8_t> line(static_cast<std::size_t>(w) * spp * (bits / 8));
  for (std::uint32_t r = 0; r < h; ++r) {
    for (std::uint32_t c = 0; c < w; ++c)
      for (std::uint16_t s = 0; s < spp; ++s) {
        const auto v = std::lround(ch[s](r, c) * top);
        const std::size_t i = static_cast<std::size_t>(c) * spp + s;
        if (bits == 8) line[i] = static_cast<std::uint8_t>(v);
        else reinterpret_cast<std::uint16_t*>(line.data())[i] = static_cast<std::uint16_t>(v);
      }
    REQUIRE(TIFFWriteScanline(t, line.data(), r, 0) == 1);
  }
  TIFFClose(t);
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.devices = 2;
  c.images_per_device = 9;
  c.image_height = c.image_width = 96;
  c.square = 96;
  c.patch = 32;
  c.l_emphasis = 3;
  c.l_train = 3;
  c.l_test = 2;
  c.bins = 8;
  c.shuffles = 2;
  c.origins = 1;
  c.crops = 2;
  c.h0_per_device = 3;
  c.seed = 5;
  c.seed_set = true;
  return c;
}

}  // namespace

TEST_CASE("roc_points") {
  SUBCASE("perfect separation") {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<DetectionScore> h1{score(inf, true), score(inf, true)}, h0{score(0, false), score(0, false)};
    const RocCurve c = roc_points(h1, h0);
    CHECK(c.tpr_ceiling == 1.0);
    bool corner = false;
    for (const auto& p : c.points) corner |= (p.fpr == 0.0 && p.tpr == 1.0);
    CHECK(corner);
    CHECK(c.points.back().fpr == 1.0);
    CHECK(tpr_at_fpr(c, 0.0) == 1.0);
  }
  SUBCASE("misaligned H1 samples cap the curve") {
    std::vector<DetectionScore> h1{score(50, true), score(40, true), score(90, false), score(80, false)};
    std::vector<DetectionScore> h0{score(1, false), score(2, false)};
    const RocCurve c = roc_points(h1, h0);
    CHECK(c.tpr_ceiling == 0.5);
    double top = 0.0;
    for (const auto& p : c.points) top = std::max(top, p.tpr);
    CHECK(top == 0.5);
  }
  SUBCASE("identical distributions track the diagonal") {
    std::mt19937_64 rng(77);
    std::exponential_distribution<double> e(0.1);
    const std::size_t n = 2000;
    std::vector<DetectionScore> h1, h0;
    for (std::size_t i = 0; i < n; ++i) {
      h1.push_back(score(e(rng), true));
      h0.push_back(score(e(rng), false));
    }
    const RocCurve c = roc_points(h1, h0);
    // Two-sample Kolmogorov-Smirnov critical value at 1%.
    const double band = 1.63 * std::sqrt(2.0 / static_cast<double>(n));
    double worst = 0.0;
    for (const auto& p : c.points) worst = std::max(worst, std::abs(p.tpr - p.fpr));
    CHECK(worst <= band);
  }
  SUBCASE("monotone and capped on random inputs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<DetectionScore> h1, h0;
      for (int i = 0; i < 30; ++i) h1.push_back(score(std::floor(u(rng)), u(rng) > 30.0));
      for (int i = 0; i < 40; ++i) h0.push_back(score(std::floor(u(rng) / 2), false));
      const RocCurve c = roc_points(h1, h0);
      CHECK(c.points.front().fpr == 0.0);
      CHECK(c.points.front().tpr == 0.0);
      for (std::size_t i = 1; i < c.points.size(); ++i) {
        CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
        CHECK(c.points[i].tpr >= c.points[i - 1].tpr);
        CHECK(c.points[i].tpr <= c.tpr_ceiling + 1e-15);
        CHECK(c.points[i].fpr <= 1.0);
      }
    }
  }
  SUBCASE("errors") {
    std::vector<DetectionScore> one{score(1, true)};
    CHECK_THROWS_AS(roc_points({}, one), InvalidArgument);
    CHECK_THROWS_AS(roc_points(one, {}), InvalidArgument);
  }
}

TEST_CASE("tpr_at_fpr") {
  RocCurve c;
  c.points = {{0.0, 0.0, 0}, {0.01, 0.7, 0}, {1.0, 1.0, 0}};
  CHECK(tpr_at_fpr(c, 0.01) == 0.7);
  CHECK(tpr_at_fpr(c, 1.0) == 1.0);
  CHECK(tpr_at_fpr(c, 0.005) == 0.0);
  RocCurve d;
  d.points = {{0.0, 0.2, 0}, {0.5, 0.9, 0}};
  CHECK(tpr_at_fpr(d, 0.0) == 0.2);
  CHECK_THROWS_AS(tpr_at_fpr(c, 1.5), InvalidArgument);
  CHECK_THROWS_AS(tpr_at_fpr(c, -0.1), InvalidArgument);
}

TEST_CASE("ExperimentConfig") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  SUBCASE("empty test split is rejected") {
    c.l_test = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
  }
  SUBCASE("other violations") {
    ExperimentConfig a = c;
    a.images_per_device = 30;
    CHECK_THROWS_AS(a.validate(), InvalidArgument);
    ExperimentConfig b = c;
    b.patch = 2001;
    CHECK_THROWS_AS(b.validate(), InvalidArgument);
    ExperimentConfig d = c;
    d.transfer = "cubic";
    CHECK_THROWS(d.validate());
    ExperimentConfig e = c;
    e.devices = 1;
    CHECK_THROWS_AS(e.validate(), InvalidArgument);
  }
  SUBCASE("key/value round trip and hashing") {
    ExperimentConfig a = tiny_config();
    ExperimentConfig b;
    b.apply(a.to_key_values());
    CHECK(b.to_key_values() == a.to_key_values());
    CHECK(b.hash() == a.hash());
    b.apply({{"sigma_n", "0.2"}});
    CHECK(b.sigma_n == 0.2);
    CHECK(b.hash() != a.hash());
    CHECK_THROWS_AS(b.apply({{"no_such_key", "1"}}), InvalidArgument);
    CHECK_THROWS(b.apply({{"devices", "three"}}));
  }
  SUBCASE("load_config") {
    TempDir dir("config");
    std::ofstream(dir.path / "c.cfg") << "# desk run\ndevices = 4\n\nkref=shared\npatch=256\n";
    const ExperimentConfig loaded = load_config(dir.path / "c.cfg");
    CHECK(loaded.devices == 4);
    CHECK(loaded.patch == 256);
    CHECK_FALSE(loaded.leave_one_out);
    CHECK_THROWS_AS(load_config(dir.path / "missing.cfg"), IoError);
  }
}

TEST_CASE("persistence") {
  TempDir dir("persist");
  SUBCASE("doubles") {
    for (double v : {0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, 0.0}) CHECK(parse_double(format_double(v)) == v);
    CHECK(std::isnan(parse_double(format_double(std::nan("")))));
    CHECK(std::isinf(parse_double(format_double(std::numeric_limits<double>::infinity()))));
    CHECK_THROWS(parse_double("1.5x"));
  }
  SUBCASE("emphasis curve") {
    EmphasisCurve c;
    c.edges = uniform_edges(5);
    c.values = {0.1, 0.2, 1.0 / 3.0, 0.0, 0.5};
    c.counts = {10, 20, 30, 0, 50};
    c.scale = 1.25;
    write_emphasis_csv(dir.path / "e.csv", c);
    const EmphasisCurve r = read_emphasis_csv(dir.path / "e.csv");
    CHECK(r.values == c.values);
    CHECK(r.counts == c.counts);
    CHECK(r.scale == c.scale);
    for (std::size_t i = 0; i < c.edges.size(); ++i) CHECK(r.edges[i] == doctest::Approx(c.edges[i]).epsilon(1e-15));
    CHECK(slurp(dir.path / "e.csv").rfind("bin_center,value,count\n", 0) == 0);
  }
  SUBCASE("transfer curve") {
    TransferCurve t;
    t.grid = {0.1, 0.5, 1.0};
    t.values = {0.1, 0.7, 1.0};
    t.a = 0.37;
    t.epsilon = 0.1;
    write_transfer_csv(dir.path / "h.csv", t);
    const TransferCurve r = read_transfer_csv(dir.path / "h.csv");
    CHECK(r.grid == t.grid);
    CHECK(r.values == t.values);
    CHECK(r.a == t.a);
    CHECK(r.epsilon == t.epsilon);
  }
  SUBCASE("scores") {
    std::vector<DetectionScore> s{score(12.5, true), score(3.0, false)};
    s[0].shift = {3, 4};
    write_scores_csv(dir.path / "s.csv", s);
    const auto r = read_scores_csv(dir.path / "s.csv");
    REQUIRE(r.size() == 2);
    CHECK(r[0].pce == 12.5);
    CHECK(r[0].shift == Shift{3, 4});
    CHECK(r[0].aligned);
    CHECK(r[0].label == Hypothesis::H1);
    CHECK(r[1].label == Hypothesis::H0);
    CHECK(slurp(dir.path / "s.csv").rfind("pce,shift_row,shift_col,aligned,label\n", 0) == 0);
  }
  SUBCASE("fingerprint with metadata") {
    FingerprintEstimate fp;
    fp.plane = oracle::gaussian_plane(1, 5, 7);
    fp.scheme = WeightScheme::fixed_parabola().with_gain(2.0);
    fp.source_count = 15;
    fp.starved = 3;
    write_fingerprint(dir.path / "fp.bin", fp);
    KeyValues meta;
    CHECK(read_fingerprint(dir.path / "fp.bin", &meta) == fp.plane);
    CHECK(meta.at("scheme") == "fixed");
    CHECK(meta.at("source_count") == "15");
    CHECK(meta.at("starved") == "3");
  }
  SUBCASE("residual pair") {
    ResidualPair p{oracle::gaussian_plane(2, 4, 6), oracle::uniform_plane(3, 4, 6), true};
    write_residual_pair(dir.path / "r", p);
    const ResidualPair r = read_residual_pair(dir.path / "r");
    CHECK(r.residual == p.residual);
    CHECK(r.denoised == p.denoised);
  }
  SUBCASE("roc csv") {
    RocCurve c;
    c.points = {{0, 0, std::numeric_limits<double>::infinity()}, {0.5, 0.25, 7}};
    c.tpr_ceiling = 0.75;
    write_roc_csv(dir.path / "roc.csv", c);
    CHECK(slurp(dir.path / "roc.csv") == "fpr,tpr,threshold\n0,0,inf\n0.5,0.25,7\ntpr_ceiling,0.75\n");
  }
}

TEST_CASE("image io") {
  TempDir dir("imageio");
  const ImagePlane g = oracle::uniform_plane(1, 9, 13);
  SUBCASE("png16 gray and rgb") {
    write_png16(dir.path / "g.png", {g});
    const auto r = load_image(dir.path / "g.png");
    REQUIRE(r.size() == 1);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(r[0][i] - g[i]) <= 0.5 / 65535.0 + 1e-12);
    write_png16(dir.path / "c.png", {g, g * 0.5, g * 0.25});
    CHECK(load_image(dir.path / "c.png").size() == 3);
  }
  SUBCASE("tiff 8 and 16 bit") {
    write_tiff(dir.path / "a.tif", {g}, 16);
    const auto a = load_image(dir.path / "a.tif");
    REQUIRE(a.size() == 1);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(a[0][i] - g[i]) <= 0.5 / 65535.0 + 1e-12);
    write_tiff(dir.path / "b.tiff", {g, g, g * 0.5}, 8);
    const auto b = load_image(dir.path / "b.tiff");
    REQUIRE(b.size() == 3);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(b[2][i] - 0.5 * g[i]) <= 0.5 / 255.0 + 1e-12);
  }
  SUBCASE("plane files") {
    write_plane(dir.path / "p.bin", g);
    CHECK(load_image(dir.path / "p.bin")[0] == g);
  }
  SUBCASE("corrupt and unsupported files") {
    std::ofstream(dir.path / "bad.png") << "not a png";
    std::ofstream(dir.path / "bad.tif") << "II*\0garbage";
    std::ofstream(dir.path / "x.jpg") << "jpeg";
    CHECK_THROWS_AS(load_image(dir.path / "bad.png"), IoError);
    CHECK_THROWS_AS(load_image(dir.path / "bad.tif"), IoError);
    CHECK_THROWS_AS(load_image(dir.path / "x.jpg"), IoError);
    CHECK_THROWS_AS(load_image(dir.path / "missing.png"), IoError);
    CHECK(is_image_file("a.PNG"));
    CHECK(is_image_file("a.tiff"));
    CHECK_FALSE(is_image_file("a.jpg"));
  }
}

TEST_CASE("ingest") {
  TempDir data("ingest_data"), cache("ingest_cache");
  SUBCASE("empty directory") {
    const IngestReport r = ingest(data.path, cache.path, DenoiseParams{}, true);
    CHECK(r.entries.empty());
    CHECK(r.errors.empty());
    CHECK(read_manifest(cache.path).empty());
    CHECK(slurp(cache.path / "manifest.csv") == "device,path,height,width,checksum,residual\n");
  }
  SUBCASE("idempotence and corrupt files") {
    for (const char* dev : {"camA", "camB"}) {
      fs::create_directories(data.path / "device" / dev);
      for (int i = 0; i < 2; ++i)
        write_png16(data.path / "device" / dev / ("img" + std::to_string(i) + ".png"),
                    {oracle::uniform_plane(std::hash<std::string>{}(dev) + i, 32, 40)});
    }
    std::ofstream(data.path / "device" / "camB" / "broken.png") << "\x89PNG truncated";
    const IngestReport first = ingest(data.path, cache.path, DenoiseParams{}, true);
    CHECK(first.entries.size() == 4);
    CHECK(first.computed == 4);
    REQUIRE(first.errors.size() == 1);
    CHECK(first.errors[0].first.find("broken.png") != std::string::npos);
    CHECK(slurp(cache.path / "errors.csv").find("broken.png") != std::string::npos);
    const auto manifest = read_manifest(cache.path);
    REQUIRE(manifest.size() == 4);
    CHECK(manifest[0].height == 32);
    CHECK(manifest[0].width == 40);
    CHECK(manifest[0].checksum == file_checksum(data.path / manifest[0].path));

    const IngestReport second = ingest(data.path, cache.path, DenoiseParams{}, true);
    CHECK(second.computed == 0);
    CHECK(second.skipped == 4);

    DenoiseParams other;
    other.sigma0 = 5.0;
    CHECK(ingest(data.path, cache.path, other, true).computed == 4);

    const CachedDataset ds(cache.path);
    CHECK(ds.device_count() == 2);
    CHECK(ds.device_name(0) == "camA");
    CHECK(ds.image_count(1) == 2);
    CHECK(ds.load(1, 0).residual.height() == 32);
  }
  SUBCASE("missing root") { CHECK_THROWS_AS(ingest(data.path / "nope", cache.path, DenoiseParams{}, true), IoError); }
}

TEST_CASE("experiment protocol") {
  const ExperimentConfig cfg = tiny_config();
  SUBCASE("splits are disjoint and sized") {
    for (std::size_t s = 0; s < 5; ++s) {
      const SplitIndices sp = draw_splits(cfg, s, 1, 9);
      std::set<std::size_t> all;
      all.insert(sp.emphasis.begin(), sp.emphasis.end());
      all.insert(sp.train.begin(), sp.train.end());
      all.insert(sp.test.begin(), sp.test.end());
      CHECK(sp.emphasis.size() == 3);
      CHECK(sp.train.size() == 3);
      CHECK(sp.test.size() == 2);
      CHECK(all.size() == 8);
      CHECK(*all.rbegin() < 9);
    }
    CHECK_THROWS_AS(draw_splits(cfg, 0, 0, 7), InvalidArgument);
  }
  SUBCASE("end-to-end run") {
    const ExperimentResult r = run_device_id(cfg);
    REQUIRE(r.schemes.size() == 3);
    CHECK(r.schemes[0].scheme == "baseline");
    CHECK(r.schemes[1].scheme == "emphasis");
    CHECK(r.schemes[2].scheme == "fixed");
    for (const auto& s : r.schemes) {
      CHECK(s.h1.size() == 2 * 2 * 1 * 2 * 2);
      CHECK(s.h0.size() == 2 * 2 * 1 * 2 * 3);
      for (const auto& x : s.h1) CHECK((x.aligned || x.label == Hypothesis::H0));
      for (const auto& x : s.h0) CHECK(x.label == Hypothesis::H0);
      for (std::size_t i = 1; i < s.pooled.points.size(); ++i) {
        CHECK(s.pooled.points[i].fpr >= s.pooled.points[i - 1].fpr);
        CHECK(s.pooled.points[i].tpr <= s.pooled.tpr_ceiling);
      }
    }
    for (std::size_t d = 0; d < 2; ++d)
      for (const SplitIndices& sp : r.splits[d]) {
        std::set<std::size_t> all(sp.emphasis.begin(), sp.emphasis.end());
        all.insert(sp.train.begin(), sp.train.end());
        all.insert(sp.test.begin(), sp.test.end());
        CHECK(all.size() == 8);
      }

    TempDir a("exp_a"), b("exp_b");
    write_experiment(r, a.path);
    write_experiment(run_device_id(cfg), b.path);
    for (const auto& entry : fs::directory_iterator(a.path)) {
      const auto name = entry.path().filename();
      if (name == "run_manifest.txt") continue;
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b.path / name), name.string());
    }
    CHECK(fs::exists(a.path / "summary.csv"));
    CHECK(fs::exists(a.path / "splits.csv"));
    CHECK(fs::exists(a.path / "roc_emphasis.csv"));
  }
  SUBCASE("insufficient residuals are reported per device") {
    struct Short : ResidualSource {
      std::size_t device_count() const override { return 2; }
      std::string device_name(std::size_t d) const override { return d ? "b" : "a"; }
      std::size_t image_count(std::size_t d) const override { return d ? 4 : 9; }
      ResidualPair load(std::size_t, std::size_t) const override { return {}; }
    } src;
    try {
      run_device_id(cfg, src);
      FAIL("expected rejection");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("b has 4") != std::string::npos);
    }
  }
}
