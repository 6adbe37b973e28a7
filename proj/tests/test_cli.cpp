// Copyright 2026 the cim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end tests over the installed `cim` binary; the harness passes its
// location in the CIM_BIN environment variable.

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string cim_bin() {
  const char* bin = std::getenv("CIM_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

RunResult run(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "cim_cli_out.txt";
  const std::string cmd = cim_bin() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(log);
  std::ostringstream buf;
  buf << f.rdbuf();
  r.output = buf.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const nlohmann::json& j) {
  const fs::path path = dir / "config.json";
  std::ofstream(path) << j.dump(2) << "\n";
  return path.string();
}

std::vector<float> read_f32(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::vector<char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() % 4 == 0);
  std::vector<float> out(bytes.size() / 4);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

nlohmann::json small_phantom_config() {
  return {{"phantom",
           {{"width", 64}, {"height", 64}, {"pixel_size_um", 0.05}, {"blobs", {{"count", 3}}}}}};
}

}  // namespace

TEST_CASE("--help exits zero for the app and every subcommand") {
  CHECK(run("--help").code == 0);
  CHECK(run("phantom --help").code == 0);
  CHECK(run("train --help").code == 0);
}

TEST_CASE("missing required options are usage errors") {
  const RunResult r = run("render-dpm");
  CHECK(r.code == 1);
}

TEST_CASE("the bead phantom hits its closed-form peak phase") {
  const fs::path dir = fresh_dir("cim_cli_bead");
  nlohmann::json cfg = small_phantom_config();
  const std::string config = write_config(dir, cfg);
  const RunResult r =
      run("phantom --kind bead --config " + config + " --out " + dir.string());
  REQUIRE(r.code == 0);
  float peak = 0.0f;
  for (float v : read_f32(dir / "phantom.f32")) peak = std::max(peak, v);
  // 1 um bead, refractive increment 0.070, 623 nm line.
  const double expected = 2.0 * 3.14159265358979 * 0.07 * 1.0 / 0.623;
  CHECK(peak == doctest::Approx(expected).epsilon(0.01));
  // The effective config is echoed next to the outputs.
  CHECK(fs::exists(dir / "config.phantom.json"));
}

TEST_CASE("unknown config keys are rejected by their dotted path") {
  const fs::path dir = fresh_dir("cim_cli_badkey");
  nlohmann::json cfg = {{"phantom", {{"widht", 64}}}};
  const RunResult r = run("phantom --config " + write_config(dir, cfg) + " --out " +
                          dir.string());
  CHECK(r.code == 1);
  CHECK(r.output.find("phantom.widht") != std::string::npos);
}

TEST_CASE("a missing input file is a data error, exit code 2") {
  const fs::path dir = fresh_dir("cim_cli_missing");
  const RunResult r =
      run("render-dpm --input /nonexistent/phantom --out " + dir.string());
  CHECK(r.code == 2);
}

TEST_CASE("phantom output is byte-identical across reruns of the same seed") {
  const fs::path a = fresh_dir("cim_cli_rep_a");
  const fs::path b = fresh_dir("cim_cli_rep_b");
  const std::string config = write_config(a, small_phantom_config());
  REQUIRE(run("phantom --config " + config + " --seed 7 --out " + a.string()).code == 0);
  REQUIRE(run("phantom --config " + config + " --seed 7 --out " + b.string()).code == 0);
  CHECK(read_bytes(a / "phantom.f32") == read_bytes(b / "phantom.f32"));
}

TEST_CASE("render and reconstruct round-trip through the CLI for both modalities") {
  const fs::path dir = fresh_dir("cim_cli_roundtrip");
  nlohmann::json cfg = small_phantom_config();
  cfg["phantom"]["pixel_size_um"] = 0.3;
  cfg["dpm"]["noise"] = {{"speckle_correlation_px", 0.0}, {"speckle_contrast", 0.0},
                         {"read_noise_sigma", 0.0}};
  cfg["demod"]["filter_radius"] = 0.2;
  const std::string config = write_config(dir, cfg);
  const std::string common = " --config " + config + " --out " + dir.string();
  REQUIRE(run("phantom --kind blobs" + common).code == 0);
  REQUIRE(run("render-dpm --input " + (dir / "phantom").string() + common).code == 0);
  REQUIRE(run("reconstruct-dpm --input " + (dir / "dpm").string() + common).code == 0);
  CHECK(fs::exists(dir / "dpm_phase.f32"));
  REQUIRE(run("render-slim --input " + (dir / "phantom").string() + common).code == 0);
  REQUIRE(run("reconstruct-slim --input " + (dir / "slim").string() + common).code == 0);
  CHECK(fs::exists(dir / "slim_phase.f32"));
}

TEST_CASE("a dataset, a zero-epoch training run, and eval chain together") {
  const fs::path dir = fresh_dir("cim_cli_train0");
  nlohmann::json cfg = small_phantom_config();
  cfg["phantom"]["pixel_size_um"] = 0.3;
  cfg["demod"]["filter_radius"] = 0.2;
  cfg["network"] = {{"encoder_channels", {2, 2, 4, 4}}, {"bottleneck_channels", 4}};
  const std::string config = write_config(dir, cfg);
  const std::string common = " --config " + config + " --out " + dir.string();
  REQUIRE(run("make-dataset --count 8" + common).code == 0);
  REQUIRE(fs::exists(dir / "manifest.json"));

  const RunResult t =
      run("train --manifest " + (dir / "manifest.json").string() + " --epochs 0" + common);
  REQUIRE(t.code == 0);
  REQUIRE(fs::exists(dir / "weights.h5"));
  const auto log = nlohmann::json::parse(std::ifstream(dir / "trainlog.json"));
  CHECK(log.at("train_loss").empty());

  const RunResult e = run("eval --manifest " + (dir / "manifest.json").string() +
                          " --weights " + (dir / "weights.h5").string() + " --split test" + common);
  CHECK(e.code == 0);
  CHECK(fs::exists(dir / "eval.test.json"));
}

TEST_CASE("the stream benchmark emits a report with the lossless counters") {
  const fs::path dir = fresh_dir("cim_cli_bench");
  nlohmann::json cfg;
  cfg["network"] = {{"encoder_channels", {2, 2, 4, 4}}, {"bottleneck_channels", 4}};
  cfg["demod"]["filter_radius"] = 0.2;
  cfg["pipeline"] = {{"warmup_frames", 1}};
  const std::string config = write_config(dir, cfg);
  const RunResult r = run("stream-bench --frames 4 --frame-size 64 --queue-depth 2 --config " +
                          config + " --out " + dir.string());
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(std::ifstream(dir / "bench.json"));
  CHECK(report.at("frames_processed").get<int>() == 4);
  CHECK(report.at("frames_dropped").get<int>() == 0);
  CHECK(report.at("clock") == "monotonic");
  CHECK(report.at("percentile_definition") == "nearest-rank");
}
