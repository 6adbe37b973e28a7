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

#include <cmath>
#include <filesystem>

#include "cim/raster_io.hpp"
#include "cim/stream.hpp"
#include "cim/translate.hpp"
#include "doctest.h"

using namespace cim;
namespace fs = std::filesystem;

namespace {

nn::ResUNet<float> small_net(uint64_t seed = 21) {
  nn::NetworkConfig cfg;
  cfg.encoder_channels = {2, 2, 4, 4};
  cfg.bottleneck_channels = 4;
  cfg.seed = seed;
  return nn::ResUNet<float>(cfg);
}

PipelineConfig synthetic_config(int frames, int depth) {
  PipelineConfig cfg;
  cfg.source = PipelineConfig::Source::Synthetic;
  cfg.frames = frames;
  cfg.frame_size = 64;
  cfg.queue_depth = depth;
  cfg.seed = 99;
  return cfg;
}

DemodConfig demod_config() {
  DemodConfig d;
  d.carrier_u = 0.25;
  d.filter_radius = 0.2;
  return d;
}

// The lossless contract reference: same frames, same network, one at a time.
std::vector<PhaseMap> sequential_reference(const PipelineConfig& cfg, nn::ResUNet<float>& net,
                                           const DemodConfig& demod) {
  std::vector<PhaseMap> out;
  for (int i = 0; i < cfg.frames; ++i) {
    const PhaseMap phase = demodulate_hilbert(synthetic_frame(cfg, i), demod);
    out.push_back(infer_full(net, phase));
  }
  return out;
}

void check_outputs_match(const std::vector<PhaseMap>& got, const std::vector<PhaseMap>& want) {
  REQUIRE(got.size() == want.size());
  for (size_t i = 0; i < got.size(); ++i) {
    REQUIRE(got[i].values.same_shape(want[i].values));
    double max_err = 0.0;
    for (size_t j = 0; j < got[i].values.size(); ++j)
      max_err = std::max(max_err,
                         std::abs(static_cast<double>(got[i].values.data[j]) -
                                  want[i].values.data[j]));
    INFO("frame ", i);
    CHECK(max_err < 1e-6);
  }
}

}  // namespace

TEST_CASE("pipelined output equals the sequential path at several queue depths") {
  auto net = small_net();
  const DemodConfig demod = demod_config();
  const PipelineConfig base = synthetic_config(12, 1);
  const std::vector<PhaseMap> want = sequential_reference(base, net, demod);
  for (int depth : {1, 2, 8}) {
    PipelineConfig cfg = synthetic_config(12, depth);
    const PipelineResult r = run_pipeline(cfg, net, demod);
    INFO("queue depth ", depth);
    check_outputs_match(r.outputs, want);
    CHECK(r.report.frames_dropped == 0);
    CHECK(r.report.frames_processed == 12);
    CHECK(r.report.frame_errors.empty());
    CHECK(!r.report.partial);
  }
}

TEST_CASE("warm-up inferences do not change the streamed outputs") {
  auto net = small_net();
  const DemodConfig demod = demod_config();
  PipelineConfig cold = synthetic_config(4, 2);
  PipelineConfig warm = synthetic_config(4, 2);
  warm.warmup_frames = 3;
  const PipelineResult a = run_pipeline(cold, net, demod);
  const PipelineResult b = run_pipeline(warm, net, demod);
  REQUIRE(a.outputs.size() == b.outputs.size());
  for (size_t i = 0; i < a.outputs.size(); ++i)
    CHECK(a.outputs[i].values.data == b.outputs[i].values.data);
}

TEST_CASE("resident frame count stays within the bounded-buffer budget") {
  auto net = small_net();
  const DemodConfig demod = demod_config();
  for (int depth : {1, 2}) {
    PipelineConfig cfg = synthetic_config(10, depth);
    const PipelineResult r = run_pipeline(cfg, net, demod);
    // Four queues of `depth` frames plus one in flight per stage thread.
    CHECK(r.report.peak_resident_frames <= static_cast<size_t>(4 * depth + 5));
    CHECK(r.report.peak_resident_frames >= 1);
  }
}

TEST_CASE("an empty stream produces a valid, zeroed report") {
  auto net = small_net();
  const PipelineResult r = run_pipeline(synthetic_config(0, 2), net, demod_config());
  CHECK(r.outputs.empty());
  CHECK(r.report.frames_processed == 0);
  CHECK(r.report.frames_dropped == 0);
  CHECK(r.report.frame_errors.empty());
  CHECK(!r.report.partial);
}

TEST_CASE("per-frame stage failures are flagged, never dropped silently") {
  auto net = small_net();
  DemodConfig bad = demod_config();
  bad.filter_radius = 0.3;  // >= carrier: demodulation rejects every frame
  const PipelineResult r = run_pipeline(synthetic_config(5, 2), net, bad);
  CHECK(r.outputs.empty());
  CHECK(r.report.frame_errors.size() == 5);
  CHECK(r.report.frames_dropped == 0);
}

TEST_CASE("directory replay matches the synthetic frames it was written from") {
  const auto dir = fs::temp_directory_path() / "cim_stream_replay";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto net = small_net();
  const DemodConfig demod = demod_config();
  PipelineConfig cfg = synthetic_config(3, 2);
  for (int i = 0; i < cfg.frames; ++i)
    save_interferogram((dir / ("frame" + std::to_string(i))).string(),
                       synthetic_frame(cfg, i));
  const std::vector<PhaseMap> want = sequential_reference(cfg, net, demod);

  PipelineConfig replay = cfg;
  replay.source = PipelineConfig::Source::Directory;
  replay.source_dir = dir.string();
  const PipelineResult r = run_pipeline(replay, net, demod);
  check_outputs_match(r.outputs, want);
  fs::remove_all(dir);
}

TEST_CASE("a missing frame directory is rejected up front") {
  auto net = small_net();
  PipelineConfig cfg;
  cfg.source = PipelineConfig::Source::Directory;
  cfg.source_dir = "/nonexistent/frames";
  CHECK_THROWS_AS(run_pipeline(cfg, net, demod_config()), DataError);
}

TEST_CASE("invalid queue depth is rejected") {
  auto net = small_net();
  CHECK_THROWS_AS(run_pipeline(synthetic_config(1, 0), net, demod_config()),
                  std::invalid_argument);
}

TEST_CASE("overlapped warm-up runs the source initializer exactly once") {
  auto net = small_net();
  int calls = 0;
  warmup_overlapped(net, 2, 64, [&] { ++calls; });
  CHECK(calls == 1);
}
