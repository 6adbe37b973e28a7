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

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cim/dpm.hpp"
#include "cim/image.hpp"
#include "cim/nn/unet.hpp"

namespace cim {

struct PipelineConfig {
  enum class Source { Synthetic, Directory };
  Source source = Source::Synthetic;
  std::string source_dir;  // interferogram base paths for Directory replay
  int frames = 0;          // frame count for the synthetic generator
  int frame_size = 256;    // square synthetic frames, divisible by 16
  int queue_depth = 2;     // capacity of each inter-stage buffer, >= 1
  int warmup_frames = 0;   // dummy inferences overlapped with source init
  uint64_t seed = 0;       // synthetic generator seed
  bool demod_stage = true; // false: phase-in mode, frames bypass demodulation
};

struct StagePercentiles {
  std::string name;
  double p50_ms = 0.0, p90_ms = 0.0, p99_ms = 0.0;
};

struct LatencyReport {
  std::vector<StagePercentiles> stages;
  StagePercentiles end_to_end;
  double throughput_fps = 0.0;  // frames_processed / wall time
  size_t frames_processed = 0;
  size_t frames_dropped = 0;  // lossless contract: always 0
  size_t peak_resident_frames = 0;
  bool partial = false;  // source failed mid-stream; pipeline drained anyway
  std::vector<std::string> frame_errors;  // "frame <i>: <message>"
  int queue_depth = 0;
  int frame_size = 0;
  // Monotonic clock, nearest-rank percentiles.
};

struct PipelineResult {
  std::vector<PhaseMap> outputs;  // in input order, failed frames omitted
  LatencyReport report;
};

// Source -> [demodulate] -> normalize -> infer -> denormalize -> sink, one
// thread per stage, bounded blocking FIFOs in between. Never drops a frame;
// outputs equal the sequential demodulate + infer_full path.
PipelineResult run_pipeline(PipelineConfig cfg, nn::ResUNet<float>& net,
                            const DemodConfig& demod);

/// The deterministic frame the synthetic source emits at `index`; exposed so
/// a sequential reference can process the exact same inputs.
Interferogram synthetic_frame(const PipelineConfig& cfg, int index);

// Runs warmup_frames dummy inferences at frame_size concurrently with
// source_init; returns once both are done. Warm-up failure rethrows before
// any streaming starts.
void warmup_overlapped(nn::ResUNet<float>& net, int warmup_frames, int frame_size,
                       const std::function<void()>& source_init);

void save_bench_report(const std::string& path, const LatencyReport& report);
std::string format_bench_report(const LatencyReport& report);

}  // namespace cim
