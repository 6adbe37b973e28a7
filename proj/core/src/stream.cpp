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

#include "cim/stream.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cim/dataset.hpp"
#include "cim/phantom.hpp"
#include "cim/raster_io.hpp"
#include "cim/translate.hpp"
#include "json.hpp"

namespace cim {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

constexpr int kStages = 4;  // demodulate, normalize, infer, denormalize

struct Frame {
  size_t index = 0;
  Interferogram ig;
  PhaseMap phase;
  Rasterf norm;
  PhaseMap out;
  std::string error;
  Clock::time_point t_emit;
  double stage_ms[kStages] = {0, 0, 0, 0};
};

/// Blocking bounded FIFO with close-to-drain semantics.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(size_t capacity) : cap_(capacity) {}

  void push(T item) {
    std::unique_lock lk(mu_);
    not_full_.wait(lk, [&] { return q_.size() < cap_; });
    q_.push_back(std::move(item));
    not_empty_.notify_one();
  }

  bool pop(T& out) {
    std::unique_lock lk(mu_);
    not_empty_.wait(lk, [&] { return !q_.empty() || closed_; });
    if (q_.empty()) return false;
    out = std::move(q_.front());
    q_.pop_front();
    not_full_.notify_one();
    return true;
  }

  void close() {
    std::lock_guard lk(mu_);
    closed_ = true;
    not_empty_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> q_;
  size_t cap_;
  bool closed_ = false;
};

struct ResidentGauge {
  std::atomic<size_t> current{0};
  std::atomic<size_t> peak{0};

  void inc() {
    const size_t now = current.fetch_add(1) + 1;
    size_t prev = peak.load();
    while (prev < now && !peak.compare_exchange_weak(prev, now)) {
    }
  }
  void dec() { current.fetch_sub(1); }
};

StagePercentiles percentiles(const std::string& name, std::vector<double> samples) {
  StagePercentiles s;
  s.name = name;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  auto rank = [&](double q) {
    // Nearest-rank: the ceil(q*N)-th smallest sample.
    const size_t n = samples.size();
    size_t r = static_cast<size_t>(std::ceil(q * static_cast<double>(n)));
    r = std::clamp<size_t>(r, 1, n);
    return samples[r - 1];
  };
  s.p50_ms = rank(0.50);
  s.p90_ms = rank(0.90);
  s.p99_ms = rank(0.99);
  return s;
}

std::vector<std::string> list_directory_frames(const std::string& dir) {
  if (!fs::is_directory(dir)) throw DataError("frame directory not found: " + dir);
  std::vector<std::string> bases;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& p = entry.path();
    if (p.extension() != ".json") continue;
    fs::path base = p;
    base.replace_extension();
    if (base.extension() == ".mask") continue;
    bases.push_back(base.string());
  }
  std::sort(bases.begin(), bases.end());
  if (bases.empty()) throw DataError("no frames in directory: " + dir);
  return bases;
}

}  // namespace

Interferogram synthetic_frame(const PipelineConfig& cfg, int index) {
  BlobFieldSpec spec;
  spec.seed = cfg.seed + static_cast<uint64_t>(index);
  spec.count = 6;
  spec.radius_min_um = cfg.frame_size * 0.04;
  spec.radius_max_um = cfg.frame_size * 0.12;
  PhaseMap phase = blob_field(spec, cfg.frame_size, cfg.frame_size, 1.0, 532.0);
  DpmNoiseParams noise;
  noise.speckle_correlation_px = 3.0;
  noise.speckle_contrast = 0.05;
  noise.read_noise_sigma = 0.01;
  noise.seed = cfg.seed ^ (0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(index));
  return render_dpm(phase, 0.25, 0.0, noise);
}

void warmup_overlapped(nn::ResUNet<float>& net, int warmup_frames, int frame_size,
                       const std::function<void()>& source_init) {
  std::exception_ptr warmup_error;
  std::thread warm([&] {
    try {
      Rasterf dummy(frame_size, frame_size, 0.5f);
      for (int i = 0; i < warmup_frames; ++i) infer_normalized(net, dummy);
    } catch (...) {
      warmup_error = std::current_exception();
    }
  });
  if (source_init) source_init();
  warm.join();
  if (warmup_error) std::rethrow_exception(warmup_error);
}

PipelineResult run_pipeline(PipelineConfig cfg, nn::ResUNet<float>& net,
                            const DemodConfig& demod) {
  if (cfg.queue_depth < 1) throw std::invalid_argument("queue_depth must be >= 1");
  if (cfg.source == PipelineConfig::Source::Synthetic && cfg.frames < 0)
    throw std::invalid_argument("synthetic frame count must be nonnegative");

  // Source initialization (directory scan) overlaps the warm-up inferences.
  std::vector<std::string> bases;
  std::exception_ptr init_error;
  warmup_overlapped(net, cfg.warmup_frames, cfg.frame_size, [&] {
    if (cfg.source != PipelineConfig::Source::Directory) return;
    try {
      bases = list_directory_frames(cfg.source_dir);
    } catch (...) {
      init_error = std::current_exception();
    }
  });
  if (init_error) std::rethrow_exception(init_error);

  const size_t depth = static_cast<size_t>(cfg.queue_depth);
  BoundedQueue<Frame> q_demod(depth), q_norm(depth), q_infer(depth), q_sink(depth);
  ResidentGauge gauge;
  std::atomic<bool> source_failed{false};

  const Clock::time_point start = Clock::now();

  std::thread source([&] {
    const size_t total =
        cfg.source == PipelineConfig::Source::Directory ? bases.size()
                                                        : static_cast<size_t>(cfg.frames);
    for (size_t i = 0; i < total; ++i) {
      Frame f;
      f.index = i;
      try {
        if (cfg.source == PipelineConfig::Source::Directory)
          f.ig = load_interferogram(bases[i]);
        else
          f.ig = synthetic_frame(cfg, static_cast<int>(i));
      } catch (const std::exception& e) {
        if (cfg.source == PipelineConfig::Source::Directory) {
          // Mid-stream source failure: stop emitting and let the rest drain.
          source_failed.store(true);
          break;
        }
        f.error = e.what();
      }
      f.t_emit = Clock::now();
      gauge.inc();
      q_demod.push(std::move(f));
    }
    q_demod.close();
  });

  std::thread demod_stage([&] {
    Frame f;
    while (q_demod.pop(f)) {
      const auto t0 = Clock::now();
      if (f.error.empty()) {
        try {
          if (cfg.demod_stage) {
            f.phase = demodulate_hilbert(f.ig, demod);
          } else {
            f.phase.values = f.ig.intensity;
            f.phase.pixel_size_um = f.ig.pixel_size_um;
            f.phase.wavelength_nm = f.ig.wavelength_nm;
          }
          f.ig = Interferogram{};  // raw frame no longer needed
        } catch (const std::exception& e) {
          f.error = e.what();
        }
      }
      f.stage_ms[0] = ms_between(t0, Clock::now());
      q_norm.push(std::move(f));
    }
    q_norm.close();
  });

  std::thread norm_stage([&] {
    Frame f;
    while (q_norm.pop(f)) {
      const auto t0 = Clock::now();
      if (f.error.empty()) {
        try {
          f.norm = normalize_phase(f.phase);
        } catch (const std::exception& e) {
          f.error = e.what();
        }
      }
      f.stage_ms[1] = ms_between(t0, Clock::now());
      q_infer.push(std::move(f));
    }
    q_infer.close();
  });

  std::thread infer_stage([&] {
    Frame f;
    while (q_infer.pop(f)) {
      const auto t0 = Clock::now();
      if (f.error.empty()) {
        try {
          f.norm = infer_normalized(net, f.norm);
        } catch (const std::exception& e) {
          f.error = e.what();
        }
      }
      f.stage_ms[2] = ms_between(t0, Clock::now());
      q_sink.push(std::move(f));
    }
    q_sink.close();
  });

  PipelineResult result;
  std::vector<double> stage_samples[kStages];
  std::vector<double> end_to_end;

  // Denormalization and report collection share the sink thread (the caller's).
  {
    Frame f;
    while (q_sink.pop(f)) {
      const auto t0 = Clock::now();
      if (f.error.empty()) {
        f.out = denormalize_phase(f.norm, f.phase.pixel_size_um, 623.0);
        f.out.valid = f.phase.valid;
      }
      f.stage_ms[3] = ms_between(t0, Clock::now());
      gauge.dec();
      if (f.error.empty()) {
        for (int s = 0; s < kStages; ++s) stage_samples[s].push_back(f.stage_ms[s]);
        end_to_end.push_back(ms_between(f.t_emit, Clock::now()));
        result.outputs.push_back(std::move(f.out));
      } else {
        result.report.frame_errors.push_back("frame " + std::to_string(f.index) + ": " +
                                             f.error);
      }
    }
  }
  source.join();
  demod_stage.join();
  norm_stage.join();
  infer_stage.join();

  const double wall_s = ms_between(start, Clock::now()) / 1000.0;
  LatencyReport& rep = result.report;
  const char* names[kStages] = {cfg.demod_stage ? "demodulate" : "pass-through", "normalize",
                                "infer", "denormalize"};
  for (int s = 0; s < kStages; ++s) rep.stages.push_back(percentiles(names[s], stage_samples[s]));
  rep.end_to_end = percentiles("end-to-end", end_to_end);
  rep.frames_processed = result.outputs.size();
  rep.frames_dropped = 0;
  rep.throughput_fps = wall_s > 0.0 ? static_cast<double>(rep.frames_processed) / wall_s : 0.0;
  rep.peak_resident_frames = gauge.peak.load();
  rep.partial = source_failed.load();
  rep.queue_depth = cfg.queue_depth;
  rep.frame_size = cfg.frame_size;
  return result;
}

void save_bench_report(const std::string& path, const LatencyReport& report) {
  json j;
  j["clock"] = "monotonic";
  j["percentile_definition"] = "nearest-rank";
  j["host_threads"] = std::thread::hardware_concurrency();
  j["queue_depth"] = report.queue_depth;
  j["frame_size"] = report.frame_size;
  j["frames_processed"] = report.frames_processed;
  j["frames_dropped"] = report.frames_dropped;
  j["peak_resident_frames"] = report.peak_resident_frames;
  j["throughput_fps"] = report.throughput_fps;
  j["partial"] = report.partial;
  j["frame_errors"] = report.frame_errors;
  auto stage_json = [](const StagePercentiles& s) {
    return json{{"name", s.name}, {"p50_ms", s.p50_ms}, {"p90_ms", s.p90_ms},
                {"p99_ms", s.p99_ms}};
  };
  j["stages"] = json::array();
  for (const auto& s : report.stages) j["stages"].push_back(stage_json(s));
  j["end_to_end"] = stage_json(report.end_to_end);
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

std::string format_bench_report(const LatencyReport& report) {
  std::ostringstream out;
  out << "frames: " << report.frames_processed << "  dropped: " << report.frames_dropped
      << "  throughput: " << report.throughput_fps << " fps\n";
  out << "queue depth: " << report.queue_depth << "  frame size: " << report.frame_size
      << "  peak resident frames: " << report.peak_resident_frames << "\n";
  out << "timing (monotonic clock, nearest-rank percentiles, ms)\n";
  out << "stage  p50  p90  p99\n";
  for (const auto& s : report.stages)
    out << s.name << "  " << s.p50_ms << "  " << s.p90_ms << "  " << s.p99_ms << "\n";
  out << report.end_to_end.name << "  " << report.end_to_end.p50_ms << "  "
      << report.end_to_end.p90_ms << "  " << report.end_to_end.p99_ms << "\n";
  if (report.partial) out << "WARNING: source failed mid-stream; report is partial\n";
  for (const auto& e : report.frame_errors) out << "error: " << e << "\n";
  return out.str();
}

}  // namespace cim
