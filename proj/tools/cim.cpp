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

// cim: command suite over the computational-interference-microscopy library.
// Every command reads an optional JSON config (--config), applies flag
// overrides (flags win), echoes the effective config into --out, and exits
// 0 on success, 1 on usage errors, 2 on data errors, 3 on numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cim/dataset.hpp"
#include "cim/dpm.hpp"
#include "cim/metrics.hpp"
#include "cim/phantom.hpp"
#include "cim/raster_io.hpp"
#include "cim/registration.hpp"
#include "cim/slim.hpp"
#include "cim/stream.hpp"
#include "cim/train.hpp"
#include "cim/translate.hpp"
#include "cim/weights_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Configuration. Defaults follow the reference experiment values; unknown
// keys are rejected with the offending dotted path.

json default_config() {
  return json{
      {"phantom",
       {{"kind", "blobs"},
        {"width", 400},
        {"height", 400},
        {"pixel_size_um", 0.3},
        {"wavelength_nm", 623.0},
        {"bead",
         {{"diameter_um", 1.0},
          {"n_bead", 1.588},
          {"n_medium", 1.518},
          {"center_x_px", -1.0},   // negative: centered on the raster
          {"center_y_px", -1.0}}},
        {"blobs",
         {{"count", 8},
          {"radius_min_um", 4.0},
          {"radius_max_um", 12.0},
          {"peak_phase_min", 0.1},
          {"peak_phase_max", 0.8}}}}},
      {"dpm",
       {{"wavelength_nm", 532.0},
        {"carrier_u", 0.25},
        {"carrier_v", 0.0},
        {"reference_radius", 0.02},
        {"noise",
         {{"speckle_correlation_px", 3.0},
          {"speckle_contrast", 0.08},
          {"parasitic_fringe_amplitude", 0.0},
          {"parasitic_u", 0.0},
          {"parasitic_v", 0.0},
          {"read_noise_sigma", 0.01},
          {"photon_scale", 0.0}}}}},
      {"demod",
       {{"filter_radius", 0.1},
        {"apodization", "raised-cosine"},
        {"anchor_background", true}}},
      {"slim",
       {{"wavelength_nm", 623.0},
        {"lowpass_radius", 0.04},
        {"noise", {{"photon_scale", 0.0}, {"read_noise_sigma", 0.0}}}}},
      {"registration", {{"nominal_scale", 2.5}, {"min_confidence", 0.03}}},
      {"dataset",
       {{"count", 200},
        {"train_ratio", 0.7},
        {"validation_ratio", 0.15},
        {"test_ratio", 0.15}}},
      {"network",
       {{"encoder_channels", {16, 32, 64, 128}},
        {"bottleneck_channels", 256},
        {"dropout_rate", 0.25},
        {"upsample", "transposed-conv"}}},
      {"training",
       {{"learning_rate", 6e-5},
        {"beta1", 0.9},
        {"beta2", 0.999},
        {"batch_size", 4},
        {"epochs", 1000},
        {"crop_size", 400},
        {"crops_per_image", 1}}},
      {"pipeline",
       {{"frames", 100},
        {"frame_size", 256},
        {"queue_depth", 2},
        {"warmup_frames", 2},
        {"demod_stage", true}}},
      {"seed", 0}};
}

void reject_unknown_keys(const json& config, const json& defaults, const std::string& prefix) {
  for (const auto& [key, value] : config.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key))
      throw std::invalid_argument("unknown config key: " + path);
    if (value.is_object() && defaults.at(key).is_object())
      reject_unknown_keys(value, defaults.at(key), path);
  }
}

json merge(json base, const json& overlay) {
  for (const auto& [key, value] : overlay.items()) {
    if (value.is_object() && base.contains(key) && base.at(key).is_object())
      base[key] = merge(base.at(key), value);
    else
      base[key] = value;
  }
  return base;
}

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  int64_t seed = -1;  // -1: keep the config's seed
  json cfg;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--out", out_dir, "Output directory (created if missing)");
    cmd->add_option("--seed", seed, "Random seed override");
  }

  void load() {
    cfg = default_config();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw cim::DataError("cannot open config: " + config_path);
      json user;
      try {
        f >> user;
      } catch (const json::parse_error& e) {
        throw cim::DataError("malformed config " + config_path + ": " + e.what());
      }
      reject_unknown_keys(user, cfg, "");
      cfg = merge(cfg, user);
    }
    if (seed >= 0) cfg["seed"] = static_cast<uint64_t>(seed);
    fs::create_directories(out_dir);
  }

  void echo(const std::string& command) const {
    json e = cfg;
    e["command"] = command;
    std::ofstream f(fs::path(out_dir) / ("config." + command + ".json"));
    f << e.dump(2) << "\n";
  }

  std::string path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }
  uint64_t rng_seed() const { return cfg.at("seed").get<uint64_t>(); }
};

cim::DpmNoiseParams dpm_noise_from(const json& cfg, uint64_t seed) {
  const json& n = cfg.at("dpm").at("noise");
  cim::DpmNoiseParams p;
  p.speckle_correlation_px = n.at("speckle_correlation_px").get<double>();
  p.speckle_contrast = n.at("speckle_contrast").get<double>();
  p.parasitic_fringe_amplitude = n.at("parasitic_fringe_amplitude").get<double>();
  p.parasitic_u = n.at("parasitic_u").get<double>();
  p.parasitic_v = n.at("parasitic_v").get<double>();
  p.read_noise_sigma = n.at("read_noise_sigma").get<double>();
  p.photon_scale = n.at("photon_scale").get<double>();
  p.seed = seed;
  return p;
}

cim::DemodConfig demod_from(const json& cfg) {
  cim::DemodConfig d;
  d.carrier_u = cfg.at("dpm").at("carrier_u").get<double>();
  d.carrier_v = cfg.at("dpm").at("carrier_v").get<double>();
  d.filter_radius = cfg.at("demod").at("filter_radius").get<double>();
  d.anchor_background = cfg.at("demod").at("anchor_background").get<bool>();
  const std::string apod = cfg.at("demod").at("apodization").get<std::string>();
  if (apod == "hard")
    d.apodization = cim::DemodConfig::Apodization::Hard;
  else if (apod == "raised-cosine")
    d.apodization = cim::DemodConfig::Apodization::RaisedCosine;
  else
    throw std::invalid_argument("unknown config value demod.apodization: " + apod);
  return d;
}

cim::SlimNoiseParams slim_noise_from(const json& cfg, uint64_t seed) {
  const json& n = cfg.at("slim").at("noise");
  return {n.at("photon_scale").get<double>(), n.at("read_noise_sigma").get<double>(), seed};
}

cim::nn::NetworkConfig network_from(const json& cfg, uint64_t seed) {
  const json& n = cfg.at("network");
  cim::nn::NetworkConfig c;
  c.encoder_channels = n.at("encoder_channels").get<std::vector<int>>();
  c.bottleneck_channels = n.at("bottleneck_channels").get<int>();
  c.dropout_rate = n.at("dropout_rate").get<double>();
  const std::string up = n.at("upsample").get<std::string>();
  if (up == "transposed-conv")
    c.upsample = cim::nn::NetworkConfig::Upsample::TransposedConv;
  else if (up == "nearest-conv")
    c.upsample = cim::nn::NetworkConfig::Upsample::NearestConv;
  else
    throw std::invalid_argument("unknown config value network.upsample: " + up);
  c.seed = seed;
  return c;
}

cim::TrainConfig train_from(const json& cfg) {
  const json& t = cfg.at("training");
  cim::TrainConfig c;
  c.learning_rate = t.at("learning_rate").get<double>();
  c.beta1 = t.at("beta1").get<double>();
  c.beta2 = t.at("beta2").get<double>();
  c.batch_size = t.at("batch_size").get<int>();
  c.epochs = t.at("epochs").get<int>();
  c.crop_size = t.at("crop_size").get<int>();
  c.crops_per_image = t.at("crops_per_image").get<int>();
  c.seed = cfg.at("seed").get<uint64_t>();
  return c;
}

cim::PhaseMap make_phantom(const json& cfg, const std::string& kind, uint64_t seed) {
  const json& p = cfg.at("phantom");
  const int w = p.at("width").get<int>();
  const int h = p.at("height").get<int>();
  const double px = p.at("pixel_size_um").get<double>();
  const double wl = p.at("wavelength_nm").get<double>();
  if (kind == "bead") {
    const json& b = p.at("bead");
    cim::BeadSpec spec;
    spec.diameter_um = b.at("diameter_um").get<double>();
    spec.n_bead = b.at("n_bead").get<double>();
    spec.n_medium = b.at("n_medium").get<double>();
    spec.center_x_px = b.at("center_x_px").get<double>();
    spec.center_y_px = b.at("center_y_px").get<double>();
    if (spec.center_x_px < 0) spec.center_x_px = w / 2;
    if (spec.center_y_px < 0) spec.center_y_px = h / 2;
    return cim::bead_phase(spec, w, h, px, wl);
  }
  if (kind == "blobs") {
    const json& b = p.at("blobs");
    cim::BlobFieldSpec spec;
    spec.seed = seed;
    spec.count = b.at("count").get<int>();
    spec.radius_min_um = b.at("radius_min_um").get<double>();
    spec.radius_max_um = b.at("radius_max_um").get<double>();
    spec.peak_phase_min = b.at("peak_phase_min").get<double>();
    spec.peak_phase_max = b.at("peak_phase_max").get<double>();
    return cim::blob_field(spec, w, h, px, wl);
  }
  throw std::invalid_argument("unknown phantom kind: " + kind);
}

std::vector<cim::SamplePair> load_split_pairs(const cim::DatasetManifest& manifest,
                                              const std::string& split) {
  std::vector<cim::SamplePair> pairs;
  for (const auto* e : manifest.split(split)) {
    const cim::PhaseMap in = cim::load_phase_map(e->dpm_path);
    const cim::PhaseMap out = cim::load_phase_map(e->slim_path);
    pairs.emplace_back(cim::normalize_phase(in), cim::normalize_phase(out));
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

int cmd_phantom(Common& c, const std::string& kind) {
  c.echo("phantom");
  const cim::PhaseMap map = make_phantom(c.cfg, kind, c.rng_seed());
  cim::save_phase_map(c.path("phantom"), map);
  float peak = 0.0f;
  for (float v : map.values.data) peak = std::max(peak, v);
  std::cout << "phantom " << kind << " " << map.width() << "x" << map.height() << " peak "
            << peak << " rad -> " << c.path("phantom") << "\n";
  return 0;
}

int cmd_render_dpm(Common& c, const std::string& input, bool with_blank) {
  c.echo("render-dpm");
  cim::PhaseMap phase = cim::load_phase_map(input);
  const double wl = c.cfg.at("dpm").at("wavelength_nm").get<double>();
  if (phase.wavelength_nm != wl) phase = cim::scale_wavelength(phase, wl);
  const double cu = c.cfg.at("dpm").at("carrier_u").get<double>();
  const double cv = c.cfg.at("dpm").at("carrier_v").get<double>();
  const double ref = c.cfg.at("dpm").at("reference_radius").get<double>();
  cim::save_interferogram(c.path("dpm"),
                          cim::render_dpm(phase, cu, cv, dpm_noise_from(c.cfg, c.rng_seed()), ref));
  if (with_blank) {
    cim::PhaseMap blank = phase;
    std::fill(blank.values.data.begin(), blank.values.data.end(), 0.0f);
    cim::save_interferogram(
        c.path("blank"),
        cim::render_dpm(blank, cu, cv, dpm_noise_from(c.cfg, c.rng_seed() + 1), ref));
  }
  std::cout << "rendered " << c.path("dpm") << (with_blank ? " (+blank)" : "") << "\n";
  return 0;
}

int cmd_render_slim(Common& c, const std::string& input) {
  c.echo("render-slim");
  cim::PhaseMap phase = cim::load_phase_map(input);
  const double wl = c.cfg.at("slim").at("wavelength_nm").get<double>();
  if (phase.wavelength_nm != wl) phase = cim::scale_wavelength(phase, wl);
  const double radius = c.cfg.at("slim").at("lowpass_radius").get<double>();
  cim::save_frame_stack(c.path("slim"),
                        cim::render_slim(phase, radius, slim_noise_from(c.cfg, c.rng_seed())));
  std::cout << "rendered " << c.path("slim") << "\n";
  return 0;
}

int cmd_reconstruct_dpm(Common& c, const std::string& input, const std::string& background) {
  c.echo("reconstruct-dpm");
  const cim::Interferogram ig = cim::load_interferogram(input);
  const cim::DemodConfig demod = demod_from(c.cfg);
  cim::PhaseMap phase;
  if (background.empty()) {
    phase = cim::demodulate_hilbert(ig, demod);
  } else {
    const cim::PhaseMap bg = cim::calibrate_background(cim::load_interferogram(background), demod);
    phase = cim::demodulate_hilbert(ig, demod, &bg);
  }
  cim::save_phase_map(c.path("dpm_phase"), phase);
  std::cout << "reconstructed " << c.path("dpm_phase") << "\n";
  return 0;
}

int cmd_reconstruct_slim(Common& c, const std::string& input) {
  c.echo("reconstruct-slim");
  cim::save_phase_map(c.path("slim_phase"),
                      cim::reconstruct_slim(cim::load_frame_stack(input)));
  std::cout << "reconstructed " << c.path("slim_phase") << "\n";
  return 0;
}

int cmd_register(Common& c, const std::string& moving, const std::string& fixed) {
  c.echo("register");
  const cim::PhaseMap m = cim::load_phase_map(moving);
  const cim::PhaseMap f = cim::load_phase_map(fixed);
  const double scale = c.cfg.at("registration").at("nominal_scale").get<double>();
  const double conf = c.cfg.at("registration").at("min_confidence").get<double>();
  const cim::RegistrationTransform t = cim::register_pair(m, f, scale, conf);
  cim::save_phase_map(c.path("registered"),
                      cim::apply_transform(m, t, f.width(), f.height()));
  json j{{"scale", t.scale}, {"tx", t.tx}, {"ty", t.ty}};
  std::ofstream out(c.path("transform.json"));
  out << j.dump(2) << "\n";
  std::cout << "transform scale " << t.scale << " tx " << t.tx << " ty " << t.ty << " -> "
            << c.path("registered") << "\n";
  return 0;
}

// Synthesizes aligned noisy-DPM / clean-SLIM phase-map pairs and a split
// manifest: blob phantom -> DPM render at 532 nm -> demodulate ->
// wavelength-normalize to the SLIM band; SLIM render -> reconstruct.
int cmd_make_dataset(Common& c, int count_override) {
  c.echo("make-dataset");
  const json& d = c.cfg.at("dataset");
  const int count = count_override > 0 ? count_override : d.at("count").get<int>();
  const double slim_wl = c.cfg.at("slim").at("wavelength_nm").get<double>();
  const double lowpass = c.cfg.at("slim").at("lowpass_radius").get<double>();
  const cim::DemodConfig demod = demod_from(c.cfg);
  const double cu = c.cfg.at("dpm").at("carrier_u").get<double>();
  const double cv = c.cfg.at("dpm").at("carrier_v").get<double>();
  const double ref = c.cfg.at("dpm").at("reference_radius").get<double>();

  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < count; ++i) {
    const uint64_t seed = c.rng_seed() + static_cast<uint64_t>(i);
    cim::PhaseMap truth = make_phantom(c.cfg, "blobs", seed);

    cim::PhaseMap dpm_truth =
        cim::scale_wavelength(truth, c.cfg.at("dpm").at("wavelength_nm").get<double>());
    const cim::Interferogram ig =
        cim::render_dpm(dpm_truth, cu, cv, dpm_noise_from(c.cfg, seed * 2 + 1), ref);
    cim::PhaseMap dpm_phase = cim::demodulate_hilbert(ig, demod);
    dpm_phase = cim::scale_wavelength(dpm_phase, slim_wl);

    cim::PhaseMap slim_truth = cim::scale_wavelength(truth, slim_wl);
    const cim::FrameStack stack =
        cim::render_slim(slim_truth, lowpass, slim_noise_from(c.cfg, seed * 2 + 2));
    cim::PhaseMap slim_phase = cim::reconstruct_slim(stack);
    slim_phase.valid.reset();  // pairs are trained dense; masks stay with eval

    char name[32];
    std::snprintf(name, sizeof(name), "pair_%04d", i);
    const std::string dpm_base = c.path(std::string(name) + ".dpm");
    const std::string slim_base = c.path(std::string(name) + ".slim");
    cim::save_phase_map(dpm_base, dpm_phase);
    cim::save_phase_map(slim_base, slim_phase);
    pairs.emplace_back(dpm_base, slim_base);
  }
  cim::DatasetManifest manifest = cim::split_dataset(
      pairs, d.at("train_ratio").get<double>(), d.at("validation_ratio").get<double>(),
      d.at("test_ratio").get<double>(), c.rng_seed());
  cim::save_manifest(c.path("manifest.json"), manifest);
  std::cout << "wrote " << count << " pairs and " << c.path("manifest.json") << "\n";
  return 0;
}

int cmd_train(Common& c, const std::string& manifest_path, int epochs_override) {
  c.echo("train");
  const cim::DatasetManifest manifest = cim::load_manifest(manifest_path);
  cim::TrainConfig tc = train_from(c.cfg);
  if (epochs_override >= 0) tc.epochs = epochs_override;

  cim::nn::ResUNet<float> net(network_from(c.cfg, c.rng_seed()));
  cim::TrainLog log;
  if (tc.epochs > 0) {
    const auto train_set = load_split_pairs(manifest, "train");
    const auto val_set = load_split_pairs(manifest, "validation");
    log = cim::train_network(net, train_set, val_set, tc, [](int e, double tl, double vl) {
      std::cout << "epoch " << e << " train " << tl << " val " << vl << "\n";
    });
  }
  cim::save_weights(c.path("weights.h5"), net);
  json j{{"train_loss", log.train_loss},
         {"val_loss", log.val_loss},
         {"best_epoch", log.best_epoch},
         {"best_val_loss", log.best_val_loss}};
  std::ofstream out(c.path("trainlog.json"));
  out << j.dump(2) << "\n";
  std::cout << "saved " << c.path("weights.h5") << " best epoch " << log.best_epoch << "\n";
  return 0;
}

int cmd_eval(Common& c, const std::string& manifest_path, const std::string& weights,
             const std::string& split) {
  c.echo("eval");
  const cim::DatasetManifest manifest = cim::load_manifest(manifest_path);
  cim::nn::ResUNet<float> net(network_from(c.cfg, c.rng_seed()));
  cim::load_weights(weights, net);
  const cim::EvalReport report = cim::evaluate_split(
      [&](const cim::PhaseMap& in) { return cim::infer_normalized(net, cim::normalize_phase(in)); },
      manifest, split);
  cim::save_eval_report(c.path("eval." + split + ".json"), report);
  std::cout << cim::format_eval_report(report);
  return 0;
}

int cmd_infer(Common& c, const std::string& input, const std::string& weights) {
  c.echo("infer");
  cim::nn::ResUNet<float> net(network_from(c.cfg, c.rng_seed()));
  cim::load_weights(weights, net);
  const cim::PhaseMap in = cim::load_phase_map(input);
  cim::save_phase_map(
      c.path("cim"),
      cim::infer_full(net, in, c.cfg.at("slim").at("wavelength_nm").get<double>()));
  std::cout << "inferred " << c.path("cim") << "\n";
  return 0;
}

int cmd_stream_bench(Common& c, const std::string& source, const std::string& weights, int frames,
                     int queue_depth, int frame_size) {
  c.echo("stream-bench");
  const json& p = c.cfg.at("pipeline");
  cim::PipelineConfig pc;
  if (source == "synthetic") {
    pc.source = cim::PipelineConfig::Source::Synthetic;
  } else {
    pc.source = cim::PipelineConfig::Source::Directory;
    pc.source_dir = source;
  }
  pc.frames = frames > 0 ? frames : p.at("frames").get<int>();
  pc.frame_size = frame_size > 0 ? frame_size : p.at("frame_size").get<int>();
  pc.queue_depth = queue_depth > 0 ? queue_depth : p.at("queue_depth").get<int>();
  pc.warmup_frames = p.at("warmup_frames").get<int>();
  pc.demod_stage = p.at("demod_stage").get<bool>();
  pc.seed = c.rng_seed();

  cim::nn::ResUNet<float> net(network_from(c.cfg, c.rng_seed()));
  if (!weights.empty()) cim::load_weights(weights, net);
  const cim::PipelineResult result = cim::run_pipeline(pc, net, demod_from(c.cfg));
  cim::save_bench_report(c.path("bench.json"), result.report);
  std::cout << cim::format_bench_report(result.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computational interference microscopy toolkit"};
  app.require_subcommand(1);

  Common c;
  std::string kind = "blobs", input, background, moving, fixed, manifest, weights, split = "test";
  std::string source = "synthetic";
  bool with_blank = false;
  int count = 0, epochs = -1, frames = 0, queue_depth = 0, frame_size = 0;

  auto* p_phantom = app.add_subcommand("phantom", "Generate a synthetic phase phantom");
  p_phantom->add_option("--kind", kind, "bead | blobs");
  auto* p_rdpm = app.add_subcommand("render-dpm", "Render an off-axis interferogram");
  p_rdpm->add_option("--input", input, "Phantom phase-map base path")->required();
  p_rdpm->add_flag("--with-blank", with_blank, "Also render a blank calibration frame");
  auto* p_rslim = app.add_subcommand("render-slim", "Render a 4-frame phase-shifting stack");
  p_rslim->add_option("--input", input, "Phantom phase-map base path")->required();
  auto* p_cdpm = app.add_subcommand("reconstruct-dpm", "Demodulate an interferogram");
  p_cdpm->add_option("--input", input, "Interferogram base path")->required();
  p_cdpm->add_option("--background", background, "Blank-frame base path for calibration");
  auto* p_cslim = app.add_subcommand("reconstruct-slim", "Combine a 4-frame stack");
  p_cslim->add_option("--input", input, "Frame-stack base path")->required();
  auto* p_reg = app.add_subcommand("register", "Register a DPM map onto a SLIM map");
  p_reg->add_option("--moving", moving, "Moving phase-map base path")->required();
  p_reg->add_option("--fixed", fixed, "Fixed phase-map base path")->required();
  auto* p_mkds = app.add_subcommand("make-dataset", "Synthesize a paired training dataset");
  p_mkds->add_option("--count", count, "Number of pairs (config dataset.count otherwise)");
  auto* p_train = app.add_subcommand("train", "Train the translator network");
  p_train->add_option("--manifest", manifest, "Dataset manifest path")->required();
  p_train->add_option("--epochs", epochs, "Epoch-count override");
  auto* p_eval = app.add_subcommand("eval", "Evaluate a trained network on a split");
  p_eval->add_option("--manifest", manifest, "Dataset manifest path")->required();
  p_eval->add_option("--weights", weights, "Weights file")->required();
  p_eval->add_option("--split", split, "train | validation | test");
  auto* p_infer = app.add_subcommand("infer", "Translate one phase map");
  p_infer->add_option("--input", input, "Input phase-map base path")->required();
  p_infer->add_option("--weights", weights, "Weights file")->required();
  auto* p_bench = app.add_subcommand("stream-bench", "Run the pipelined inference benchmark");
  p_bench->add_option("--source", source, "'synthetic' or a frame directory");
  p_bench->add_option("--weights", weights, "Weights file (random init otherwise)");
  p_bench->add_option("--frames", frames, "Synthetic frame count");
  p_bench->add_option("--queue-depth", queue_depth, "Inter-stage buffer capacity");
  p_bench->add_option("--frame-size", frame_size, "Synthetic frame edge, pixels");

  for (auto* cmd : {p_phantom, p_rdpm, p_rslim, p_cdpm, p_cslim, p_reg, p_mkds, p_train, p_eval,
                    p_infer, p_bench})
    c.add_to(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    c.load();
    if (p_phantom->parsed()) return cmd_phantom(c, kind);
    if (p_rdpm->parsed()) return cmd_render_dpm(c, input, with_blank);
    if (p_rslim->parsed()) return cmd_render_slim(c, input);
    if (p_cdpm->parsed()) return cmd_reconstruct_dpm(c, input, background);
    if (p_cslim->parsed()) return cmd_reconstruct_slim(c, input);
    if (p_reg->parsed()) return cmd_register(c, moving, fixed);
    if (p_mkds->parsed()) return cmd_make_dataset(c, count);
    if (p_train->parsed()) return cmd_train(c, manifest, epochs);
    if (p_eval->parsed()) return cmd_eval(c, manifest, weights, split);
    if (p_infer->parsed()) return cmd_infer(c, input, weights);
    if (p_bench->parsed())
      return cmd_stream_bench(c, source, weights, frames, queue_depth, frame_size);
    return 1;
  } catch (const cim::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const cim::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
