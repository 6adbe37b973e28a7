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

#include "cim/raster_io.hpp"

#include <fstream>

#include "json.hpp"

namespace cim {
namespace {

using nlohmann::json;

void write_bytes(const std::string& path, const void* data, size_t bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!f) throw DataError("short write: " + path);
}

void read_bytes(const std::string& path, void* data, size_t bytes) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw DataError("cannot open: " + path);
  if (static_cast<size_t>(f.tellg()) != bytes)
    throw DataError("unexpected file size for " + path);
  f.seekg(0);
  f.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (!f) throw DataError("short read: " + path);
}

void write_sidecar(const std::string& base, const json& meta) {
  std::ofstream f(base + ".json");
  if (!f) throw DataError("cannot open for writing: " + base + ".json");
  f << meta.dump(2) << "\n";
}

json read_sidecar(const std::string& base) {
  std::ifstream f(base + ".json");
  if (!f) throw DataError("cannot open: " + base + ".json");
  json meta;
  try {
    f >> meta;
  } catch (const json::parse_error& e) {
    throw DataError("malformed sidecar " + base + ".json: " + e.what());
  }
  return meta;
}

void save_f32(const std::string& path, const Rasterf& raster) {
  write_bytes(path, raster.data.data(), raster.size() * sizeof(float));
}

Rasterf load_f32(const std::string& path, int w, int h) {
  Rasterf raster(w, h);
  read_bytes(path, raster.data.data(), raster.size() * sizeof(float));
  return raster;
}

}  // namespace

void save_phase_map(const std::string& base, const PhaseMap& map) {
  json meta = {{"kind", "phase"},
               {"width", map.width()},
               {"height", map.height()},
               {"pixel_size_um", map.pixel_size_um},
               {"wavelength_nm", map.wavelength_nm},
               {"wrapped", map.wrapped},
               {"has_mask", map.valid.has_value()}};
  write_sidecar(base, meta);
  save_f32(base + ".f32", map.values);
  if (map.valid) write_bytes(base + ".mask.u8", map.valid->data.data(), map.valid->size());
}

PhaseMap load_phase_map(const std::string& base) {
  json meta = read_sidecar(base);
  if (meta.value("kind", "") != "phase")
    throw DataError(base + ".json is not a phase map sidecar");
  PhaseMap map;
  const int w = meta.at("width").get<int>();
  const int h = meta.at("height").get<int>();
  map.values = load_f32(base + ".f32", w, h);
  map.pixel_size_um = meta.at("pixel_size_um").get<double>();
  map.wavelength_nm = meta.at("wavelength_nm").get<double>();
  map.wrapped = meta.at("wrapped").get<bool>();
  if (meta.value("has_mask", false)) {
    Mask mask(w, h);
    read_bytes(base + ".mask.u8", mask.data.data(), mask.size());
    map.valid = std::move(mask);
  }
  return map;
}

void save_interferogram(const std::string& base, const Interferogram& ig) {
  json meta = {{"kind", "interferogram"},
               {"width", ig.width()},
               {"height", ig.height()},
               {"carrier", {ig.carrier_u, ig.carrier_v}},
               {"pixel_size_um", ig.pixel_size_um},
               {"wavelength_nm", ig.wavelength_nm}};
  write_sidecar(base, meta);
  save_f32(base + ".f32", ig.intensity);
}

Interferogram load_interferogram(const std::string& base) {
  json meta = read_sidecar(base);
  if (meta.value("kind", "") != "interferogram")
    throw DataError(base + ".json is not an interferogram sidecar");
  Interferogram ig;
  const int w = meta.at("width").get<int>();
  const int h = meta.at("height").get<int>();
  ig.intensity = load_f32(base + ".f32", w, h);
  ig.carrier_u = meta.at("carrier")[0].get<double>();
  ig.carrier_v = meta.at("carrier")[1].get<double>();
  ig.pixel_size_um = meta.at("pixel_size_um").get<double>();
  ig.wavelength_nm = meta.at("wavelength_nm").get<double>();
  return ig;
}

void save_frame_stack(const std::string& base, const FrameStack& stack) {
  json meta = {{"kind", "framestack"},
               {"width", stack.width()},
               {"height", stack.height()},
               {"phase_offsets", FrameStack::phase_offsets()},
               {"pixel_size_um", stack.pixel_size_um},
               {"wavelength_nm", stack.wavelength_nm}};
  write_sidecar(base, meta);
  for (int k = 0; k < 4; ++k) {
    // Stored as float32 like every raster; in-memory frames stay double.
    Rasterf f(stack.width(), stack.height());
    for (size_t i = 0; i < f.size(); ++i) f.data[i] = static_cast<float>(stack.frames[k].data[i]);
    save_f32(base + ".k" + std::to_string(k) + ".f32", f);
  }
}

FrameStack load_frame_stack(const std::string& base) {
  json meta = read_sidecar(base);
  if (meta.value("kind", "") != "framestack")
    throw DataError(base + ".json is not a frame stack sidecar");
  FrameStack stack;
  const int w = meta.at("width").get<int>();
  const int h = meta.at("height").get<int>();
  stack.pixel_size_um = meta.at("pixel_size_um").get<double>();
  stack.wavelength_nm = meta.at("wavelength_nm").get<double>();
  for (int k = 0; k < 4; ++k) {
    Rasterf f = load_f32(base + ".k" + std::to_string(k) + ".f32", w, h);
    stack.frames[k] = Rasterd(w, h);
    for (size_t i = 0; i < f.size(); ++i) stack.frames[k].data[i] = f.data[i];
  }
  return stack;
}

}  // namespace cim
