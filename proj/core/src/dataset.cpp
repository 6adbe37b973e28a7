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

#include "cim/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace cim {

using nlohmann::json;

std::vector<const ManifestEntry*> DatasetManifest::split(const std::string& name) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries)
    if (e.split == name) out.push_back(&e);
  return out;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
  json j;
  j["normalization"] = {{"min", manifest.norm_min}, {"max", manifest.norm_max}};
  j["entries"] = json::array();
  for (const auto& e : manifest.entries)
    j["entries"].push_back({{"dpm", e.dpm_path}, {"slim", e.slim_path}, {"split", e.split}});
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw DataError("malformed manifest " + path + ": " + e.what());
  }
  DatasetManifest m;
  m.norm_min = j.at("normalization").at("min").get<double>();
  m.norm_max = j.at("normalization").at("max").get<double>();
  for (const auto& e : j.at("entries"))
    m.entries.push_back({e.at("dpm").get<std::string>(), e.at("slim").get<std::string>(),
                         e.at("split").get<std::string>()});
  return m;
}

Rasterf normalize_phase(const PhaseMap& map) {
  Rasterf out(map.width(), map.height());
  // The wrapped range is [-pi, pi); float rounding of wrapped values can land
  // one ulp outside it, so accept the closed float interval and clamp back.
  const float fpi = static_cast<float>(kPi);
  for (size_t i = 0; i < out.size(); ++i) {
    const float phi = map.values.data[i];
    if (!(phi >= -fpi && phi <= fpi))
      throw std::invalid_argument("unwrapped phase value " + std::to_string(phi) +
                                  " reached the normalization path");
    const double t = (static_cast<double>(phi) + kPi) / kTwoPi;
    out.data[i] = std::clamp(static_cast<float>(t), 0.0f, std::nextafter(1.0f, 0.0f));
  }
  return out;
}

PhaseMap denormalize_phase(const Rasterf& raster, double pixel_size_um, double wavelength_nm) {
  PhaseMap map;
  map.values = Rasterf(raster.width, raster.height);
  map.pixel_size_um = pixel_size_um;
  map.wavelength_nm = wavelength_nm;
  map.wrapped = true;
  for (size_t i = 0; i < raster.size(); ++i)
    map.values.data[i] = static_cast<float>(static_cast<double>(raster.data[i]) * kTwoPi - kPi);
  return map;
}

std::pair<Rasterf, Rasterf> random_crop(const Rasterf& a, const Rasterf& b, int size,
                                        std::mt19937_64& rng) {
  if (!a.same_shape(b)) throw std::invalid_argument("crop pair dimensions disagree");
  if (size <= 0 || a.width < size || a.height < size)
    throw std::invalid_argument("raster " + std::to_string(a.width) + "x" +
                                std::to_string(a.height) + " smaller than crop size " +
                                std::to_string(size));
  std::uniform_int_distribution<int> dx(0, a.width - size);
  std::uniform_int_distribution<int> dy(0, a.height - size);
  const int x0 = dx(rng);
  const int y0 = dy(rng);
  Rasterf ca(size, size), cb(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      ca.at(x, y) = a.at(x0 + x, y0 + y);
      cb.at(x, y) = b.at(x0 + x, y0 + y);
    }
  return {std::move(ca), std::move(cb)};
}

DatasetManifest split_dataset(const std::vector<std::pair<std::string, std::string>>& pairs,
                              double train_ratio, double validation_ratio, double test_ratio,
                              uint64_t seed) {
  const double total = train_ratio + validation_ratio + test_ratio;
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");
  if (train_ratio < 0 || validation_ratio < 0 || test_ratio < 0)
    throw std::invalid_argument("split ratios must be nonnegative");

  const size_t n = pairs.size();
  const double ratios[3] = {train_ratio, validation_ratio, test_ratio};
  const char* names[3] = {"train", "validation", "test"};

  // Largest-remainder rounding keeps the partition exhaustive.
  size_t counts[3];
  double remainders[3];
  size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = ratios[i] * static_cast<double>(n);
    counts[i] = static_cast<size_t>(exact);
    remainders[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (remainders[i] > remainders[best]) best = i;
    ++counts[best];
    remainders[best] = -1.0;
    ++assigned;
  }
  for (int i = 0; i < 3; ++i)
    if (ratios[i] > 0.0 && counts[i] == 0)
      throw std::invalid_argument(std::string("empty ") + names[i] +
                                  " split for nonzero ratio; add data or adjust ratios");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  DatasetManifest manifest;
  size_t pos = 0;
  for (int i = 0; i < 3; ++i)
    for (size_t k = 0; k < counts[i]; ++k, ++pos)
      manifest.entries.push_back(
          {pairs[order[pos]].first, pairs[order[pos]].second, names[i]});
  return manifest;
}

}  // namespace cim
