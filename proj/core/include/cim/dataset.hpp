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

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cim/image.hpp"

namespace cim {

struct ManifestEntry {
  std::string dpm_path;
  std::string slim_path;
  std::string split;  // "train" | "validation" | "test"
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  double norm_min = -kPi;  // declared normalization range
  double norm_max = kPi;

  std::vector<const ManifestEntry*> split(const std::string& name) const;
};

void save_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::string& path);

// Affine map [-pi, pi) -> [0, 1); throws on unwrapped input.
Rasterf normalize_phase(const PhaseMap& map);
// Exact inverse of normalize_phase; metadata is supplied by the caller.
PhaseMap denormalize_phase(const Rasterf& raster, double pixel_size_um = 1.0,
                           double wavelength_nm = 623.0);

// Same window applied to both rasters; top-left uniform over valid positions.
std::pair<Rasterf, Rasterf> random_crop(const Rasterf& a, const Rasterf& b, int size,
                                        std::mt19937_64& rng);

// Deterministic shuffled partition with largest-remainder rounding.
DatasetManifest split_dataset(const std::vector<std::pair<std::string, std::string>>& pairs,
                              double train_ratio, double validation_ratio, double test_ratio,
                              uint64_t seed);

}  // namespace cim
