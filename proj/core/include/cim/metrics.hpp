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

#include "cim/dataset.hpp"
#include "cim/image.hpp"

namespace cim {

struct PsnrResult {
  bool identical = false;  // MSE was exactly zero; db is meaningless then
  double db = 0.0;
};

// Computed over valid pixels only when a mask is given. PSNR is defined on
// normalized [0, 1] rasters with max_value 1 unless stated otherwise.
PsnrResult psnr(const Rasterf& a, const Rasterf& b, double max_value = 1.0,
                const Mask* mask = nullptr);

// Sample Pearson correlation; throws NumericError("undefined correlation ...")
// when either input is constant over the valid pixels.
double pearson(const Rasterf& a, const Rasterf& b, const Mask* mask = nullptr);

// Standard deviation of phase over the specimen-free pixels marked nonzero
// in empty_mask; throws DataError when the mask selects nothing.
double background_sigma(const PhaseMap& map, const Mask& empty_mask);

struct EvalRow {
  std::string id;          // input path
  bool identical = false;  // prediction matched ground truth exactly
  double psnr_db = 0.0;
  double pearson_r = 0.0;
  std::string error;  // non-empty when this image failed; row kept, flagged
};

struct EvalReport {
  std::string split;
  std::vector<EvalRow> rows;  // sorted by id
  size_t count = 0;           // rows that produced metrics
  double mean_psnr_db = 0.0;  // over rows with finite PSNR (identical excluded)
  double mean_pearson = 0.0;  // over rows without error
};

/// Maps an input phase map to a normalized [0, 1) prediction raster.
using Predictor = std::function<Rasterf(const PhaseMap&)>;

// Runs the predictor on every manifest entry of the split and scores it
// against the normalized ground truth. Per-image failures become flagged
// rows, never silent drops. Throws on an empty split.
EvalReport evaluate_split(const Predictor& predict, const DatasetManifest& manifest,
                          const std::string& split);

void save_eval_report(const std::string& path, const EvalReport& report);
std::string format_eval_report(const EvalReport& report);

}  // namespace cim
