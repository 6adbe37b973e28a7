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

#include "cim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cim/raster_io.hpp"
#include "json.hpp"

namespace cim {

namespace {

using nlohmann::json;

void check_shapes(const Rasterf& a, const Rasterf& b, const Mask* mask) {
  if (!a.same_shape(b)) throw std::invalid_argument("metric inputs have different shapes");
  if (mask && (mask->width != a.width || mask->height != a.height))
    throw std::invalid_argument("mask shape does not match the rasters");
}

}  // namespace

PsnrResult psnr(const Rasterf& a, const Rasterf& b, double max_value, const Mask* mask) {
  check_shapes(a, b, mask);
  double acc = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (mask && mask->data[i] == 0) continue;
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    acc += d * d;
    ++n;
  }
  if (n == 0) throw DataError("no valid pixels for PSNR");
  const double mse = acc / static_cast<double>(n);
  if (mse == 0.0) return {true, 0.0};
  return {false, 10.0 * std::log10(max_value * max_value / mse)};
}

double pearson(const Rasterf& a, const Rasterf& b, const Mask* mask) {
  check_shapes(a, b, mask);
  double sa = 0.0, sb = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (mask && mask->data[i] == 0) continue;
    sa += a.data[i];
    sb += b.data[i];
    ++n;
  }
  if (n < 2) throw DataError("too few valid pixels for correlation");
  const double ma = sa / static_cast<double>(n);
  const double mb = sb / static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (mask && mask->data[i] == 0) continue;
    const double da = a.data[i] - ma;
    const double db = b.data[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0)
    throw NumericError("undefined correlation: constant input raster");
  return sab / std::sqrt(saa * sbb);
}

double background_sigma(const PhaseMap& map, const Mask& empty_mask) {
  if (empty_mask.width != map.width() || empty_mask.height != map.height())
    throw std::invalid_argument("background mask shape does not match the map");
  double s = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < empty_mask.size(); ++i) {
    if (empty_mask.data[i] == 0) continue;
    s += map.values.data[i];
    ++n;
  }
  if (n == 0) throw DataError("background mask selects no pixels");
  const double mean = s / static_cast<double>(n);
  double var = 0.0;
  for (size_t i = 0; i < empty_mask.size(); ++i) {
    if (empty_mask.data[i] == 0) continue;
    const double d = map.values.data[i] - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(n));
}

EvalReport evaluate_split(const Predictor& predict, const DatasetManifest& manifest,
                          const std::string& split) {
  auto entries = manifest.split(split);
  if (entries.empty()) throw DataError("split '" + split + "' is empty");

  EvalReport report;
  report.split = split;
  for (const auto* e : entries) {
    EvalRow row;
    row.id = e->dpm_path;
    try {
      const PhaseMap input = load_phase_map(e->dpm_path);
      const PhaseMap truth = load_phase_map(e->slim_path);
      const Rasterf target = normalize_phase(truth);
      const Rasterf pred = predict(input);
      const Mask* mask = truth.valid ? &*truth.valid : nullptr;
      const PsnrResult p = psnr(pred, target, 1.0, mask);
      row.identical = p.identical;
      row.psnr_db = p.db;
      row.pearson_r = row.identical ? 1.0 : pearson(pred, target, mask);
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const EvalRow& a, const EvalRow& b) { return a.id < b.id; });

  size_t n_psnr = 0, n_r = 0;
  for (const auto& r : report.rows) {
    if (!r.error.empty()) continue;
    ++report.count;
    report.mean_pearson += r.pearson_r;
    ++n_r;
    if (!r.identical) {
      report.mean_psnr_db += r.psnr_db;
      ++n_psnr;
    }
  }
  if (n_psnr > 0) report.mean_psnr_db /= static_cast<double>(n_psnr);
  if (n_r > 0) report.mean_pearson /= static_cast<double>(n_r);
  return report;
}

void save_eval_report(const std::string& path, const EvalReport& report) {
  json j;
  j["split"] = report.split;
  j["count"] = report.count;
  j["mean_psnr_db"] = report.mean_psnr_db;
  j["mean_pearson"] = report.mean_pearson;
  j["rows"] = json::array();
  for (const auto& r : report.rows)
    j["rows"].push_back({{"id", r.id},
                         {"identical", r.identical},
                         {"psnr_db", r.psnr_db},
                         {"pearson", r.pearson_r},
                         {"error", r.error}});
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

std::string format_eval_report(const EvalReport& report) {
  std::ostringstream out;
  out << "split: " << report.split << "  images: " << report.count << "\n";
  out << "mean PSNR: " << report.mean_psnr_db << " dB  mean Pearson r: " << report.mean_pearson
      << "\n";
  out << "id  psnr_db  pearson  note\n";
  for (const auto& r : report.rows) {
    out << r.id << "  ";
    if (!r.error.empty())
      out << "-  -  error: " << r.error;
    else if (r.identical)
      out << "identical  1.0  ";
    else
      out << r.psnr_db << "  " << r.pearson_r << "  ";
    out << "\n";
  }
  return out.str();
}

}  // namespace cim
