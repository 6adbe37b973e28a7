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

#include "cim/weights_io.hpp"

#include <hdf5.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include "cim/image.hpp"
#include "json.hpp"

namespace cim {

namespace {

using nlohmann::json;
using nn::ParamRef;
using nn::Tensor;

constexpr char kFlatMagic[8] = {'C', 'I', 'M', 'W', 'T', '1', '\n', '\0'};

struct StoredTensor {
  std::string axis_order;
  std::vector<size_t> dims;  // in stored axis order
  std::vector<float> data;
};

WeightFormat resolve_format(const std::string& path, WeightFormat format) {
  if (format != WeightFormat::Auto) return format;
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  return (ext == ".h5" || ext == ".hdf5") ? WeightFormat::Hdf5 : WeightFormat::FlatBinary;
}

// Dims of a parameter tensor in the order named by its axis tag: position k
// of the tag names dimension k. Vectors ("c") collapse to one axis.
std::vector<size_t> native_dims(const ParamRef<float>& p) {
  if (p.axis_order == "c") return {p.value->size()};
  return {static_cast<size_t>(p.value->n), static_cast<size_t>(p.value->c),
          static_cast<size_t>(p.value->h), static_cast<size_t>(p.value->w)};
}

bool valid_order(const std::string& order) {
  if (order == "c") return true;
  if (order.size() != 4) return false;
  std::string sorted = order;
  std::sort(sorted.begin(), sorted.end());
  return sorted == "hiow";  // some permutation of o,i,h,w
}

// Reorders `src` (laid out per src_order with src_dims) into dst_order.
std::vector<float> reorder(const std::vector<float>& src, const std::string& src_order,
                           const std::vector<size_t>& src_dims, const std::string& dst_order) {
  if (src_order == dst_order) return src;
  std::array<int, 4> perm{};  // dst axis k comes from src axis perm[k]
  std::array<size_t, 4> dst_dims{};
  for (int k = 0; k < 4; ++k) {
    const auto at = src_order.find(dst_order[k]);
    perm[k] = static_cast<int>(at);
    dst_dims[k] = src_dims[at];
  }
  std::array<size_t, 4> src_stride{};
  src_stride[3] = 1;
  for (int k = 2; k >= 0; --k) src_stride[k] = src_stride[k + 1] * src_dims[k + 1];

  std::vector<float> dst(src.size());
  size_t idx = 0;
  for (size_t a = 0; a < dst_dims[0]; ++a)
    for (size_t b = 0; b < dst_dims[1]; ++b)
      for (size_t c = 0; c < dst_dims[2]; ++c)
        for (size_t d = 0; d < dst_dims[3]; ++d, ++idx) {
          const size_t co[4] = {a, b, c, d};
          size_t off = 0;
          for (int k = 0; k < 4; ++k) off += co[k] * src_stride[perm[k]];
          dst[idx] = src[off];
        }
  return dst;
}

StoredTensor to_stored(const ParamRef<float>& p, WeightLayout layout) {
  StoredTensor st;
  st.axis_order = p.axis_order;
  st.dims = native_dims(p);
  st.data = p.value->v;
  if (layout == WeightLayout::Hwio && p.axis_order != "c") {
    st.data = reorder(st.data, p.axis_order, st.dims, "hwio");
    std::vector<size_t> dims(4);
    for (int k = 0; k < 4; ++k) dims[k] = st.dims[p.axis_order.find("hwio"[k])];
    st.dims = dims;
    st.axis_order = "hwio";
  }
  return st;
}

void from_stored(const StoredTensor& st, ParamRef<float>& p) {
  if (!valid_order(st.axis_order))
    throw DataError("tensor '" + p.name + "': unknown axis-order tag '" + st.axis_order + "'");
  if ((st.axis_order == "c") != (p.axis_order == "c"))
    throw DataError("tensor '" + p.name + "': rank disagrees with the network parameter");
  const std::vector<size_t> want = native_dims(p);
  if (st.dims.size() != want.size())
    throw DataError("tensor '" + p.name + "': stored rank " + std::to_string(st.dims.size()) +
                    ", expected " + std::to_string(want.size()));
  for (size_t k = 0; k < want.size(); ++k) {
    const size_t expected =
        p.axis_order == "c" ? want[0] : want[p.axis_order.find(st.axis_order[k])];
    if (st.dims[k] != expected)
      throw DataError("tensor '" + p.name + "': shape mismatch on stored axis " +
                      std::to_string(k));
  }
  p.value->v = p.axis_order == "c"
                   ? st.data
                   : reorder(st.data, st.axis_order,
                             std::vector<size_t>(st.dims.begin(), st.dims.end()), p.axis_order);
}

// ---------------------------------------------------------------------------
// HDF5 container. Dataset per tensor (groups from the '/' in names), string
// attribute "axis_order" on each dataset.

struct H5Guard {
  hid_t id;
  herr_t (*closer)(hid_t);
  ~H5Guard() {
    if (id >= 0) closer(id);
  }
};

void h5_write_axis_order(hid_t dset, const std::string& order) {
  hid_t stype = H5Tcopy(H5T_C_S1);
  H5Tset_size(stype, order.size() + 1);
  hid_t space = H5Screate(H5S_SCALAR);
  hid_t attr = H5Acreate2(dset, "axis_order", stype, space, H5P_DEFAULT, H5P_DEFAULT);
  H5Awrite(attr, stype, order.c_str());
  H5Aclose(attr);
  H5Sclose(space);
  H5Tclose(stype);
}

std::string h5_read_axis_order(hid_t dset, const std::string& name) {
  if (H5Aexists(dset, "axis_order") <= 0)
    throw DataError("tensor '" + name + "': missing axis_order attribute");
  hid_t attr = H5Aopen(dset, "axis_order", H5P_DEFAULT);
  hid_t stype = H5Aget_type(attr);
  const size_t len = H5Tget_size(stype);
  std::vector<char> buf(len + 1, '\0');
  H5Aread(attr, stype, buf.data());
  H5Tclose(stype);
  H5Aclose(attr);
  return std::string(buf.data());
}

void save_hdf5(const std::string& path, std::vector<ParamRef<float>>& params,
               WeightLayout layout) {
  H5Guard file{H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT), H5Fclose};
  if (file.id < 0) throw DataError("cannot create weights file: " + path);
  H5Guard lcpl{H5Pcreate(H5P_LINK_CREATE), H5Pclose};
  H5Pset_create_intermediate_group(lcpl.id, 1);

  for (auto& p : params) {
    const StoredTensor st = to_stored(p, layout);
    std::vector<hsize_t> dims(st.dims.begin(), st.dims.end());
    H5Guard space{H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr),
                  H5Sclose};
    H5Guard dset{H5Dcreate2(file.id, p.name.c_str(), H5T_IEEE_F32LE, space.id, lcpl.id,
                            H5P_DEFAULT, H5P_DEFAULT),
                 H5Dclose};
    if (dset.id < 0) throw DataError("cannot create dataset for tensor '" + p.name + "'");
    if (H5Dwrite(dset.id, H5T_NATIVE_FLOAT, H5S_ALL, H5S_ALL, H5P_DEFAULT, st.data.data()) < 0)
      throw DataError("write failed for tensor '" + p.name + "'");
    h5_write_axis_order(dset.id, st.axis_order);
  }
}

void load_hdf5(const std::string& path, std::vector<ParamRef<float>>& params) {
  H5Guard file{H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose};
  if (file.id < 0) throw DataError("cannot open weights file: " + path);
  for (auto& p : params) {
    if (H5Lexists(file.id, p.name.c_str(), H5P_DEFAULT) <= 0)
      throw DataError("missing tensor '" + p.name + "' in " + path);
    H5Guard dset{H5Dopen2(file.id, p.name.c_str(), H5P_DEFAULT), H5Dclose};
    if (dset.id < 0) throw DataError("cannot open tensor '" + p.name + "'");
    StoredTensor st;
    st.axis_order = h5_read_axis_order(dset.id, p.name);
    H5Guard space{H5Dget_space(dset.id), H5Sclose};
    const int rank = H5Sget_simple_extent_ndims(space.id);
    std::vector<hsize_t> dims(static_cast<size_t>(std::max(rank, 0)));
    H5Sget_simple_extent_dims(space.id, dims.data(), nullptr);
    st.dims.assign(dims.begin(), dims.end());
    size_t count = 1;
    for (size_t d : st.dims) count *= d;
    st.data.resize(count);
    if (H5Dread(dset.id, H5T_NATIVE_FLOAT, H5S_ALL, H5S_ALL, H5P_DEFAULT, st.data.data()) < 0)
      throw DataError("read failed for tensor '" + p.name + "'");
    from_stored(st, p);
  }
}

// ---------------------------------------------------------------------------
// Flat-binary fallback: magic, little-endian u64 index length, JSON index,
// then the raw float32 payload the index offsets point into.

void save_flat(const std::string& path, std::vector<ParamRef<float>>& params,
               WeightLayout layout) {
  json index = json::array();
  std::vector<float> payload;
  std::vector<StoredTensor> stored;
  for (auto& p : params) {
    StoredTensor st = to_stored(p, layout);
    index.push_back({{"name", p.name},
                     {"axis_order", st.axis_order},
                     {"shape", st.dims},
                     {"offset", payload.size()},
                     {"count", st.data.size()}});
    payload.insert(payload.end(), st.data.begin(), st.data.end());
  }
  const std::string idx = index.dump();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot create weights file: " + path);
  f.write(kFlatMagic, sizeof(kFlatMagic));
  const uint64_t len = idx.size();
  f.write(reinterpret_cast<const char*>(&len), sizeof(len));
  f.write(idx.data(), static_cast<std::streamsize>(idx.size()));
  f.write(reinterpret_cast<const char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!f) throw DataError("write failed: " + path);
}

void load_flat(const std::string& path, std::vector<ParamRef<float>>& params) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open weights file: " + path);
  char magic[sizeof(kFlatMagic)];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kFlatMagic, sizeof(magic)) != 0)
    throw DataError("not a weights container: " + path);
  uint64_t len = 0;
  f.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string idx(len, '\0');
  f.read(idx.data(), static_cast<std::streamsize>(len));
  if (!f) throw DataError("truncated weights index: " + path);
  json index;
  try {
    index = json::parse(idx);
  } catch (const json::parse_error& e) {
    throw DataError("malformed weights index in " + path + ": " + e.what());
  }
  const std::streampos data_start = f.tellg();

  std::map<std::string, json> by_name;
  for (const auto& e : index) by_name[e.at("name").get<std::string>()] = e;

  for (auto& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw DataError("missing tensor '" + p.name + "' in " + path);
    const json& e = it->second;
    StoredTensor st;
    st.axis_order = e.at("axis_order").get<std::string>();
    st.dims = e.at("shape").get<std::vector<size_t>>();
    const size_t count = e.at("count").get<size_t>();
    st.data.resize(count);
    f.seekg(data_start + static_cast<std::streamoff>(e.at("offset").get<size_t>() *
                                                     sizeof(float)));
    f.read(reinterpret_cast<char*>(st.data.data()),
           static_cast<std::streamsize>(count * sizeof(float)));
    if (!f) throw DataError("truncated payload for tensor '" + p.name + "'");
    from_stored(st, p);
  }
}

}  // namespace

void save_weights(const std::string& path, nn::ResUNet<float>& net, WeightFormat format,
                  WeightLayout layout) {
  auto params = net.parameters();
  if (resolve_format(path, format) == WeightFormat::Hdf5)
    save_hdf5(path, params, layout);
  else
    save_flat(path, params, layout);
}

void load_weights(const std::string& path, nn::ResUNet<float>& net, WeightFormat format) {
  auto params = net.parameters();
  if (resolve_format(path, format) == WeightFormat::Hdf5)
    load_hdf5(path, params);
  else
    load_flat(path, params);
}

}  // namespace cim
