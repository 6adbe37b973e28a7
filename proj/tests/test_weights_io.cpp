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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "cim/weights_io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cim;
namespace fs = std::filesystem;

namespace {

nn::NetworkConfig small_config(uint64_t seed = 3) {
  nn::NetworkConfig cfg;
  cfg.encoder_channels = {2, 4, 4, 8};
  cfg.bottleneck_channels = 8;
  cfg.seed = seed;
  return cfg;
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / name; }

void perturb_running_stats(nn::ResUNet<float>& net) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(0.1f, 2.0f);
  for (auto& p : net.parameters())
    if (!p.trainable)
      for (auto& v : p.value->v) v = u(rng);
}

}  // namespace

TEST_CASE("save and load round-trips bit-identically in both formats") {
  for (const char* name : {"cim_w.h5", "cim_w.bin"}) {
    nn::ResUNet<float> net(small_config());
    perturb_running_stats(net);
    const auto path = tmp(name);
    save_weights(path.string(), net);

    nn::ResUNet<float> other(small_config(99));  // different init, same layout
    load_weights(path.string(), other);
    auto pa = net.parameters(), pb = other.parameters();
    REQUIRE(pa.size() == pb.size());
    for (size_t i = 0; i < pa.size(); ++i) {
      INFO("tensor ", pa[i].name);
      CHECK(pa[i].value->v == pb[i].value->v);
    }
    fs::remove(path);
  }
}

TEST_CASE("alternate axis-order storage reproduces the forward pass") {
  nn::ResUNet<float> net(small_config());
  nn::Tensor<float> x(1, 1, 32, 32);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto& v : x.v) v = u(rng);
  const nn::Tensor<float> y_native = net.forward(x, false);

  for (const char* name : {"cim_hwio.h5", "cim_hwio.bin"}) {
    const auto path = tmp(name);
    save_weights(path.string(), net, WeightFormat::Auto, WeightLayout::Hwio);
    nn::ResUNet<float> other(small_config(123));
    load_weights(path.string(), other);
    const nn::Tensor<float> y_alt = other.forward(x, false);
    REQUIRE(y_alt.same_shape(y_native));
    for (size_t i = 0; i < y_alt.size(); ++i)
      CHECK(std::abs(y_alt.v[i] - y_native.v[i]) < 1e-6f);
    fs::remove(path);
  }
}

TEST_CASE("a renamed tensor is reported by name") {
  nn::ResUNet<float> net(small_config());
  const auto path = tmp("cim_renamed.bin");
  save_weights(path.string(), net);

  // Rewrite the flat container with one index entry renamed.
  std::ifstream in(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  uint64_t len = 0;
  std::memcpy(&len, bytes.data() + 8, sizeof(len));
  std::string idx(bytes.data() + 16, len);
  auto j = nlohmann::json::parse(idx);
  j[0]["name"] = "enc1/conv1/weight_renamed";
  std::string idx2 = j.dump();
  REQUIRE(idx2.size() != len);  // re-serialize changes length; rebuild the file
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), 8);
  const uint64_t len2 = idx2.size();
  out.write(reinterpret_cast<const char*>(&len2), sizeof(len2));
  out.write(idx2.data(), static_cast<std::streamsize>(idx2.size()));
  out.write(bytes.data() + 16 + static_cast<std::streamsize>(len),
            static_cast<std::streamsize>(bytes.size() - 16 - len));
  out.close();

  nn::ResUNet<float> other(small_config());
  try {
    load_weights(path.string(), other);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("enc1/conv1/weight") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("an unknown axis-order tag is rejected naming the tensor") {
  nn::ResUNet<float> net(small_config());
  const auto path = tmp("cim_badaxis.bin");
  save_weights(path.string(), net);
  std::ifstream in(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  uint64_t len = 0;
  std::memcpy(&len, bytes.data() + 8, sizeof(len));
  std::string idx(bytes.data() + 16, len);
  // Same-length tag swap keeps every offset valid.
  const auto at = idx.find("oihw");
  REQUIRE(at != std::string::npos);
  idx.replace(at, 4, "abcd");
  std::memcpy(bytes.data() + 16, idx.data(), idx.size());
  std::ofstream(path, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));

  nn::ResUNet<float> other(small_config());
  try {
    load_weights(path.string(), other);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("abcd") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("loading a missing file raises a data error") {
  nn::ResUNet<float> net(small_config());
  CHECK_THROWS_AS(load_weights("/nonexistent/weights.h5", net), DataError);
  CHECK_THROWS_AS(load_weights("/nonexistent/weights.bin", net), DataError);
}

TEST_CASE("format detection follows the file extension") {
  nn::ResUNet<float> net(small_config());
  const auto h5 = tmp("cim_fmt.h5");
  const auto bin = tmp("cim_fmt.bin");
  save_weights(h5.string(), net);
  save_weights(bin.string(), net);
  // HDF5 container starts with the \x89HDF signature, the fallback with ours.
  char sig[8] = {};
  std::ifstream(h5, std::ios::binary).read(sig, 8);
  CHECK(std::memcmp(sig + 1, "HDF", 3) == 0);
  std::ifstream(bin, std::ios::binary).read(sig, 8);
  CHECK(std::memcmp(sig, "CIMWT1", 6) == 0);
  fs::remove(h5);
  fs::remove(bin);
}
