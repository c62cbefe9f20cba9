#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "neuropath/network.hpp"

namespace testing_support {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "neuropath-test-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) std::abort();
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline void append_be32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 24));
  v.push_back(static_cast<std::uint8_t>(x >> 16));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

inline std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Dense ReLU stack with a linear output layer. `widths` includes the input
// width first and the output width last.
inline neuropath::Network random_dense_net(std::mt19937_64& rng, const std::vector<std::size_t>& widths,
                                           bool zero_bias) {
  using neuropath::Activation;
  using neuropath::Layer;
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l], out = widths[l + 1];
    auto w = uniform(rng, in * out, -1.0, 1.0);
    auto b = zero_bias ? std::vector<double>(out, 0.0) : uniform(rng, out, -0.5, 0.5);
    const bool last = l + 2 == widths.size();
    layers.push_back(Layer::dense(in, out, last ? Activation::none : Activation::relu, w, b));
  }
  return neuropath::Network({widths.front()}, std::move(layers));
}

// 2-4 dense layers, every width in [2,16].
inline neuropath::Network random_small_net(std::mt19937_64& rng, bool zero_bias) {
  std::uniform_int_distribution<std::size_t> depth(2, 4), width(2, 16);
  std::vector<std::size_t> widths{width(rng)};
  const std::size_t layers = depth(rng);
  for (std::size_t l = 0; l < layers; ++l) widths.push_back(width(rng));
  return random_dense_net(rng, widths, zero_bias);
}

// True when some hidden layer has no active unit. The layer above is then
// driven by its bias alone and the z-rule has nothing to redistribute onto.
inline bool has_dead_layer(const neuropath::ActivationTrace& t) {
  for (std::size_t l = 0; l + 1 < t.post_activations.size(); ++l) {
    bool any = false;
    for (double v : t.post_activations[l]) any |= v > 0;
    if (!any) return true;
  }
  return false;
}

}  // namespace testing_support
