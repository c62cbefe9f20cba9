#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neuropath/network.hpp"

namespace neuropath {

// One block of the compact architecture notation used for the reference
// models, e.g. "5 * <30>" (five dense layers of width 30) or
// "2 * <32@3x3>" (two 3x3 convolutions with 32 output channels).
struct LayerGroup {
  std::size_t repeat = 1;
  std::size_t width = 0;   // dense units or conv output channels
  std::size_t kernel = 0;  // 0 for dense blocks
  bool is_conv() const { return kernel != 0; }
};

// Parses "8 * <20>, <10>" style strings. The last group is the output layer.
std::vector<LayerGroup> parse_architecture(const std::string& text);

// Builds a randomly initialized network. Hidden layers use ReLU, the output
// layer is linear. Each conv group is followed by a 2x2 max-pool; a flatten
// is inserted before the first dense layer when the data is still spatial.
// Weights are He-normal, biases zero; the result depends only on `seed`.
Network build_network(const Shape& input_shape,
                      const std::vector<LayerGroup>& groups,
                      std::uint64_t seed);
Network build_network(const Shape& input_shape, const std::string& architecture,
                      std::uint64_t seed);

// Reference configurations: MNIST_1..3 and CIFAR_1..3.
std::string reference_architecture(const std::string& model_name);

}  // namespace neuropath
