#include "neuropath/architecture.hpp"

#include <cmath>
#include <map>
#include <random>
#include <regex>

#include "neuropath/errors.hpp"

namespace neuropath {

std::vector<LayerGroup> parse_architecture(const std::string& text) {
  static const std::regex group_re(
      R"(^\s*(?:(\d+)\s*\*\s*)?<\s*(\d+)\s*(?:@\s*(\d+)\s*x\s*(\d+)\s*)?>\s*$)");
  std::vector<LayerGroup> groups;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string piece = text.substr(start, comma - start);
    std::smatch m;
    if (!std::regex_match(piece, m, group_re)) {
      throw UsageError("cannot parse architecture block '" + piece + "' in '" +
                       text + "'");
    }
    LayerGroup g;
    g.repeat = m[1].matched ? std::stoul(m[1].str()) : 1;
    g.width = std::stoul(m[2].str());
    if (m[3].matched) {
      const auto kh = std::stoul(m[3].str());
      const auto kw = std::stoul(m[4].str());
      if (kh != kw) throw UsageError("only square kernels are supported: " + piece);
      g.kernel = kh;
    }
    if (g.repeat == 0 || g.width == 0) {
      throw UsageError("architecture block '" + piece + "' has a zero size");
    }
    groups.push_back(g);
    start = comma + 1;
  }
  if (groups.empty()) throw UsageError("empty architecture");
  if (groups.back().is_conv() || groups.back().repeat != 1) {
    throw UsageError("architecture must end with a single dense output block");
  }
  return groups;
}

Network build_network(const Shape& input_shape,
                      const std::vector<LayerGroup>& groups,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  Shape shape = input_shape;

  auto he_weights = [&rng](std::size_t count, std::size_t fan_in) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    std::vector<double> w(count);
    for (double& v : w) v = dist(rng);
    return w;
  };

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const LayerGroup& g = groups[gi];
    const bool output_group = gi + 1 == groups.size();
    for (std::size_t r = 0; r < g.repeat; ++r) {
      if (g.is_conv()) {
        if (shape.size() != 3) {
          throw UsageError("convolution block needs a [c][h][w] input, got " +
                           to_string(shape));
        }
        const std::size_t fan_in = shape[0] * g.kernel * g.kernel;
        layers.push_back(Layer::conv2d(
            shape, g.width, g.kernel, Activation::relu,
            he_weights(g.width * fan_in, fan_in), std::vector<double>(g.width)));
      } else {
        if (shape.size() != 1) {
          layers.push_back(Layer::flatten(shape));
        }
        const std::size_t in = element_count(layers.empty()
                                                 ? shape
                                                 : layers.back().output_shape());
        const Activation act = output_group ? Activation::none : Activation::relu;
        layers.push_back(Layer::dense(in, g.width, act,
                                      he_weights(in * g.width, in),
                                      std::vector<double>(g.width)));
      }
      shape = layers.back().output_shape();
    }
    if (g.is_conv()) {
      layers.push_back(Layer::maxpool(shape));
      shape = layers.back().output_shape();
    }
  }
  return Network(input_shape, std::move(layers));
}

Network build_network(const Shape& input_shape, const std::string& architecture,
                      std::uint64_t seed) {
  return build_network(input_shape, parse_architecture(architecture), seed);
}

std::string reference_architecture(const std::string& model_name) {
  static const std::map<std::string, std::string> table = {
      {"MNIST_1", "5 * <30>, <10>"},
      {"MNIST_2", "6 * <25>, <10>"},
      {"MNIST_3", "8 * <20>, <10>"},
      {"CIFAR_1", "2 * <32@3x3>, 2 * <64@3x3>, 4 * <128>, <10>"},
      {"CIFAR_2", "2 * <32@3x3>, 2 * <64@3x3>, 2 * <256>, <10>"},
      {"CIFAR_3", "2 * <32@3x3>, 2 * <64@3x3>, <512>, <10>"},
  };
  const auto it = table.find(model_name);
  if (it == table.end()) throw UsageError("unknown reference model '" + model_name + "'");
  return it->second;
}

}  // namespace neuropath
