#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace neuropath {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

enum class LayerKind { dense, conv2d, maxpool, flatten };
enum class Activation { none, relu };

std::string to_string(LayerKind kind);
std::string to_string(Activation activation);
LayerKind parse_layer_kind(const std::string& text);
Activation parse_activation(const std::string& text);

// One stage of a feedforward network. Shapes are carried explicitly so that
// convolution and pooling know their spatial extent.
//
// Parameter layouts:
//   dense  : weights [out][in] row-major, bias [out]
//   conv2d : weights [out_ch][in_ch][k][k], bias [out_ch]; valid padding,
//            stride 1; input and output are channels-first [c][h][w]
//   maxpool: 2x2 window, stride 2, no parameters
//   flatten: reshape to rank 1, no parameters
class Layer {
 public:
  static Layer dense(std::size_t in, std::size_t out, Activation activation,
                     std::vector<double> weights, std::vector<double> bias);
  static Layer conv2d(const Shape& input_shape, std::size_t out_channels,
                      std::size_t kernel, Activation activation,
                      std::vector<double> weights, std::vector<double> bias);
  static Layer maxpool(const Shape& input_shape);
  static Layer flatten(const Shape& input_shape);

  LayerKind kind() const { return kind_; }
  Activation activation() const { return activation_; }
  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return output_shape_; }
  std::size_t in_size() const { return element_count(input_shape_); }
  std::size_t out_size() const { return element_count(output_shape_); }
  bool has_parameters() const {
    return kind_ == LayerKind::dense || kind_ == LayerKind::conv2d;
  }

  // Convolution geometry; zero for other kinds.
  std::size_t kernel() const { return kernel_; }
  std::size_t in_channels() const;
  std::size_t out_channels() const;

  std::span<const double> weights() const { return weights_; }
  std::span<const double> bias() const { return bias_; }
  std::span<double> mutable_weights() { return weights_; }
  std::span<double> mutable_bias() { return bias_; }

 private:
  Layer() = default;

  LayerKind kind_ = LayerKind::dense;
  Activation activation_ = Activation::none;
  Shape input_shape_;
  Shape output_shape_;
  std::size_t kernel_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// Ordered stack of layers. Construction validates that shapes chain and all
// parameters are finite; afterwards the network is only read, so one
// instance can be shared by concurrent workers.
class Network {
 public:
  Network(Shape input_shape, std::vector<Layer> layers);

  const Shape& input_shape() const { return input_shape_; }
  std::size_t input_size() const { return element_count(input_shape_); }
  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(std::size_t index) const { return layers_.at(index); }
  std::size_t size() const { return layers_.size(); }
  std::size_t num_classes() const { return layers_.back().out_size(); }

  // Count of dense/conv layers (the "L" of the architecture tables).
  std::size_t num_parameterized_layers() const;

  // Layers whose output neurons are analyzed: every parameterized layer
  // except the final (output) one.
  const std::vector<std::size_t>& hidden_layers() const { return hidden_; }

  // Used by the trainer; callers must keep parameters finite.
  Layer& mutable_layer(std::size_t index) { return layers_.at(index); }

  // Throws NumericError naming the first non-finite parameter.
  void check_finite() const;

 private:
  Shape input_shape_;
  std::vector<Layer> layers_;
  std::vector<std::size_t> hidden_;
};

// Every intermediate value of one forward pass. For maxpool/flatten layers
// pre and post activations coincide.
struct ActivationTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> pre_activations;
  std::vector<std::vector<double>> post_activations;
  std::size_t predicted_class = 0;

  std::span<const double> logits() const { return post_activations.back(); }
  // Values fed into layer `index`.
  std::span<const double> layer_input(std::size_t index) const {
    return index == 0 ? std::span<const double>(input)
                      : std::span<const double>(post_activations[index - 1]);
  }
};

struct Prediction {
  std::size_t predicted_class = 0;
  std::vector<double> logits;
};

// Lowest index among maxima.
std::size_t argmax(std::span<const double> values);

ActivationTrace forward(const Network& net, std::span<const double> input);
Prediction predict(const Network& net, std::span<const double> input);

// A scalar objective: sum of weight * pre_activation[layer][neuron]. The
// output layer's pre-activations are the logits.
struct ObjectiveTerm {
  std::size_t layer = 0;
  std::size_t neuron = 0;
  double weight = 1.0;
};

// Evaluates the objective on an existing trace.
double evaluate_objective(const ActivationTrace& trace,
                          std::span<const ObjectiveTerm> terms);

// d(objective)/d(input) by reverse-mode accumulation. ReLU derivative is 0
// wherever the pre-activation is <= 0.
std::vector<double> input_gradient(const Network& net,
                                   std::span<const double> input,
                                   std::span<const ObjectiveTerm> terms);
std::vector<double> input_gradient(const Network& net,
                                   const ActivationTrace& trace,
                                   std::span<const ObjectiveTerm> terms);

struct ParameterGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;

  static ParameterGradients zeros_like(const Network& net);
  void clear();
};

// General reverse pass. `pre_seeds[l]` (empty when unused) is added to the
// gradient flowing into layer l's pre-activation. Parameter gradients are
// accumulated into `params` when non-null. Returns the input gradient when
// `want_input_gradient`, otherwise an empty vector.
std::vector<double> backward(const Network& net, const ActivationTrace& trace,
                             const std::vector<std::vector<double>>& pre_seeds,
                             ParameterGradients* params,
                             bool want_input_gradient = true);

}  // namespace neuropath
