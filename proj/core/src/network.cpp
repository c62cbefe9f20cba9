#include "neuropath/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "detail.hpp"
#include "neuropath/errors.hpp"

namespace neuropath {

std::size_t element_count(const Shape& shape) {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::flatten: return "flatten";
  }
  return "unknown";
}

std::string to_string(Activation activation) {
  return activation == Activation::relu ? "relu" : "none";
}

LayerKind parse_layer_kind(const std::string& text) {
  if (text == "dense") return LayerKind::dense;
  if (text == "conv2d") return LayerKind::conv2d;
  if (text == "maxpool") return LayerKind::maxpool;
  if (text == "flatten") return LayerKind::flatten;
  throw FormatError("unknown layer kind '" + text + "'");
}

Activation parse_activation(const std::string& text) {
  if (text == "relu") return Activation::relu;
  if (text == "none" || text.empty()) return Activation::none;
  throw FormatError("unknown activation '" + text + "'");
}

// ---------------------------------------------------------------------------
// Layer

Layer Layer::dense(std::size_t in, std::size_t out, Activation activation,
                   std::vector<double> weights, std::vector<double> bias) {
  if (in == 0 || out == 0) {
    throw DimensionError("dense layer needs nonzero in/out dims");
  }
  if (weights.size() != in * out) {
    throw DimensionError("dense weights have " +
                         std::to_string(weights.size()) + " entries, expected " +
                         std::to_string(in * out) + " (" + std::to_string(out) +
                         "x" + std::to_string(in) + ")");
  }
  if (bias.size() != out) {
    throw DimensionError("dense bias has " + std::to_string(bias.size()) +
                         " entries, expected " + std::to_string(out));
  }
  Layer layer;
  layer.kind_ = LayerKind::dense;
  layer.activation_ = activation;
  layer.input_shape_ = {in};
  layer.output_shape_ = {out};
  layer.weights_ = std::move(weights);
  layer.bias_ = std::move(bias);
  return layer;
}

Layer Layer::conv2d(const Shape& input_shape, std::size_t out_channels,
                    std::size_t kernel, Activation activation,
                    std::vector<double> weights, std::vector<double> bias) {
  if (input_shape.size() != 3) {
    throw DimensionError("conv2d expects a [c][h][w] input, got " +
                         to_string(input_shape));
  }
  const std::size_t c = input_shape[0];
  const std::size_t h = input_shape[1];
  const std::size_t w = input_shape[2];
  if (kernel == 0 || kernel > h || kernel > w || out_channels == 0 || c == 0) {
    throw DimensionError("conv2d kernel " + std::to_string(kernel) +
                         " does not fit input " + to_string(input_shape));
  }
  const std::size_t expected = out_channels * c * kernel * kernel;
  if (weights.size() != expected) {
    throw DimensionError("conv2d weights have " +
                         std::to_string(weights.size()) + " entries, expected " +
                         std::to_string(expected));
  }
  if (bias.size() != out_channels) {
    throw DimensionError("conv2d bias has " + std::to_string(bias.size()) +
                         " entries, expected " + std::to_string(out_channels));
  }
  Layer layer;
  layer.kind_ = LayerKind::conv2d;
  layer.activation_ = activation;
  layer.input_shape_ = input_shape;
  layer.output_shape_ = {out_channels, h - kernel + 1, w - kernel + 1};
  layer.kernel_ = kernel;
  layer.weights_ = std::move(weights);
  layer.bias_ = std::move(bias);
  return layer;
}

Layer Layer::maxpool(const Shape& input_shape) {
  if (input_shape.size() != 3 || input_shape[1] < 2 || input_shape[2] < 2) {
    throw DimensionError("maxpool expects a [c][h][w] input with h,w >= 2, got " +
                         to_string(input_shape));
  }
  Layer layer;
  layer.kind_ = LayerKind::maxpool;
  layer.input_shape_ = input_shape;
  layer.output_shape_ = {input_shape[0], input_shape[1] / 2, input_shape[2] / 2};
  return layer;
}

Layer Layer::flatten(const Shape& input_shape) {
  if (element_count(input_shape) == 0) {
    throw DimensionError("flatten of an empty shape");
  }
  Layer layer;
  layer.kind_ = LayerKind::flatten;
  layer.input_shape_ = input_shape;
  layer.output_shape_ = {element_count(input_shape)};
  return layer;
}

std::size_t Layer::in_channels() const {
  return kind_ == LayerKind::conv2d ? input_shape_[0] : 0;
}

std::size_t Layer::out_channels() const {
  return kind_ == LayerKind::conv2d ? output_shape_[0] : 0;
}

// ---------------------------------------------------------------------------
// Network

Network::Network(Shape input_shape, std::vector<Layer> layers)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
  if (layers_.empty()) throw DimensionError("network has no layers");
  if (element_count(input_shape_) == 0) {
    throw DimensionError("network input shape is empty");
  }
  const Shape* previous = &input_shape_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].input_shape() != *previous) {
      throw DimensionError("layer " + std::to_string(i) + " (" +
                           to_string(layers_[i].kind()) + ") expects input " +
                           to_string(layers_[i].input_shape()) + " but receives " +
                           to_string(*previous));
    }
    previous = &layers_[i].output_shape();
  }
  if (layers_.back().output_shape().size() != 1) {
    throw DimensionError("final layer must produce a flat logit vector");
  }
  std::vector<std::size_t> parameterized;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].has_parameters()) parameterized.push_back(i);
  }
  if (!parameterized.empty()) {
    hidden_.assign(parameterized.begin(), parameterized.end() - 1);
  }
  check_finite();
}

std::size_t Network::num_parameterized_layers() const {
  return static_cast<std::size_t>(
      std::count_if(layers_.begin(), layers_.end(),
                    [](const Layer& l) { return l.has_parameters(); }));
}

void Network::check_finite() const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (double v : layers_[i].weights()) {
      if (!std::isfinite(v)) {
        throw NumericError("layer " + std::to_string(i) +
                           " has a non-finite weight");
      }
    }
    for (double v : layers_[i].bias()) {
      if (!std::isfinite(v)) {
        throw NumericError("layer " + std::to_string(i) +
                           " has a non-finite bias");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Forward

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

namespace {

void dense_forward(const Layer& layer, std::span<const double> in,
                   std::span<double> out) {
  const std::size_t n_in = layer.in_size();
  const auto w = layer.weights();
  const auto b = layer.bias();
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double* row = w.data() + k * n_in;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_in; ++j) acc += row[j] * in[j];
    out[k] = acc + b[k];
  }
}

void conv_forward(const Layer& layer, std::span<const double> in,
                  std::span<double> out) {
  const std::size_t c_in = layer.input_shape()[0];
  const std::size_t h = layer.input_shape()[1];
  const std::size_t w = layer.input_shape()[2];
  const std::size_t c_out = layer.output_shape()[0];
  const std::size_t oh = layer.output_shape()[1];
  const std::size_t ow = layer.output_shape()[2];
  const std::size_t k = layer.kernel();
  const auto weights = layer.weights();
  const auto bias = layer.bias();
  for (std::size_t oc = 0; oc < c_out; ++oc) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (std::size_t ic = 0; ic < c_in; ++ic) {
          const double* kern = weights.data() + ((oc * c_in + ic) * k) * k;
          const double* plane = in.data() + ic * h * w;
          for (std::size_t ky = 0; ky < k; ++ky) {
            const double* row = plane + (y + ky) * w + x;
            for (std::size_t kx = 0; kx < k; ++kx) {
              acc += kern[ky * k + kx] * row[kx];
            }
          }
        }
        out[(oc * oh + y) * ow + x] = acc + bias[oc];
      }
    }
  }
}

}  // namespace

namespace detail {

std::size_t maxpool_winner(const Shape& input_shape, std::span<const double> in,
                           std::size_t channel, std::size_t oy, std::size_t ox) {
  const std::size_t h = input_shape[1];
  const std::size_t w = input_shape[2];
  std::size_t best = (channel * h + 2 * oy) * w + 2 * ox;
  for (std::size_t dy = 0; dy < 2; ++dy) {
    for (std::size_t dx = 0; dx < 2; ++dx) {
      const std::size_t idx = (channel * h + 2 * oy + dy) * w + 2 * ox + dx;
      if (in[idx] > in[best]) best = idx;
    }
  }
  return best;
}

}  // namespace detail

using detail::maxpool_winner;

ActivationTrace forward(const Network& net, std::span<const double> input) {
  if (input.size() != net.input_size()) {
    throw DimensionError("layer 0: input has " + std::to_string(input.size()) +
                         " values, network expects " +
                         std::to_string(net.input_size()) + " " +
                         to_string(net.input_shape()));
  }
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!std::isfinite(input[i])) {
      throw DimensionError("input entry " + std::to_string(i) +
                           " is not finite");
    }
  }

  ActivationTrace trace;
  trace.input.assign(input.begin(), input.end());
  trace.pre_activations.resize(net.size());
  trace.post_activations.resize(net.size());

  for (std::size_t l = 0; l < net.size(); ++l) {
    const Layer& layer = net.layer(l);
    const std::span<const double> in = trace.layer_input(l);
    std::vector<double>& pre = trace.pre_activations[l];
    pre.assign(layer.out_size(), 0.0);

    switch (layer.kind()) {
      case LayerKind::dense:
        dense_forward(layer, in, pre);
        break;
      case LayerKind::conv2d:
        conv_forward(layer, in, pre);
        break;
      case LayerKind::maxpool: {
        const auto& os = layer.output_shape();
        for (std::size_t c = 0; c < os[0]; ++c)
          for (std::size_t y = 0; y < os[1]; ++y)
            for (std::size_t x = 0; x < os[2]; ++x)
              pre[(c * os[1] + y) * os[2] + x] =
                  in[maxpool_winner(layer.input_shape(), in, c, y, x)];
        break;
      }
      case LayerKind::flatten:
        std::copy(in.begin(), in.end(), pre.begin());
        break;
    }

    std::vector<double>& post = trace.post_activations[l];
    post = pre;
    if (layer.activation() == Activation::relu) {
      for (double& v : post) v = std::max(0.0, v);
    }
  }
  trace.predicted_class = argmax(trace.logits());
  return trace;
}

Prediction predict(const Network& net, std::span<const double> input) {
  ActivationTrace trace = forward(net, input);
  return {trace.predicted_class, std::move(trace.post_activations.back())};
}

// ---------------------------------------------------------------------------
// Backward

ParameterGradients ParameterGradients::zeros_like(const Network& net) {
  ParameterGradients g;
  g.weights.resize(net.size());
  g.bias.resize(net.size());
  for (std::size_t l = 0; l < net.size(); ++l) {
    g.weights[l].assign(net.layer(l).weights().size(), 0.0);
    g.bias[l].assign(net.layer(l).bias().size(), 0.0);
  }
  return g;
}

void ParameterGradients::clear() {
  for (auto& v : weights) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : bias) std::fill(v.begin(), v.end(), 0.0);
}

std::vector<double> backward(const Network& net, const ActivationTrace& trace,
                             const std::vector<std::vector<double>>& pre_seeds,
                             ParameterGradients* params,
                             bool want_input_gradient) {
  if (pre_seeds.size() != net.size()) {
    throw DimensionError("backward: expected " + std::to_string(net.size()) +
                         " seed slots, got " + std::to_string(pre_seeds.size()));
  }
  // Start at the highest seeded layer; nothing above it contributes.
  std::size_t top = net.size();
  while (top > 0 && pre_seeds[top - 1].empty()) --top;
  if (top == 0) {
    return want_input_gradient ? std::vector<double>(net.input_size(), 0.0)
                               : std::vector<double>{};
  }

  std::vector<double> grad_post;  // gradient w.r.t. output of current layer
  std::vector<double> grad_pre;
  for (std::size_t l = top; l-- > 0;) {
    const Layer& layer = net.layer(l);
    const auto& pre = trace.pre_activations[l];
    grad_pre.assign(layer.out_size(), 0.0);
    if (!grad_post.empty()) {
      if (layer.activation() == Activation::relu) {
        for (std::size_t k = 0; k < grad_pre.size(); ++k) {
          grad_pre[k] = pre[k] > 0.0 ? grad_post[k] : 0.0;
        }
      } else {
        grad_pre = grad_post;
      }
    }
    if (!pre_seeds[l].empty()) {
      if (pre_seeds[l].size() != grad_pre.size()) {
        throw DimensionError("backward: seed for layer " + std::to_string(l) +
                             " has wrong length");
      }
      for (std::size_t k = 0; k < grad_pre.size(); ++k) {
        grad_pre[k] += pre_seeds[l][k];
      }
    }

    const std::span<const double> in = trace.layer_input(l);
    const bool need_in = l > 0 || want_input_gradient;
    std::vector<double> grad_in(need_in ? layer.in_size() : 0, 0.0);

    switch (layer.kind()) {
      case LayerKind::dense: {
        const std::size_t n_in = layer.in_size();
        const auto w = layer.weights();
        for (std::size_t k = 0; k < grad_pre.size(); ++k) {
          const double g = grad_pre[k];
          if (g == 0.0) continue;
          const double* row = w.data() + k * n_in;
          if (need_in) {
            for (std::size_t j = 0; j < n_in; ++j) grad_in[j] += row[j] * g;
          }
          if (params) {
            double* gw = params->weights[l].data() + k * n_in;
            for (std::size_t j = 0; j < n_in; ++j) gw[j] += in[j] * g;
            params->bias[l][k] += g;
          }
        }
        break;
      }
      case LayerKind::conv2d: {
        const std::size_t c_in = layer.input_shape()[0];
        const std::size_t h = layer.input_shape()[1];
        const std::size_t w = layer.input_shape()[2];
        const std::size_t c_out = layer.output_shape()[0];
        const std::size_t oh = layer.output_shape()[1];
        const std::size_t ow = layer.output_shape()[2];
        const std::size_t k = layer.kernel();
        const auto weights = layer.weights();
        for (std::size_t oc = 0; oc < c_out; ++oc) {
          for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
              const double g = grad_pre[(oc * oh + y) * ow + x];
              if (g == 0.0) continue;
              if (params) params->bias[l][oc] += g;
              for (std::size_t ic = 0; ic < c_in; ++ic) {
                const std::size_t kbase = ((oc * c_in + ic) * k) * k;
                for (std::size_t ky = 0; ky < k; ++ky) {
                  for (std::size_t kx = 0; kx < k; ++kx) {
                    const std::size_t idx = (ic * h + y + ky) * w + x + kx;
                    const std::size_t widx = kbase + ky * k + kx;
                    if (need_in) grad_in[idx] += weights[widx] * g;
                    if (params) params->weights[l][widx] += in[idx] * g;
                  }
                }
              }
            }
          }
        }
        break;
      }
      case LayerKind::maxpool: {
        if (!need_in) break;
        const auto& os = layer.output_shape();
        for (std::size_t c = 0; c < os[0]; ++c)
          for (std::size_t y = 0; y < os[1]; ++y)
            for (std::size_t x = 0; x < os[2]; ++x)
              grad_in[maxpool_winner(layer.input_shape(), in, c, y, x)] +=
                  grad_pre[(c * os[1] + y) * os[2] + x];
        break;
      }
      case LayerKind::flatten:
        if (need_in) grad_in = grad_pre;
        break;
    }
    grad_post = std::move(grad_in);
  }
  return want_input_gradient ? grad_post : std::vector<double>{};
}

double evaluate_objective(const ActivationTrace& trace,
                          std::span<const ObjectiveTerm> terms) {
  double value = 0.0;
  for (const auto& t : terms) {
    value += t.weight * trace.pre_activations.at(t.layer).at(t.neuron);
  }
  return value;
}

std::vector<double> input_gradient(const Network& net,
                                   const ActivationTrace& trace,
                                   std::span<const ObjectiveTerm> terms) {
  std::vector<std::vector<double>> seeds(net.size());
  for (const auto& t : terms) {
    if (t.layer >= net.size()) {
      throw IndexError("objective references layer " + std::to_string(t.layer) +
                       " of a " + std::to_string(net.size()) + "-layer network");
    }
    const std::size_t width = net.layer(t.layer).out_size();
    if (t.neuron >= width) {
      throw IndexError("objective references neuron " +
                       std::to_string(t.neuron) + " of layer " +
                       std::to_string(t.layer) + " (width " +
                       std::to_string(width) + ")");
    }
    if (seeds[t.layer].empty()) seeds[t.layer].assign(width, 0.0);
    seeds[t.layer][t.neuron] += t.weight;
  }
  return backward(net, trace, seeds, nullptr, true);
}

std::vector<double> input_gradient(const Network& net,
                                   std::span<const double> input,
                                   std::span<const ObjectiveTerm> terms) {
  return input_gradient(net, forward(net, input), terms);
}

}  // namespace neuropath
