#include "neuropath/relevance.hpp"

#include <cmath>
#include <numeric>

#include "detail.hpp"
#include "neuropath/errors.hpp"

namespace neuropath {

namespace {

// Denominators smaller than eps in magnitude are raised to +-eps.
double stabilize(double d, double eps) {
  if (std::abs(d) >= eps) return d;
  return d >= 0.0 ? eps : -eps;
}

void dense_relevance(const Layer& layer, std::span<const double> a,
                     std::span<const double> r_out, std::span<double> r_in,
                     const RelevanceOptions& opt) {
  const std::size_t n_in = layer.in_size();
  const auto w = layer.weights();
  const auto b = layer.bias();
  for (std::size_t k = 0; k < r_out.size(); ++k) {
    if (r_out[k] == 0.0) continue;
    const double* row = w.data() + k * n_in;
    double d = 0.0;
    for (std::size_t j = 0; j < n_in; ++j) d += a[j] * row[j];
    if (opt.bias == BiasHandling::absorbed) d += b[k];
    const double s = r_out[k] / stabilize(d, opt.epsilon);
    for (std::size_t j = 0; j < n_in; ++j) r_in[j] += a[j] * row[j] * s;
  }
}

void conv_relevance(const Layer& layer, std::span<const double> a,
                    std::span<const double> r_out, std::span<double> r_in,
                    const RelevanceOptions& opt) {
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
        const double r = r_out[(oc * oh + y) * ow + x];
        if (r == 0.0) continue;
        double d = 0.0;
        for (std::size_t ic = 0; ic < c_in; ++ic)
          for (std::size_t ky = 0; ky < k; ++ky)
            for (std::size_t kx = 0; kx < k; ++kx)
              d += a[(ic * h + y + ky) * w + x + kx] *
                   weights[((oc * c_in + ic) * k + ky) * k + kx];
        if (opt.bias == BiasHandling::absorbed) d += bias[oc];
        const double s = r / stabilize(d, opt.epsilon);
        for (std::size_t ic = 0; ic < c_in; ++ic)
          for (std::size_t ky = 0; ky < k; ++ky)
            for (std::size_t kx = 0; kx < k; ++kx) {
              const std::size_t idx = (ic * h + y + ky) * w + x + kx;
              r_in[idx] += a[idx] * weights[((oc * c_in + ic) * k + ky) * k + kx] * s;
            }
      }
    }
  }
}

}  // namespace

RelevanceMap propagate_relevance(const Network& net, const ActivationTrace& trace,
                                 std::size_t target_class,
                                 const RelevanceOptions& options) {
  const auto logits = trace.logits();
  if (target_class >= logits.size()) {
    throw IndexError("relevance target class " + std::to_string(target_class) +
                     " outside [0," + std::to_string(logits.size()) + ")");
  }
  if (trace.pre_activations.size() != net.size()) {
    throw DimensionError("activation trace does not belong to this network");
  }

  RelevanceMap map;
  map.per_layer.resize(net.size() + 1);
  map.per_layer.back().assign(logits.size(), 0.0);
  map.per_layer.back()[target_class] = logits[target_class];

  for (std::size_t l = net.size(); l-- > 0;) {
    const Layer& layer = net.layer(l);
    const std::span<const double> r_out = map.per_layer[l + 1];
    const std::span<const double> a = trace.layer_input(l);
    std::vector<double>& r_in = map.per_layer[l];
    r_in.assign(layer.in_size(), 0.0);

    switch (layer.kind()) {
      case LayerKind::dense:
        dense_relevance(layer, a, r_out, r_in, options);
        break;
      case LayerKind::conv2d:
        conv_relevance(layer, a, r_out, r_in, options);
        break;
      case LayerKind::maxpool: {
        const auto& os = layer.output_shape();
        for (std::size_t c = 0; c < os[0]; ++c)
          for (std::size_t y = 0; y < os[1]; ++y)
            for (std::size_t x = 0; x < os[2]; ++x)
              r_in[detail::maxpool_winner(layer.input_shape(), a, c, y, x)] +=
                  r_out[(c * os[1] + y) * os[2] + x];
        break;
      }
      case LayerKind::flatten:
        std::copy(r_out.begin(), r_out.end(), r_in.begin());
        break;
    }

    for (double v : r_in) {
      if (!std::isfinite(v)) {
        throw NumericError("non-finite relevance below layer " + std::to_string(l) +
                           " (" + to_string(layer.kind()) + ")");
      }
    }
  }
  map.total = std::accumulate(map.per_layer.front().begin(),
                              map.per_layer.front().end(), 0.0);
  return map;
}

}  // namespace neuropath
