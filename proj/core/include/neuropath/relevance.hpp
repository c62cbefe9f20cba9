#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "neuropath/network.hpp"

namespace neuropath {

// How a dense/conv layer's bias enters the redistribution denominator.
enum class BiasHandling {
  // Denominator is the sum of contributions z_jk alone, so every layer
  // passes on exactly the relevance it received.
  excluded,
  // Denominator is sum_j z_jk + b_k; the bias share is absorbed and dropped.
  absorbed,
};

struct RelevanceOptions {
  double epsilon = 1e-9;
  BiasHandling bias = BiasHandling::excluded;
};

// Relevance of every neuron for one input. per_layer[0] is the network
// input; per_layer[l + 1] is the output of layer l (ReLU passes relevance
// through unchanged, so it is shared by pre- and post-activation).
struct RelevanceMap {
  std::vector<std::vector<double>> per_layer;
  double total = 0.0;  // summed relevance at the input layer

  std::span<const double> layer_output(std::size_t layer) const {
    return per_layer[layer + 1];
  }
  std::span<const double> input() const { return per_layer.front(); }
};

// Seeds the output layer with logits[target_class] at target_class (zero
// elsewhere) and applies the epsilon-stabilized z-rule layer by layer:
//   R_j = sum_k  z_jk / stab(d_k) * R_k,   z_jk = a_j * w_jk,  d_k = sum_j z_jk (+ b_k if absorbed)
// where stab(d) = d when |d| >= eps and eps * sign(d) otherwise (sign(0) = 1).
// Max-pool routes relevance to the window winner; flatten reshapes.
// Throws NumericError naming the layer if any relevance is non-finite and
// IndexError for an out-of-range class.
RelevanceMap propagate_relevance(const Network& net, const ActivationTrace& trace,
                                 std::size_t target_class,
                                 const RelevanceOptions& options = {});

}  // namespace neuropath
