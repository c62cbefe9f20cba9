#include "neuropath/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "neuropath/errors.hpp"

namespace neuropath {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("learning rate must be positive, got " +
                     std::to_string(learning_rate));
  }
  if (batch_size == 0) throw UsageError("batch size must be at least 1");
}

double cross_entropy(std::span<const double> logits, std::size_t label) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - m);
  return std::log(sum) + m - logits[label];
}

double accuracy(const Network& net, const Dataset& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (forward(net, data.input(i)).predicted_class == data.label(i)) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
}

Network train(const Network& net, const Dataset& data, const TrainConfig& cfg,
              const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.validate();
  if (data.empty()) throw DataError("training set '" + data.name() + "' is empty");
  if (data.input_size() != net.input_size()) {
    throw DimensionError("training inputs have " + std::to_string(data.input_size()) +
                         " values, network expects " + std::to_string(net.input_size()));
  }
  const std::size_t classes = net.num_classes();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.label(i) >= classes) {
      throw DataError("label " + std::to_string(data.label(i)) + " of sample " +
                      std::to_string(i) + " is outside [0," +
                      std::to_string(classes) + ")");
    }
  }

  Network model = net;
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  ParameterGradients grads = ParameterGradients::zeros_like(model);
  std::vector<std::vector<double>> seeds(model.size());
  const std::size_t out_layer = model.size() - 1;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      grads.clear();
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        const ActivationTrace trace = forward(model, data.input(idx));
        const auto logits = trace.logits();
        const std::size_t label = data.label(idx);
        loss_sum += cross_entropy(logits, label);
        if (trace.predicted_class == label) ++correct;

        // d(CE)/d(logits) = softmax - onehot
        const double m = *std::max_element(logits.begin(), logits.end());
        std::vector<double>& seed = seeds[out_layer];
        seed.resize(logits.size());
        double z = 0.0;
        for (std::size_t k = 0; k < logits.size(); ++k) {
          seed[k] = std::exp(logits[k] - m);
          z += seed[k];
        }
        for (std::size_t k = 0; k < logits.size(); ++k) seed[k] /= z;
        seed[label] -= 1.0;
        backward(model, trace, seeds, &grads, false);
      }
      const double scale = cfg.learning_rate / static_cast<double>(end - start);
      for (std::size_t l = 0; l < model.size(); ++l) {
        Layer& layer = model.mutable_layer(l);
        auto w = layer.mutable_weights();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= scale * grads.weights[l][i];
        auto bias = layer.mutable_bias();
        for (std::size_t i = 0; i < bias.size(); ++i) bias[i] -= scale * grads.bias[l][i];
      }
    }
    model.check_finite();
    if (on_epoch) {
      on_epoch({epoch + 1, loss_sum / static_cast<double>(data.size()),
                100.0 * static_cast<double>(correct) / static_cast<double>(data.size())});
    }
  }
  return model;
}

}  // namespace neuropath
