#pragma once

#include <cstdint>
#include <functional>

#include "neuropath/dataset.hpp"
#include "neuropath/network.hpp"

namespace neuropath {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;  // percent
};

// Mini-batch SGD (no momentum) on softmax cross-entropy. Sample order is
// reshuffled every epoch from `cfg.seed`; the run is single-threaded and
// bitwise reproducible.
Network train(const Network& net, const Dataset& data, const TrainConfig& cfg,
              const std::function<void(const EpochStats&)>& on_epoch = {});

// Mean softmax cross-entropy of the logits against `label`.
double cross_entropy(std::span<const double> logits, std::size_t label);

// Percentage of samples classified correctly.
double accuracy(const Network& net, const Dataset& data);

}  // namespace neuropath
