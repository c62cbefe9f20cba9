#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "neuropath/network.hpp"
#include "neuropath/relevance.hpp"

namespace neuropath {

struct AnalysisConfig {
  double alpha = 0.7;  // criticality coefficient, (0,1]
  double beta = 0.0;   // a neuron is active when post-activation > beta

  void validate() const;
};

// Critical neurons of one input: for each hidden layer (in the order of
// Network::hidden_layers()), the ascending neuron indices selected.
struct CriticalPath {
  std::vector<std::size_t> layers;                     // network layer indices
  std::vector<std::vector<std::size_t>> per_layer;     // sorted neuron indices

  std::size_t total_size() const;
  bool contains(std::size_t hidden_ordinal, std::size_t neuron) const;
};

// Shortest prefix of the positive relevances, ordered by decreasing value
// (ties: lower index first), whose sum exceeds `threshold`. When even the
// full positive sum does not exceed it, every positive neuron is returned.
// Result is sorted ascending.
std::vector<std::size_t> select_critical(std::span<const double> relevance,
                                         double threshold);

// Applies select_critical with threshold alpha * rmap.total to every hidden
// layer. Returns nullopt when rmap.total <= 0: the criterion has no meaning
// for a non-positive prediction score and such inputs are skipped.
std::optional<CriticalPath> extract_cdp(const Network& net, const RelevanceMap& rmap,
                                        double alpha);

}  // namespace neuropath
