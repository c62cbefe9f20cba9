#include "neuropath/pathways.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "neuropath/errors.hpp"

namespace neuropath {

void AnalysisConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw UsageError("--alpha must lie in (0,1], got " + std::to_string(alpha));
  }
  if (!std::isfinite(beta)) throw UsageError("--beta must be finite");
}

std::size_t CriticalPath::total_size() const {
  std::size_t n = 0;
  for (const auto& layer : per_layer) n += layer.size();
  return n;
}

bool CriticalPath::contains(std::size_t hidden_ordinal, std::size_t neuron) const {
  const auto& sel = per_layer.at(hidden_ordinal);
  return std::binary_search(sel.begin(), sel.end(), neuron);
}

std::vector<std::size_t> select_critical(std::span<const double> relevance,
                                         double threshold) {
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < relevance.size(); ++i) {
    if (relevance[i] > 0.0) positive.push_back(i);
  }
  std::stable_sort(positive.begin(), positive.end(),
                   [&](std::size_t a, std::size_t b) { return relevance[a] > relevance[b]; });

  std::size_t take = positive.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < positive.size(); ++i) {
    sum += relevance[positive[i]];
    if (sum > threshold) {
      take = i + 1;
      break;
    }
  }
  positive.resize(take);
  std::sort(positive.begin(), positive.end());
  return positive;
}

std::optional<CriticalPath> extract_cdp(const Network& net, const RelevanceMap& rmap,
                                        double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw UsageError("alpha must lie in (0,1], got " + std::to_string(alpha));
  }
  if (rmap.per_layer.size() != net.size() + 1) {
    throw DimensionError("relevance map does not belong to this network");
  }
  if (!(rmap.total > 0.0)) return std::nullopt;

  CriticalPath path;
  path.layers = net.hidden_layers();
  const double threshold = alpha * rmap.total;
  for (std::size_t layer : path.layers) {
    path.per_layer.push_back(select_critical(rmap.layer_output(layer), threshold));
  }
  return path;
}

}  // namespace neuropath
