#include "neuropath/dataset.hpp"

#include <algorithm>

#include "neuropath/errors.hpp"

namespace neuropath {

Dataset::Dataset(std::string name, Shape input_shape)
    : name_(std::move(name)),
      input_shape_(std::move(input_shape)),
      stride_(element_count(input_shape_)) {}

void Dataset::add(std::span<const double> input, std::size_t label) {
  if (input.size() != stride_) {
    throw DataError(name_ + ": sample " + std::to_string(size()) + " has " +
                    std::to_string(input.size()) + " values, expected " +
                    std::to_string(stride_));
  }
  for (double v : input) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DataError(name_ + ": sample " + std::to_string(size()) +
                      " has a value outside [0,1]");
    }
  }
  values_.insert(values_.end(), input.begin(), input.end());
  labels_.push_back(label);
}

void Dataset::reserve(std::size_t n) {
  values_.reserve(n * stride_);
  labels_.reserve(n);
}

Dataset Dataset::head(std::size_t n) const {
  Dataset out(name_, input_shape_);
  n = std::min(n, size());
  out.values_.assign(values_.begin(), values_.begin() + n * stride_);
  out.labels_.assign(labels_.begin(), labels_.begin() + n);
  return out;
}

Dataset Dataset::filter_class(std::size_t label,
                              std::vector<std::size_t>* indices) const {
  Dataset out(name_, input_shape_);
  if (indices) indices->clear();
  for (std::size_t i = 0; i < size(); ++i) {
    if (labels_[i] != label) continue;
    out.add(input(i), label);
    if (indices) indices->push_back(i);
  }
  return out;
}

std::size_t Dataset::max_label() const {
  return labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end());
}

}  // namespace neuropath
