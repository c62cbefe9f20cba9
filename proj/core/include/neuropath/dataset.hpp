#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "neuropath/network.hpp"

namespace neuropath {

// Labeled inputs stored contiguously. Every value lies in [0,1].
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, Shape input_shape);

  const std::string& name() const { return name_; }
  const Shape& input_shape() const { return input_shape_; }
  std::size_t input_size() const { return stride_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> input(std::size_t i) const {
    return {values_.data() + i * stride_, stride_};
  }
  std::size_t label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::size_t>& labels() const { return labels_; }

  // Throws DataError when the input has the wrong length or leaves [0,1].
  void add(std::span<const double> input, std::size_t label);
  void reserve(std::size_t n);

  // First `n` samples (or all when n >= size()).
  Dataset head(std::size_t n) const;
  // Samples whose label equals `label`, with their original indices.
  Dataset filter_class(std::size_t label, std::vector<std::size_t>* indices = nullptr) const;

  std::size_t max_label() const;

 private:
  std::string name_;
  Shape input_shape_;
  std::size_t stride_ = 0;
  std::vector<double> values_;
  std::vector<std::size_t> labels_;
};

}  // namespace neuropath
