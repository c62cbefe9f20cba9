#pragma once

#include <cstddef>
#include <span>

#include "neuropath/network.hpp"

namespace neuropath::detail {

// Flat input index of the winning element of a 2x2/stride-2 pooling window.
// Ties go to the first element in row-major window order.
std::size_t maxpool_winner(const Shape& input_shape, std::span<const double> in,
                           std::size_t channel, std::size_t oy, std::size_t ox);

}  // namespace neuropath::detail
