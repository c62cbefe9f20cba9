#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "neuropath/dataset.hpp"
#include "neuropath/network.hpp"

namespace neuropath {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kManifestName = "manifest.json";

// Writes `<directory>/manifest.json` plus one little-endian float32 file per
// weight and bias tensor. Returns the manifest path.
//
// Manifest fields: format_version, input_shape, and per layer
// kind, in, out, activation, weight_file, bias_file (conv layers add kernel,
// in_ch, out_ch). `in`/`out` are element counts.
std::filesystem::path save_model(const Network& net,
                                 const std::filesystem::path& directory);

// Accepts either the manifest path or the directory containing it.
Network load_model(const std::filesystem::path& manifest);

// MNIST IDX files (images magic 2051, labels magic 2049, big-endian header).
// Pixels are scaled byte/255.
Dataset load_mnist(const std::filesystem::path& images,
                   const std::filesystem::path& labels,
                   const std::string& name = "mnist");

// CIFAR-10 binary batches: records of 1 label byte + 3072 channel-first
// pixel bytes. Output shape is [3][32][32].
Dataset load_cifar10(std::span<const std::filesystem::path> batches,
                     const std::string& name = "cifar10");

// Raw little-endian float32 tensors.
void write_float32_file(const std::filesystem::path& path,
                        std::span<const double> values);
std::vector<double> read_float32_file(const std::filesystem::path& path);

}  // namespace neuropath
