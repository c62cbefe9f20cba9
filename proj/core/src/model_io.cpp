#include "neuropath/model_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "neuropath/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace neuropath {

namespace {

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t offset) {
  return (std::uint32_t{b[offset]} << 24) | (std::uint32_t{b[offset + 1]} << 16) |
         (std::uint32_t{b[offset + 2]} << 8) | std::uint32_t{b[offset + 3]};
}

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
           (v >> 24);
  }
}

std::vector<double> decode_float32(const std::vector<unsigned char>& bytes) {
  std::vector<double> values(bytes.size() / 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t raw;
    std::memcpy(&raw, bytes.data() + 4 * i, 4);
    values[i] = static_cast<double>(std::bit_cast<float>(to_little(raw)));
  }
  return values;
}

}  // namespace

void write_float32_file(const fs::path& path, std::span<const double> values) {
  std::vector<char> buffer(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t raw =
        to_little(std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
    std::memcpy(buffer.data() + 4 * i, &raw, 4);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

std::vector<double> read_float32_file(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() % 4 != 0) {
    throw FormatError("'" + path.string() + "' is not a float32 file (" +
                      std::to_string(bytes.size()) + " bytes)");
  }
  return decode_float32(bytes);
}

// ---------------------------------------------------------------------------
// Models

fs::path save_model(const Network& net, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) {
    throw IoError("cannot create model directory '" + directory.string() +
                  "': " + (ec ? ec.message() : "not a directory"));
  }

  json manifest;
  manifest["format_version"] = kModelFormatVersion;
  manifest["input_shape"] = net.input_shape();
  json layers = json::array();
  for (std::size_t l = 0; l < net.size(); ++l) {
    const Layer& layer = net.layer(l);
    json entry;
    entry["kind"] = to_string(layer.kind());
    entry["in"] = layer.in_size();
    entry["out"] = layer.out_size();
    entry["activation"] = to_string(layer.activation());
    if (layer.has_parameters()) {
      const std::string stem = "layer" + std::to_string(l);
      entry["weight_file"] = stem + "_weight.bin";
      entry["bias_file"] = stem + "_bias.bin";
      write_float32_file(directory / (stem + "_weight.bin"), layer.weights());
      write_float32_file(directory / (stem + "_bias.bin"), layer.bias());
    }
    if (layer.kind() == LayerKind::conv2d) {
      entry["kernel"] = layer.kernel();
      entry["in_ch"] = layer.in_channels();
      entry["out_ch"] = layer.out_channels();
    }
    layers.push_back(std::move(entry));
  }
  manifest["layers"] = std::move(layers);

  const fs::path path = directory / kManifestName;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failure on '" + path.string() + "'");
  return path;
}

namespace {

std::vector<double> load_tensor(const fs::path& dir, const json& entry,
                                const char* field, std::size_t layer_index,
                                std::size_t expected_count) {
  if (!entry.contains(field) || !entry[field].is_string()) {
    throw FormatError("layer " + std::to_string(layer_index) + " lacks '" + field + "'");
  }
  const fs::path path = dir / entry[field].get<std::string>();
  const std::string tensor = "layer " + std::to_string(layer_index) + " " + field +
                             " '" + path.string() + "'";
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) throw CorruptModelError(tensor + " is missing: " + ec.message());
  if (size != 4 * expected_count) {
    throw CorruptModelError(tensor + " has " + std::to_string(size) +
                            " bytes, expected " + std::to_string(4 * expected_count) +
                            " (" + std::to_string(expected_count) + " float32)");
  }
  return decode_float32(read_bytes(path));
}

std::size_t get_size(const json& entry, const char* field, std::size_t layer_index) {
  if (!entry.contains(field) || !entry[field].is_number_unsigned()) {
    throw FormatError("layer " + std::to_string(layer_index) +
                      " has missing or invalid '" + field + "'");
  }
  return entry[field].get<std::size_t>();
}

}  // namespace

Network load_model(const fs::path& manifest_path) {
  const fs::path path = fs::is_directory(manifest_path)
                            ? manifest_path / kManifestName
                            : manifest_path;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model manifest '" + path.string() + "'");
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw FormatError("manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }

  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw UnsupportedVersionError("manifest '" + path.string() +
                                    "' has unsupported format_version " +
                                    std::to_string(version));
    }
    const Shape input_shape = manifest.at("input_shape").get<Shape>();
    const fs::path dir = path.parent_path();

    std::vector<Layer> layers;
    Shape shape = input_shape;
    const auto& entries = manifest.at("layers");
    if (!entries.is_array()) throw FormatError("'layers' must be an array");
    for (std::size_t l = 0; l < entries.size(); ++l) {
      const json& e = entries[l];
      const LayerKind kind = parse_layer_kind(e.at("kind").get<std::string>());
      const Activation act =
          parse_activation(e.value("activation", std::string("none")));
      const std::size_t in_count = get_size(e, "in", l);
      if (in_count != element_count(shape)) {
        throw FormatError("layer " + std::to_string(l) + " declares in=" +
                          std::to_string(in_count) + " but receives " +
                          std::to_string(element_count(shape)) + " values");
      }
      switch (kind) {
        case LayerKind::dense: {
          const std::size_t out = get_size(e, "out", l);
          if (shape.size() != 1) {
            throw FormatError("dense layer " + std::to_string(l) +
                              " receives non-flat input " + to_string(shape));
          }
          layers.push_back(Layer::dense(in_count, out, act,
                                        load_tensor(dir, e, "weight_file", l, in_count * out),
                                        load_tensor(dir, e, "bias_file", l, out)));
          break;
        }
        case LayerKind::conv2d: {
          const std::size_t k = get_size(e, "kernel", l);
          const std::size_t in_ch = get_size(e, "in_ch", l);
          const std::size_t out_ch = get_size(e, "out_ch", l);
          if (shape.size() != 3 || shape[0] != in_ch) {
            throw FormatError("conv2d layer " + std::to_string(l) + " declares in_ch=" +
                              std::to_string(in_ch) + " but receives " + to_string(shape));
          }
          layers.push_back(Layer::conv2d(
              shape, out_ch, k, act,
              load_tensor(dir, e, "weight_file", l, out_ch * in_ch * k * k),
              load_tensor(dir, e, "bias_file", l, out_ch)));
          break;
        }
        case LayerKind::maxpool:
          layers.push_back(Layer::maxpool(shape));
          break;
        case LayerKind::flatten:
          layers.push_back(Layer::flatten(shape));
          break;
      }
      if (e.contains("out") && get_size(e, "out", l) != layers.back().out_size()) {
        throw FormatError("layer " + std::to_string(l) + " declares out=" +
                          std::to_string(get_size(e, "out", l)) + " but produces " +
                          std::to_string(layers.back().out_size()));
      }
      shape = layers.back().output_shape();
    }
    return Network(input_shape, std::move(layers));
  } catch (const json::exception& e) {
    throw FormatError("manifest '" + path.string() + "': " + e.what());
  } catch (const DimensionError& e) {
    throw FormatError("manifest '" + path.string() + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Datasets

Dataset load_mnist(const fs::path& images, const fs::path& labels,
                   const std::string& name) {
  const auto img = read_bytes(images);
  const auto lab = read_bytes(labels);
  if (img.size() < 16 || read_be32(img, 0) != 2051) {
    throw FormatError("'" + images.string() + "' is not an IDX image file (magic 2051)");
  }
  if (lab.size() < 8 || read_be32(lab, 0) != 2049) {
    throw FormatError("'" + labels.string() + "' is not an IDX label file (magic 2049)");
  }
  const std::size_t n_img = read_be32(img, 4);
  const std::size_t rows = read_be32(img, 8);
  const std::size_t cols = read_be32(img, 12);
  const std::size_t n_lab = read_be32(lab, 4);
  if (n_img != n_lab) {
    throw DataError("'" + images.string() + "' holds " + std::to_string(n_img) +
                    " images but '" + labels.string() + "' holds " +
                    std::to_string(n_lab) + " labels");
  }
  const std::size_t pixels = rows * cols;
  if (img.size() != 16 + n_img * pixels) {
    throw FormatError("'" + images.string() + "' has " + std::to_string(img.size()) +
                      " bytes, header implies " + std::to_string(16 + n_img * pixels));
  }
  if (lab.size() != 8 + n_lab) {
    throw FormatError("'" + labels.string() + "' has " + std::to_string(lab.size()) +
                      " bytes, header implies " + std::to_string(8 + n_lab));
  }

  Dataset data(name, {pixels});
  data.reserve(n_img);
  std::vector<double> sample(pixels);
  for (std::size_t i = 0; i < n_img; ++i) {
    const unsigned char* p = img.data() + 16 + i * pixels;
    for (std::size_t j = 0; j < pixels; ++j) sample[j] = p[j] / 255.0;
    const std::size_t label = lab[8 + i];
    if (label > 9) {
      throw DataError("'" + labels.string() + "' label " + std::to_string(i) +
                      " is " + std::to_string(label) + ", expected 0-9");
    }
    data.add(sample, label);
  }
  return data;
}

Dataset load_cifar10(std::span<const fs::path> batches, const std::string& name) {
  constexpr std::size_t kPixels = 3 * 32 * 32;
  constexpr std::size_t kRecord = 1 + kPixels;
  Dataset data(name, {3, 32, 32});
  std::vector<double> sample(kPixels);
  for (const auto& path : batches) {
    const auto bytes = read_bytes(path);
    if (bytes.empty() || bytes.size() % kRecord != 0) {
      throw FormatError("'" + path.string() + "' has " + std::to_string(bytes.size()) +
                        " bytes, not a multiple of the " + std::to_string(kRecord) +
                        "-byte CIFAR-10 record");
    }
    const std::size_t n = bytes.size() / kRecord;
    data.reserve(data.size() + n);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char* rec = bytes.data() + i * kRecord;
      if (rec[0] > 9) {
        throw DataError("'" + path.string() + "' record " + std::to_string(i) +
                        " has label " + std::to_string(rec[0]));
      }
      for (std::size_t j = 0; j < kPixels; ++j) sample[j] = rec[1 + j] / 255.0;
      data.add(sample, rec[0]);
    }
  }
  return data;
}

}  // namespace neuropath
