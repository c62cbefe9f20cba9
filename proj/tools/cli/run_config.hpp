#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "neuropath/evaluation.hpp"
#include "neuropath/localization.hpp"
#include "neuropath/pathways.hpp"
#include "neuropath/synthesis.hpp"

namespace neuropath::cli {

struct RunConfig {
  // data
  std::string dataset = "mnist";  // mnist | cifar10
  std::filesystem::path data_dir;
  std::size_t train_limit = 0;  // 0 = every sample
  std::size_t test_limit = 0;

  // model
  std::filesystem::path model;  // empty = <out>/model
  std::string arch = "MNIST_3";
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;

  // localization
  double alpha = 0.7;
  double beta = 0.0;
  bool per_class = false;
  std::vector<Measure> measures{Measure::tarantula, Measure::ochiai, Measure::barinel};
  std::vector<std::size_t> ks{1, 5, 10};
  SelectionMode mode = SelectionMode::pathway;

  // synthesis
  std::vector<SynthesisMethod> synth{SynthesisMethod::mga};
  double step = 5.0;
  double d_max = 0.006;
  DistanceBound bound = DistanceBound::step;
  std::size_t iterations = 10;
  bool mga_anchor = false;

  // evaluation
  CoverageRule coverage = CoverageRule::pathway;
  double coverage_fraction = 1.0;

  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::filesystem::path out = "neuropath-out";

  std::filesystem::path model_dir() const { return model.empty() ? out / "model" : model; }
  AnalysisConfig analysis() const { return {alpha, beta}; }
  SynthesisParams synthesis(SynthesisMethod method) const;
  CoverageOptions coverage_options() const { return {coverage, coverage_fraction, beta}; }

  // Throws UsageError naming the offending flag.
  void validate() const;
};

// Keys match the long flag names with dashes replaced by underscores.
// `jobs` and `out` only steer execution and are left out, so reports do not
// depend on them.
nlohmann::json to_json(const RunConfig& cfg);
RunConfig from_json(const nlohmann::json& j);

// Applies the keys present in `j` on top of `base`. Unknown keys are a
// UsageError.
void merge_json(nlohmann::json& base, const nlohmann::json& overrides, const std::string& origin);

}  // namespace neuropath::cli
