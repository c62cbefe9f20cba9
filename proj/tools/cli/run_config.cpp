#include "run_config.hpp"

#include <cmath>

#include "neuropath/errors.hpp"

namespace neuropath::cli {

using nlohmann::json;

SynthesisParams RunConfig::synthesis(SynthesisMethod method) const {
  SynthesisParams p;
  p.method = method;
  p.step = step;
  p.d_max = d_max;
  p.bound = bound;
  p.iterations = iterations;
  p.beta = beta;
  p.mga_anchor = mga_anchor;
  return p;
}

void RunConfig::validate() const {
  if (dataset != "mnist" && dataset != "cifar10") {
    throw UsageError("--dataset must be mnist or cifar10, got '" + dataset + "'");
  }
  analysis().validate();
  if (!std::isfinite(beta)) throw UsageError("--beta must be finite");
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw UsageError("--step must be positive, got " + std::to_string(step));
  }
  synthesis(SynthesisMethod::ga).validate();
  coverage_options().validate();
  if (measures.empty()) throw UsageError("--measure needs at least one value");
  if (ks.empty()) throw UsageError("--k needs at least one value");
  for (auto k : ks) {
    if (k == 0) throw UsageError("--k values must be positive");
  }
  if (synth.empty()) throw UsageError("--synth needs at least one value");
  for (auto s : synth) {
    if (s == SynthesisMethod::mga && mode == SelectionMode::neuron) {
      throw UsageError("--synth mga needs --mode pathway");
    }
  }
  if (epochs == 0) throw UsageError("--epochs must be positive");
  if (batch_size == 0) throw UsageError("--batch-size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("--lr must be positive");
  }
  if (jobs == 0) throw UsageError("--jobs must be positive");
}

json to_json(const RunConfig& c) {
  json measures = json::array();
  for (auto m : c.measures) measures.push_back(to_string(m));
  json synth = json::array();
  for (auto s : c.synth) synth.push_back(to_string(s));
  return json{
      {"dataset", c.dataset},
      {"data_dir", c.data_dir.string()},
      {"train_limit", c.train_limit},
      {"test_limit", c.test_limit},
      {"model", c.model.string()},
      {"arch", c.arch},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"lr", c.learning_rate},
      {"alpha", c.alpha},
      {"beta", c.beta},
      {"per_class", c.per_class},
      {"measure", measures},
      {"k", c.ks},
      {"mode", to_string(c.mode)},
      {"synth", synth},
      {"step", c.step},
      {"dmax", c.d_max},
      {"bound", to_string(c.bound)},
      {"iterations", c.iterations},
      {"mga_anchor", c.mga_anchor},
      {"coverage", to_string(c.coverage)},
      {"coverage_fraction", c.coverage_fraction},
      {"seed", c.seed},
  };
}

namespace {

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig from_json(const json& j) {
  RunConfig c;
  c.dataset = get<std::string>(j, "dataset");
  c.data_dir = get<std::string>(j, "data_dir");
  c.train_limit = get<std::size_t>(j, "train_limit");
  c.test_limit = get<std::size_t>(j, "test_limit");
  c.model = get<std::string>(j, "model");
  c.arch = get<std::string>(j, "arch");
  c.epochs = get<std::size_t>(j, "epochs");
  c.batch_size = get<std::size_t>(j, "batch_size");
  c.learning_rate = get<double>(j, "lr");
  c.alpha = get<double>(j, "alpha");
  c.beta = get<double>(j, "beta");
  c.per_class = get<bool>(j, "per_class");
  c.measures.clear();
  for (const auto& m : get<std::vector<std::string>>(j, "measure")) {
    c.measures.push_back(parse_measure(m));
  }
  c.ks = get<std::vector<std::size_t>>(j, "k");
  c.mode = parse_selection_mode(get<std::string>(j, "mode"));
  c.synth.clear();
  for (const auto& s : get<std::vector<std::string>>(j, "synth")) {
    c.synth.push_back(parse_synthesis_method(s));
  }
  c.step = get<double>(j, "step");
  c.d_max = get<double>(j, "dmax");
  c.bound = parse_distance_bound(get<std::string>(j, "bound"));
  c.iterations = get<std::size_t>(j, "iterations");
  c.mga_anchor = get<bool>(j, "mga_anchor");
  c.coverage = parse_coverage_rule(get<std::string>(j, "coverage"));
  c.coverage_fraction = get<double>(j, "coverage_fraction");
  c.seed = get<std::uint64_t>(j, "seed");
  return c;
}

void merge_json(json& base, const json& overrides, const std::string& origin) {
  if (!overrides.is_object()) throw UsageError(origin + ": expected a JSON object");
  for (const auto& [key, value] : overrides.items()) {
    if (!base.contains(key)) throw UsageError(origin + ": unknown key '" + key + "'");
    base[key] = value;
  }
}

}  // namespace neuropath::cli
