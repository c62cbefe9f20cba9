#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "neuropath/dataset.hpp"
#include "neuropath/network.hpp"
#include "neuropath/pathways.hpp"
#include "neuropath/relevance.hpp"

namespace neuropath {

// Hit-spectrum counters of one neuron. Only inputs for which the neuron was
// critical are counted, so the four counters sum to that number.
struct NeuronCounts {
  std::uint64_t a_cp = 0;  // active, passed
  std::uint64_t a_np = 0;  // inactive, passed
  std::uint64_t a_cf = 0;  // active, failed
  std::uint64_t a_nf = 0;  // inactive, failed

  std::uint64_t total() const { return a_cp + a_np + a_cf + a_nf; }
  NeuronCounts& operator+=(const NeuronCounts& o);
  friend bool operator==(const NeuronCounts&, const NeuronCounts&) = default;
};

class HitSpectrum {
 public:
  HitSpectrum() = default;
  // One counter row per hidden layer of `net`.
  explicit HitSpectrum(const Network& net);
  HitSpectrum(std::vector<std::size_t> layers, const std::vector<std::size_t>& widths);

  const std::vector<std::size_t>& layers() const { return layers_; }
  std::size_t width(std::size_t ordinal) const { return counts_[ordinal].size(); }
  std::vector<std::size_t> widths() const;
  const NeuronCounts& at(std::size_t ordinal, std::size_t neuron) const {
    return counts_.at(ordinal).at(neuron);
  }
  NeuronCounts& at(std::size_t ordinal, std::size_t neuron) {
    return counts_.at(ordinal).at(neuron);
  }

  // Counter-wise addition; shapes must agree.
  void merge(const HitSpectrum& other);

  // Applies one analyzed input: every critical neuron gets exactly one of
  // its four counters incremented according to (post-activation > beta,
  // passed). Non-critical neurons are untouched.
  void record(const ActivationTrace& trace, const CriticalPath& path, bool passed,
              double beta);

  friend bool operator==(const HitSpectrum&, const HitSpectrum&) = default;

 private:
  std::vector<std::size_t> layers_;
  std::vector<std::vector<NeuronCounts>> counts_;
};

struct AccumulateOptions {
  std::optional<std::size_t> class_filter;  // analyze only inputs of this label
  std::size_t jobs = 1;
  RelevanceOptions relevance;
};

struct SpectrumResult {
  HitSpectrum spectrum;
  std::size_t analyzed = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t skipped_degenerate = 0;  // inputs with non-positive relevance total
};

// Runs predict -> relevance -> critical path -> record over the dataset.
// The result does not depend on options.jobs.
SpectrumResult accumulate_spectrum(const Network& net, const Dataset& data,
                                   const AnalysisConfig& cfg,
                                   const AccumulateOptions& options = {});

enum class Measure { tarantula, ochiai, barinel };

std::string to_string(Measure m);
Measure parse_measure(const std::string& text);

// Scores in [0,1]. Zero denominators: a neuron never critical in a failing
// run scores 0; Tarantula treats an empty passed ratio as 0.
double suspiciousness(const NeuronCounts& c, Measure m);

struct LayerScores {
  std::vector<std::size_t> layers;
  std::vector<std::vector<double>> per_layer;
};

LayerScores suspiciousness(const HitSpectrum& spectrum, Measure m);

enum class SelectionMode { pathway, neuron };

std::string to_string(SelectionMode mode);
SelectionMode parse_selection_mode(const std::string& text);

struct SuspiciousNeuron {
  std::size_t layer = 0;   // network layer index
  std::size_t neuron = 0;
  double score = 0.0;
  friend bool operator==(const SuspiciousNeuron&, const SuspiciousNeuron&) = default;
};

struct SuspiciousSet {
  SelectionMode mode = SelectionMode::pathway;
  std::size_t k = 0;
  std::vector<std::size_t> layers;  // hidden layers of the analyzed network
  std::vector<std::size_t> widths;
  // Pathway mode: layer by layer, each block in descending score order.
  // Neuron mode: one network-wide descending list.
  std::vector<SuspiciousNeuron> ranked;
  bool truncated = false;  // k exceeded some layer width (pathway mode)

  // Selected neurons of every hidden layer, ascending.
  std::vector<std::vector<std::size_t>> neurons_by_layer() const;
  bool empty() const { return ranked.empty(); }
};

// Pathway mode: top-k per hidden layer. Neuron mode: top-k over all hidden
// neurons. Ties go to the lower layer, then the lower index.
SuspiciousSet rank_top_k(const LayerScores& scores, std::size_t k, SelectionMode mode);

// Per-layer Jaccard ratio |A and B| / |A or B| (1 when both are empty).
// Throws UsageError if the sets come from different architectures.
std::vector<double> overlap_ratio(const SuspiciousSet& a, const SuspiciousSet& b);

// CSV with columns layer,neuron,a_cp,a_np,a_cf,a_nf,tarantula,ochiai,barinel,rank
// where rank is the 1-based position under `rank_by` (within the layer for
// pathway mode, network-wide for neuron mode).
void write_spectrum_csv(const std::filesystem::path& path, const HitSpectrum& spectrum,
                        Measure rank_by, SelectionMode mode);
HitSpectrum read_spectrum_csv(const std::filesystem::path& path);

}  // namespace neuropath
