#include "neuropath/localization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "neuropath/errors.hpp"
#include "neuropath/parallel.hpp"

namespace neuropath {

NeuronCounts& NeuronCounts::operator+=(const NeuronCounts& o) {
  a_cp += o.a_cp;
  a_np += o.a_np;
  a_cf += o.a_cf;
  a_nf += o.a_nf;
  return *this;
}

HitSpectrum::HitSpectrum(const Network& net) : layers_(net.hidden_layers()) {
  for (std::size_t l : layers_) counts_.emplace_back(net.layer(l).out_size());
}

HitSpectrum::HitSpectrum(std::vector<std::size_t> layers,
                         const std::vector<std::size_t>& widths)
    : layers_(std::move(layers)) {
  if (layers_.size() != widths.size()) {
    throw UsageError("spectrum layer list and width list differ in length");
  }
  for (std::size_t w : widths) counts_.emplace_back(w);
}

std::vector<std::size_t> HitSpectrum::widths() const {
  std::vector<std::size_t> w;
  for (const auto& c : counts_) w.push_back(c.size());
  return w;
}

void HitSpectrum::merge(const HitSpectrum& other) {
  if (layers_ != other.layers_ || widths() != other.widths()) {
    throw UsageError("cannot merge spectra of different architectures");
  }
  for (std::size_t l = 0; l < counts_.size(); ++l)
    for (std::size_t n = 0; n < counts_[l].size(); ++n) counts_[l][n] += other.counts_[l][n];
}

void HitSpectrum::record(const ActivationTrace& trace, const CriticalPath& path,
                         bool passed, double beta) {
  if (path.layers != layers_) {
    throw UsageError("critical path layers do not match the spectrum");
  }
  for (std::size_t o = 0; o < layers_.size(); ++o) {
    const auto& post = trace.post_activations.at(layers_[o]);
    for (std::size_t n : path.per_layer[o]) {
      NeuronCounts& c = counts_[o].at(n);
      const bool active = post[n] > beta;
      if (passed) {
        ++(active ? c.a_cp : c.a_np);
      } else {
        ++(active ? c.a_cf : c.a_nf);
      }
    }
  }
}

SpectrumResult accumulate_spectrum(const Network& net, const Dataset& data,
                                   const AnalysisConfig& cfg,
                                   const AccumulateOptions& options) {
  cfg.validate();
  if (data.empty()) {
    throw UsageError("cannot localize faults on an empty dataset '" + data.name() + "'");
  }
  if (data.input_size() != net.input_size()) {
    throw DimensionError("dataset inputs have " + std::to_string(data.input_size()) +
                         " values, network expects " + std::to_string(net.input_size()));
  }

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  std::vector<SpectrumResult> partial(std::min(jobs, data.size()));
  for (auto& p : partial) p.spectrum = HitSpectrum(net);

  parallel_chunks(data.size(), jobs, [&](std::size_t w, std::size_t begin, std::size_t end) {
    SpectrumResult& out = partial[w];
    for (std::size_t i = begin; i < end; ++i) {
      if (options.class_filter && data.label(i) != *options.class_filter) continue;
      const ActivationTrace trace = forward(net, data.input(i));
      const RelevanceMap rmap =
          propagate_relevance(net, trace, trace.predicted_class, options.relevance);
      const auto path = extract_cdp(net, rmap, cfg.alpha);
      if (!path) {
        ++out.skipped_degenerate;
        continue;
      }
      const bool passed = trace.predicted_class == data.label(i);
      out.spectrum.record(trace, *path, passed, cfg.beta);
      ++out.analyzed;
      ++(passed ? out.passed : out.failed);
    }
  });

  SpectrumResult total = std::move(partial.front());
  for (std::size_t w = 1; w < partial.size(); ++w) {
    total.spectrum.merge(partial[w].spectrum);
    total.analyzed += partial[w].analyzed;
    total.passed += partial[w].passed;
    total.failed += partial[w].failed;
    total.skipped_degenerate += partial[w].skipped_degenerate;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Measures

std::string to_string(Measure m) {
  switch (m) {
    case Measure::tarantula: return "tarantula";
    case Measure::ochiai: return "ochiai";
    case Measure::barinel: return "barinel";
  }
  return "unknown";
}

Measure parse_measure(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "tarantula") return Measure::tarantula;
  if (t == "ochiai") return Measure::ochiai;
  if (t == "barinel") return Measure::barinel;
  throw UsageError("unknown suspiciousness measure '" + text +
                   "' (expected tarantula, ochiai or barinel)");
}

double suspiciousness(const NeuronCounts& c, Measure m) {
  if (c.a_cf == 0) return 0.0;
  const double cf = static_cast<double>(c.a_cf);
  const double nf = static_cast<double>(c.a_nf);
  const double cp = static_cast<double>(c.a_cp);
  const double np = static_cast<double>(c.a_np);
  switch (m) {
    case Measure::tarantula: {
      const double failed_ratio = cf / (cf + nf);
      const double passed_ratio = (c.a_cp + c.a_np) == 0 ? 0.0 : cp / (cp + np);
      return failed_ratio / (failed_ratio + passed_ratio);
    }
    case Measure::ochiai:
      return cf / std::sqrt((cf + nf) * (cf + cp));
    case Measure::barinel:
      return 1.0 - cp / (cf + cp);
  }
  return 0.0;
}

LayerScores suspiciousness(const HitSpectrum& spectrum, Measure m) {
  LayerScores scores;
  scores.layers = spectrum.layers();
  for (std::size_t o = 0; o < spectrum.layers().size(); ++o) {
    std::vector<double> layer(spectrum.width(o));
    for (std::size_t n = 0; n < layer.size(); ++n) layer[n] = suspiciousness(spectrum.at(o, n), m);
    scores.per_layer.push_back(std::move(layer));
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Ranking

std::string to_string(SelectionMode mode) {
  return mode == SelectionMode::pathway ? "pathway" : "neuron";
}

SelectionMode parse_selection_mode(const std::string& text) {
  if (text == "pathway") return SelectionMode::pathway;
  if (text == "neuron") return SelectionMode::neuron;
  throw UsageError("unknown selection mode '" + text + "' (expected pathway or neuron)");
}

std::vector<std::vector<std::size_t>> SuspiciousSet::neurons_by_layer() const {
  std::vector<std::vector<std::size_t>> out(layers.size());
  for (const auto& s : ranked) {
    const auto it = std::find(layers.begin(), layers.end(), s.layer);
    out[static_cast<std::size_t>(it - layers.begin())].push_back(s.neuron);
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

namespace {

// Descending score; ties by (ordinal, neuron) ascending. Input already in
// (ordinal, neuron) order, so a stable sort by score is enough.
void sort_by_score(std::vector<SuspiciousNeuron>& v) {
  std::stable_sort(v.begin(), v.end(), [](const SuspiciousNeuron& a, const SuspiciousNeuron& b) {
    return a.score > b.score;
  });
}

}  // namespace

SuspiciousSet rank_top_k(const LayerScores& scores, std::size_t k, SelectionMode mode) {
  if (k == 0) throw UsageError("--k must be at least 1");
  SuspiciousSet set;
  set.mode = mode;
  set.k = k;
  set.layers = scores.layers;
  for (const auto& l : scores.per_layer) set.widths.push_back(l.size());

  if (mode == SelectionMode::pathway) {
    for (std::size_t o = 0; o < scores.layers.size(); ++o) {
      std::vector<SuspiciousNeuron> layer;
      for (std::size_t n = 0; n < scores.per_layer[o].size(); ++n) {
        layer.push_back({scores.layers[o], n, scores.per_layer[o][n]});
      }
      sort_by_score(layer);
      if (k > layer.size()) set.truncated = true;
      layer.resize(std::min(k, layer.size()));
      set.ranked.insert(set.ranked.end(), layer.begin(), layer.end());
    }
  } else {
    std::vector<SuspiciousNeuron> all;
    for (std::size_t o = 0; o < scores.layers.size(); ++o)
      for (std::size_t n = 0; n < scores.per_layer[o].size(); ++n)
        all.push_back({scores.layers[o], n, scores.per_layer[o][n]});
    sort_by_score(all);
    if (k > all.size()) set.truncated = true;
    all.resize(std::min(k, all.size()));
    set.ranked = std::move(all);
  }
  return set;
}

std::vector<double> overlap_ratio(const SuspiciousSet& a, const SuspiciousSet& b) {
  if (a.layers != b.layers || a.widths != b.widths) {
    throw UsageError("overlap_ratio: suspicious sets come from different architectures");
  }
  const auto la = a.neurons_by_layer();
  const auto lb = b.neurons_by_layer();
  std::vector<double> ratios;
  for (std::size_t o = 0; o < la.size(); ++o) {
    std::vector<std::size_t> inter;
    std::vector<std::size_t> uni;
    std::set_intersection(la[o].begin(), la[o].end(), lb[o].begin(), lb[o].end(),
                          std::back_inserter(inter));
    std::set_union(la[o].begin(), la[o].end(), lb[o].begin(), lb[o].end(),
                   std::back_inserter(uni));
    ratios.push_back(uni.empty() ? 1.0
                                 : static_cast<double>(inter.size()) /
                                       static_cast<double>(uni.size()));
  }
  return ratios;
}

// ---------------------------------------------------------------------------
// CSV

void write_spectrum_csv(const std::filesystem::path& path, const HitSpectrum& spectrum,
                        Measure rank_by, SelectionMode mode) {
  const LayerScores primary = suspiciousness(spectrum, rank_by);
  std::size_t total = 0;
  for (const auto& l : primary.per_layer) total += l.size();
  // A full ranking gives every neuron its position.
  const auto widths = spectrum.widths();
  const std::size_t widest = widths.empty() ? 1 : *std::max_element(widths.begin(), widths.end());
  const SuspiciousSet full =
      rank_top_k(primary, std::max<std::size_t>(1, mode == SelectionMode::pathway ? widest : total),
                 mode);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> rank;
  std::map<std::size_t, std::size_t> position_in_layer;
  for (std::size_t i = 0; i < full.ranked.size(); ++i) {
    const auto& s = full.ranked[i];
    rank[{s.layer, s.neuron}] =
        mode == SelectionMode::pathway ? ++position_in_layer[s.layer] : i + 1;
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "layer,neuron,a_cp,a_np,a_cf,a_nf,tarantula,ochiai,barinel,rank\n";
  out.precision(17);
  for (std::size_t o = 0; o < spectrum.layers().size(); ++o) {
    const std::size_t layer = spectrum.layers()[o];
    for (std::size_t n = 0; n < spectrum.width(o); ++n) {
      const NeuronCounts& c = spectrum.at(o, n);
      out << layer << ',' << n << ',' << c.a_cp << ',' << c.a_np << ',' << c.a_cf << ','
          << c.a_nf << ',' << suspiciousness(c, Measure::tarantula) << ','
          << suspiciousness(c, Measure::ochiai) << ',' << suspiciousness(c, Measure::barinel)
          << ',' << rank.at({layer, n}) << '\n';
    }
  }
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

HitSpectrum read_spectrum_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spectrum '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("layer,neuron,a_cp,a_np,a_cf,a_nf", 0) != 0) {
    throw FormatError("'" + path.string() + "' lacks the spectrum CSV header");
  }
  std::vector<std::size_t> layers;
  std::vector<std::vector<NeuronCounts>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() < 6) {
      throw FormatError("'" + path.string() + "' line " + std::to_string(line_no) +
                        " has " + std::to_string(cells.size()) + " fields");
    }
    try {
      const std::size_t layer = std::stoul(cells[0]);
      const std::size_t neuron = std::stoul(cells[1]);
      if (layers.empty() || layers.back() != layer) {
        layers.push_back(layer);
        rows.emplace_back();
      }
      if (neuron != rows.back().size()) {
        throw FormatError("'" + path.string() + "' line " + std::to_string(line_no) +
                          ": neurons must be listed in order");
      }
      rows.back().push_back({std::stoull(cells[2]), std::stoull(cells[3]),
                             std::stoull(cells[4]), std::stoull(cells[5])});
    } catch (const std::logic_error&) {
      throw FormatError("'" + path.string() + "' line " + std::to_string(line_no) +
                        " is not numeric");
    }
  }
  std::vector<std::size_t> widths;
  for (const auto& r : rows) widths.push_back(r.size());
  HitSpectrum spectrum(layers, widths);
  for (std::size_t o = 0; o < rows.size(); ++o)
    for (std::size_t n = 0; n < rows[o].size(); ++n) spectrum.at(o, n) = rows[o][n];
  return spectrum;
}

}  // namespace neuropath
