#include "neuropath/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <fstream>

#include "neuropath/errors.hpp"
#include "neuropath/trainer.hpp"

namespace neuropath {

std::string to_string(CoverageRule rule) {
  switch (rule) {
    case CoverageRule::pathway: return "pathway";
    case CoverageRule::all: return "all";
    case CoverageRule::fraction: return "fraction";
  }
  return "?";
}

CoverageRule parse_coverage_rule(const std::string& text) {
  if (text == "pathway") return CoverageRule::pathway;
  if (text == "all") return CoverageRule::all;
  if (text == "fraction") return CoverageRule::fraction;
  throw UsageError("unknown coverage rule '" + text + "' (expected pathway, all or fraction)");
}

void CoverageOptions::validate() const {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw UsageError("--coverage-fraction must lie in (0,1], got " + std::to_string(fraction));
  }
}

bool covers(std::span<const TargetStatus> status, const CoverageOptions& options) {
  if (status.empty()) return false;
  switch (options.rule) {
    case CoverageRule::all:
      return std::all_of(status.begin(), status.end(), [](const auto& t) { return t.active; });
    case CoverageRule::fraction: {
      const auto active = std::count_if(status.begin(), status.end(),
                                        [](const auto& t) { return t.active; });
      return static_cast<double>(active) >=
             options.fraction * static_cast<double>(status.size()) - 1e-12;
    }
    case CoverageRule::pathway: {
      std::map<std::size_t, bool> layer_hit;
      for (const auto& t : status) layer_hit[t.layer] = layer_hit[t.layer] || t.active;
      return std::all_of(layer_hit.begin(), layer_hit.end(),
                         [](const auto& kv) { return kv.second; });
    }
  }
  return false;
}

void CoverageReport::merge(const CoverageReport& other) {
  n_synth += other.n_synth;
  n_failed += other.n_failed;
  n_activating += other.n_activating;
  n_failed_activating += other.n_failed_activating;
  c = n_synth == 0 ? 0.0
                   : 100.0 * static_cast<double>(n_activating) / static_cast<double>(n_synth);
  f = n_failed == 0 ? 0.0
                    : 100.0 * static_cast<double>(n_failed_activating) /
                          static_cast<double>(n_failed);
}

CoverageReport coverage_and_failures(const Network& net,
                                     std::span<const SynthesisResult> results,
                                     const SuspiciousSet& targets,
                                     const CoverageOptions& options) {
  options.validate();
  if (results.empty()) throw UsageError("coverage needs at least one synthesized sample");
  if (targets.empty()) throw UsageError("coverage needs a nonempty suspicious set");
  CoverageReport report;
  for (const auto& r : results) {
    const ActivationTrace trace = forward(net, r.synthesized);
    std::vector<TargetStatus> status;
    status.reserve(targets.ranked.size());
    for (const auto& t : targets.ranked) {
      status.push_back({t.layer, t.neuron, trace.post_activations.at(t.layer).at(t.neuron) > options.beta});
    }
    const bool activates = covers(status, options);
    const bool failed = trace.predicted_class != r.label;
    ++report.n_synth;
    if (activates) ++report.n_activating;
    if (failed) {
      ++report.n_failed;
      if (activates) ++report.n_failed_activating;
    }
  }
  report.merge({});
  return report;
}

SynthesizedMetrics synthesized_metrics(const Network& net,
                                       std::span<const std::vector<double>> originals,
                                       std::span<const std::size_t> labels,
                                       std::span<const std::vector<double>> synthesized) {
  if (originals.size() != synthesized.size() || originals.size() != labels.size()) {
    throw UsageError("synthesized_metrics: " + std::to_string(originals.size()) +
                     " originals, " + std::to_string(labels.size()) + " labels, " +
                     std::to_string(synthesized.size()) + " synthesized inputs");
  }
  SynthesizedMetrics m;
  m.count = originals.size();
  if (m.count == 0) return m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < m.count; ++i) {
    const Prediction p = predict(net, synthesized[i]);
    if (p.predicted_class == labels[i]) ++correct;
    m.loss += cross_entropy(p.logits, labels[i]);
    const Distances d = distances(originals[i], synthesized[i]);
    m.mean_distance.l1 += d.l1;
    m.mean_distance.l2 += d.l2;
    m.mean_distance.linf += d.linf;
  }
  const double n = static_cast<double>(m.count);
  m.accuracy = 100.0 * static_cast<double>(correct) / n;
  m.loss /= n;
  m.mean_distance.l1 /= n;
  m.mean_distance.l2 /= n;
  m.mean_distance.linf /= n;
  return m;
}

void write_plot_csv(const std::filesystem::path& path, std::span<const PlotPoint> points) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "instance,c,f\n";
  out.precision(17);
  for (const auto& p : points) out << p.instance << ',' << p.c << ',' << p.f << '\n';
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

}  // namespace neuropath
