#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "neuropath/localization.hpp"
#include "neuropath/network.hpp"
#include "neuropath/statistics.hpp"
#include "neuropath/synthesis.hpp"

namespace neuropath {

// When a synthesized input counts as covering the suspicious set.
//   pathway : every layer holding targets has at least one active target
//   all     : every target is active
//   fraction: at least `fraction` of the targets are active
enum class CoverageRule { pathway, all, fraction };

std::string to_string(CoverageRule rule);
CoverageRule parse_coverage_rule(const std::string& text);

struct CoverageOptions {
  CoverageRule rule = CoverageRule::pathway;
  double fraction = 1.0;
  double beta = 0.0;

  void validate() const;
};

bool covers(std::span<const TargetStatus> status, const CoverageOptions& options);

// C: percent of synthesized samples that cover the suspicious set.
// F: percent of misclassified synthesized samples that cover it.
struct CoverageReport {
  double c = 0.0;
  double f = 0.0;
  std::size_t n_synth = 0;
  std::size_t n_failed = 0;
  std::size_t n_activating = 0;
  std::size_t n_failed_activating = 0;

  // Adds the counts of `other` and recomputes both percentages.
  void merge(const CoverageReport& other);
};

// Activity is recomputed on each synthesized input (post-activation > beta).
// F is 0 when no sample failed.
CoverageReport coverage_and_failures(const Network& net,
                                     std::span<const SynthesisResult> results,
                                     const SuspiciousSet& targets,
                                     const CoverageOptions& options = {});

struct SynthesizedMetrics {
  double accuracy = 0.0;  // percent still classified as the original label
  double loss = 0.0;      // mean cross-entropy against the original label
  Distances mean_distance;
  std::size_t count = 0;
};

SynthesizedMetrics synthesized_metrics(const Network& net,
                                       std::span<const std::vector<double>> originals,
                                       std::span<const std::size_t> labels,
                                       std::span<const std::vector<double>> synthesized);

// One (C, F) point per analyzed instance, for external scatter plots.
struct PlotPoint {
  std::string instance;
  double c = 0.0;
  double f = 0.0;
};

void write_plot_csv(const std::filesystem::path& path, std::span<const PlotPoint> points);

}  // namespace neuropath
