#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neuropath/localization.hpp"
#include "neuropath/network.hpp"

namespace neuropath {

enum class SynthesisMethod { ga, mga };

std::string to_string(SynthesisMethod m);
SynthesisMethod parse_synthesis_method(const std::string& text);

// How d_max limits the perturbation.
//   ball: |x - original| <= d_max elementwise after every step
//   step: every single step changes each element by at most d_max
enum class DistanceBound { ball, step };

std::string to_string(DistanceBound b);
DistanceBound parse_distance_bound(const std::string& text);

struct SynthesisParams {
  SynthesisMethod method = SynthesisMethod::mga;
  double step = 5.0;          // learning rate of the ascent
  double d_max = 0.006;
  DistanceBound bound = DistanceBound::step;
  std::size_t iterations = 10;
  double beta = 0.0;          // activity threshold on post-activations
  // Adds |a - a_prev| for earlier-stage targets, a_prev being the value at
  // the previous stage's evaluation point. Off by default.
  bool mga_anchor = false;

  // step >= 0 (0 is a valid null step), d_max > 0, iterations >= 1.
  void validate() const;
};

struct Distances {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

Distances distances(std::span<const double> a, std::span<const double> b);

struct TargetStatus {
  std::size_t layer = 0;
  std::size_t neuron = 0;
  bool active = false;
};

struct SynthesisResult {
  std::size_t label = 0;
  std::vector<double> original;
  std::vector<double> synthesized;
  // GA: one loss per iteration. MGA: one per (iteration, stage), where the
  // stage-L loss is minus the summed target pre-activations of layers <= L.
  std::vector<double> stage_losses;
  std::size_t iterations_run = 0;
  std::size_t final_class = 0;
  bool misclassified = false;
  std::vector<TargetStatus> activated_targets;  // in SuspiciousSet::ranked order
  Distances distances;

  bool all_targets_active() const;
};

// Clamp to [0,1], then to [original - d_max, original + d_max].
std::vector<double> apply_domain_constraints(std::span<const double> x,
                                             std::span<const double> original,
                                             double d_max);

// Gradient ascent on the target neurons' pre-activations. Every step is
//   x <- constrain(x - step * d(loss)/dx)
// where constrain clips the change to d_max per element (DistanceBound::step)
// or projects into the d_max ball around the original (DistanceBound::ball),
// and always keeps values in [0,1]. The loop stops at the start of the first
// iteration in which the input is no longer classified as `label`.
//
// GA minimizes one joint loss over all targets per iteration. MGA visits the
// target layers in network order; the stage for layer L takes one step on
// the loss covering the targets of every layer up to L.
//
// Returns nullopt if `input` is not classified as `label` to begin with.
// Throws UsageError when `targets` is empty, or when MGA is given a
// neuron-mode set.
std::optional<SynthesisResult> synthesize(const Network& net, std::span<const double> input,
                                          std::size_t label, const SuspiciousSet& targets,
                                          const SynthesisParams& params);

std::optional<SynthesisResult> synthesize_ga(const Network& net, std::span<const double> input,
                                             std::size_t label, const SuspiciousSet& targets,
                                             SynthesisParams params);
std::optional<SynthesisResult> synthesize_mga(const Network& net, std::span<const double> input,
                                              std::size_t label, const SuspiciousSet& targets,
                                              SynthesisParams params);

// Post-activation > beta check of every target on `input`.
std::vector<TargetStatus> target_activity(const Network& net, std::span<const double> input,
                                          const SuspiciousSet& targets, double beta);

}  // namespace neuropath
