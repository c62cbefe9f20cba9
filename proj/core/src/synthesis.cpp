#include "neuropath/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "neuropath/errors.hpp"

namespace neuropath {

std::string to_string(SynthesisMethod m) { return m == SynthesisMethod::ga ? "ga" : "mga"; }

SynthesisMethod parse_synthesis_method(const std::string& text) {
  if (text == "ga") return SynthesisMethod::ga;
  if (text == "mga") return SynthesisMethod::mga;
  throw UsageError("unknown synthesizer '" + text + "' (expected ga or mga)");
}

std::string to_string(DistanceBound b) { return b == DistanceBound::ball ? "ball" : "step"; }

DistanceBound parse_distance_bound(const std::string& text) {
  if (text == "ball") return DistanceBound::ball;
  if (text == "step") return DistanceBound::step;
  throw UsageError("unknown distance bound '" + text + "' (expected ball or step)");
}

void SynthesisParams::validate() const {
  if (!(step >= 0.0) || !std::isfinite(step)) {
    throw UsageError("--step must be non-negative, got " + std::to_string(step));
  }
  if (!(d_max > 0.0) || !std::isfinite(d_max)) {
    throw UsageError("--dmax must be positive, got " + std::to_string(d_max));
  }
  if (iterations == 0) throw UsageError("--iterations must be at least 1");
  if (!std::isfinite(beta)) throw UsageError("--beta must be finite");
}

Distances distances(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("distance between vectors of length " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
  }
  Distances d;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a[i] - b[i]);
    d.l1 += diff;
    sq += diff * diff;
    d.linf = std::max(d.linf, diff);
  }
  d.l2 = std::sqrt(sq);
  return d;
}

bool SynthesisResult::all_targets_active() const {
  return std::all_of(activated_targets.begin(), activated_targets.end(),
                     [](const TargetStatus& t) { return t.active; });
}

std::vector<double> apply_domain_constraints(std::span<const double> x,
                                             std::span<const double> original,
                                             double d_max) {
  if (x.size() != original.size()) {
    throw DimensionError("domain constraint on vectors of length " + std::to_string(x.size()) +
                         " and " + std::to_string(original.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = std::clamp(x[i], 0.0, 1.0);
    out[i] = std::clamp(v, original[i] - d_max, original[i] + d_max);
  }
  return out;
}

std::vector<TargetStatus> target_activity(const Network& net, std::span<const double> input,
                                          const SuspiciousSet& targets, double beta) {
  const ActivationTrace trace = forward(net, input);
  std::vector<TargetStatus> status;
  status.reserve(targets.ranked.size());
  for (const auto& t : targets.ranked) {
    status.push_back({t.layer, t.neuron, trace.post_activations.at(t.layer).at(t.neuron) > beta});
  }
  return status;
}

namespace {

void check_targets(const Network& net, const SuspiciousSet& targets) {
  if (targets.empty()) throw UsageError("synthesis needs at least one target neuron");
  for (const auto& t : targets.ranked) {
    if (t.layer >= net.size() || t.neuron >= net.layer(t.layer).out_size()) {
      throw IndexError("target neuron (" + std::to_string(t.layer) + "," +
                       std::to_string(t.neuron) + ") does not exist in the network");
    }
  }
}

// Target layers in ascending network order, with their neurons.
std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stages_of(
    const SuspiciousSet& targets) {
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stages;
  for (const auto& t : targets.ranked) {
    auto it = std::find_if(stages.begin(), stages.end(),
                           [&](const auto& s) { return s.first == t.layer; });
    if (it == stages.end()) {
      stages.push_back({t.layer, {}});
      it = stages.end() - 1;
    }
    it->second.push_back(t.neuron);
  }
  std::sort(stages.begin(), stages.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return stages;
}

void take_step(std::vector<double>& x, const std::vector<double>& grad,
               std::span<const double> original, const SynthesisParams& params) {
  if (params.bound == DistanceBound::ball) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= params.step * grad[i];
    x = apply_domain_constraints(x, original, params.d_max);
    return;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = std::clamp(-params.step * grad[i], -params.d_max, params.d_max);
    x[i] = std::clamp(x[i] + delta, 0.0, 1.0);
  }
}

SynthesisResult finish(const Network& net, std::span<const double> input, std::size_t label,
                       std::vector<double> x, std::vector<double> losses, std::size_t iterations,
                       const SuspiciousSet& targets, double beta) {
  SynthesisResult r;
  r.label = label;
  r.original.assign(input.begin(), input.end());
  r.synthesized = std::move(x);
  r.stage_losses = std::move(losses);
  r.iterations_run = iterations;
  r.final_class = forward(net, r.synthesized).predicted_class;
  r.misclassified = r.final_class != label;
  r.activated_targets = target_activity(net, r.synthesized, targets, beta);
  r.distances = distances(r.original, r.synthesized);
  return r;
}

}  // namespace

std::optional<SynthesisResult> synthesize_ga(const Network& net, std::span<const double> input,
                                             std::size_t label, const SuspiciousSet& targets,
                                             SynthesisParams params) {
  params.method = SynthesisMethod::ga;
  params.validate();
  check_targets(net, targets);
  if (forward(net, input).predicted_class != label) return std::nullopt;

  std::vector<ObjectiveTerm> terms;
  for (const auto& t : targets.ranked) terms.push_back({t.layer, t.neuron, -1.0});

  std::vector<double> x(input.begin(), input.end());
  std::vector<double> losses;
  std::size_t it = 0;
  for (; it < params.iterations; ++it) {
    const ActivationTrace trace = forward(net, x);
    if (trace.predicted_class != label) break;
    losses.push_back(evaluate_objective(trace, terms));
    take_step(x, input_gradient(net, trace, terms), input, params);
  }
  return finish(net, input, label, std::move(x), std::move(losses), it, targets, params.beta);
}

std::optional<SynthesisResult> synthesize_mga(const Network& net, std::span<const double> input,
                                              std::size_t label, const SuspiciousSet& targets,
                                              SynthesisParams params) {
  params.method = SynthesisMethod::mga;
  params.validate();
  check_targets(net, targets);
  if (targets.mode != SelectionMode::pathway) {
    throw UsageError("multi-stage synthesis needs pathway-mode targets");
  }
  if (forward(net, input).predicted_class != label) return std::nullopt;

  const auto stages = stages_of(targets);
  std::vector<double> x(input.begin(), input.end());
  std::vector<double> losses;
  // Pre-activations of every target at the previous stage's evaluation point.
  std::vector<std::vector<double>> anchor;

  std::size_t it = 0;
  for (; it < params.iterations; ++it) {
    ActivationTrace trace = forward(net, x);
    if (trace.predicted_class != label) break;
    for (std::size_t s = 0; s < stages.size(); ++s) {
      if (s > 0) trace = forward(net, x);
      std::vector<ObjectiveTerm> terms;
      double loss = 0.0;
      for (std::size_t p = 0; p <= s; ++p) {
        for (std::size_t n : stages[p].second) {
          terms.push_back({stages[p].first, n, -1.0});
          loss -= trace.pre_activations[stages[p].first][n];
        }
      }
      if (params.mga_anchor && !anchor.empty()) {
        for (std::size_t p = 0; p < s; ++p) {
          const auto& neurons = stages[p].second;
          for (std::size_t q = 0; q < neurons.size(); ++q) {
            const double diff = trace.pre_activations[stages[p].first][neurons[q]] - anchor[p][q];
            loss += std::abs(diff);
            if (diff != 0.0) terms.push_back({stages[p].first, neurons[q], diff > 0 ? 1.0 : -1.0});
          }
        }
      }
      if (params.mga_anchor) {
        anchor.assign(stages.size(), {});
        for (std::size_t p = 0; p < stages.size(); ++p)
          for (std::size_t n : stages[p].second)
            anchor[p].push_back(trace.pre_activations[stages[p].first][n]);
      }
      losses.push_back(loss);
      take_step(x, input_gradient(net, trace, terms), input, params);
    }
  }
  return finish(net, input, label, std::move(x), std::move(losses), it, targets, params.beta);
}

std::optional<SynthesisResult> synthesize(const Network& net, std::span<const double> input,
                                          std::size_t label, const SuspiciousSet& targets,
                                          const SynthesisParams& params) {
  return params.method == SynthesisMethod::ga
             ? synthesize_ga(net, input, label, targets, params)
             : synthesize_mga(net, input, label, targets, params);
}

}  // namespace neuropath
