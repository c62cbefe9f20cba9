#pragma once

// Reference implementations used to check the library. They follow the
// textbook definitions directly and share no code with it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

struct Counts {
  std::uint64_t cp = 0, np = 0, cf = 0, nf = 0;
};

inline double tarantula(const Counts& c) {
  if (c.cf == 0) return 0.0;
  const double fail = static_cast<double>(c.cf) / static_cast<double>(c.cf + c.nf);
  const double pass = c.cp + c.np == 0 ? 0.0 : static_cast<double>(c.cp) / static_cast<double>(c.cp + c.np);
  return fail / (fail + pass);
}

inline double ochiai(const Counts& c) {
  if (c.cf == 0) return 0.0;
  return static_cast<double>(c.cf) /
         std::sqrt(static_cast<double>(c.cf + c.nf) * static_cast<double>(c.cf + c.cp));
}

inline double barinel(const Counts& c) {
  if (c.cf == 0) return 0.0;
  return 1.0 - static_cast<double>(c.cp) / static_cast<double>(c.cf + c.cp);
}

// One-hidden-layer ReLU net y = W2 relu(W1 x + b1) + b2 with row-major
// weights ([out][in]).
struct TinyNet {
  std::size_t in = 0, hidden = 0, out = 0;
  std::vector<double> w1, b1, w2, b2;
};

inline double stabilize(double d, double eps) {
  if (std::abs(d) >= eps) return d;
  return d >= 0 ? eps : -eps;
}

// Per-input replay of the hit-spectrum accumulation: relevance by the
// epsilon z-rule without bias, critical set by the shortest descending
// prefix above alpha * g, then one counter per critical neuron.
inline std::vector<Counts> replay_spectrum(const TinyNet& net, const std::vector<std::vector<double>>& xs,
                                           const std::vector<std::size_t>& labels, double alpha,
                                           double beta, double eps = 1e-9) {
  std::vector<Counts> counts(net.hidden);
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const auto& x = xs[s];
    std::vector<double> a(net.hidden);
    for (std::size_t j = 0; j < net.hidden; ++j) {
      double z = net.b1[j];
      for (std::size_t i = 0; i < net.in; ++i) z += net.w1[j * net.in + i] * x[i];
      a[j] = z > 0 ? z : 0.0;
    }
    std::vector<double> logits(net.out);
    std::size_t pred = 0;
    for (std::size_t k = 0; k < net.out; ++k) {
      double z = net.b2[k];
      for (std::size_t j = 0; j < net.hidden; ++j) z += net.w2[k * net.hidden + j] * a[j];
      logits[k] = z;
      if (z > logits[pred]) pred = k;
    }
    const double f = logits[pred];
    double d_out = 0;
    for (std::size_t j = 0; j < net.hidden; ++j) d_out += a[j] * net.w2[pred * net.hidden + j];
    std::vector<double> rh(net.hidden);
    for (std::size_t j = 0; j < net.hidden; ++j)
      rh[j] = a[j] * net.w2[pred * net.hidden + j] / stabilize(d_out, eps) * f;
    double g = 0;
    for (std::size_t j = 0; j < net.hidden; ++j) {
      double d = 0;
      for (std::size_t i = 0; i < net.in; ++i) d += x[i] * net.w1[j * net.in + i];
      for (std::size_t i = 0; i < net.in; ++i) g += x[i] * net.w1[j * net.in + i] / stabilize(d, eps) * rh[j];
    }
    if (!(g > 0)) continue;

    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < net.hidden; ++j)
      if (rh[j] > 0) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](auto p, auto q) { return rh[p] > rh[q]; });
    std::vector<std::size_t> critical;
    double acc = 0;
    for (auto j : order) {
      critical.push_back(j);
      acc += rh[j];
      if (acc > alpha * g) break;
    }
    const bool passed = pred == labels[s];
    for (auto j : critical) {
      const bool active = a[j] > beta;
      auto& c = counts[j];
      if (passed) (active ? c.cp : c.np)++;
      else (active ? c.cf : c.nf)++;
    }
  }
  return counts;
}

}  // namespace oracles
