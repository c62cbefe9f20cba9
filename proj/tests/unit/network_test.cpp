#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "neuropath/errors.hpp"
#include "neuropath/network.hpp"
#include "support.hpp"

using namespace neuropath;
using testing_support::random_dense_net;
using testing_support::random_small_net;
using testing_support::uniform;

namespace {

Network single_dense(std::vector<double> w, std::vector<double> b, std::size_t in, std::size_t out,
                     Activation act) {
  return Network({in}, {Layer::dense(in, out, act, std::move(w), std::move(b))});
}

// Straightforward reference forward pass for dense stacks.
std::vector<double> reference_logits(const Network& net, std::vector<double> a) {
  for (const auto& layer : net.layers()) {
    std::vector<double> z(layer.out_size());
    for (std::size_t o = 0; o < layer.out_size(); ++o) {
      double s = layer.bias()[o];
      for (std::size_t i = 0; i < layer.in_size(); ++i) s += layer.weights()[o * layer.in_size() + i] * a[i];
      z[o] = layer.activation() == Activation::relu ? std::max(0.0, s) : s;
    }
    a = z;
  }
  return a;
}

double min_abs_pre(const ActivationTrace& t) {
  double m = INFINITY;
  for (std::size_t l = 0; l + 1 < t.pre_activations.size(); ++l)
    for (double v : t.pre_activations[l]) m = std::min(m, std::abs(v));
  return m;
}

}  // namespace

TEST(Forward, IdentityReluZeroesNegative) {
  const Network net = single_dense({1, 0, 0, 1}, {0, 0}, 2, 2, Activation::relu);
  const auto t = forward(net, std::vector<double>{0.5, -0.2});
  EXPECT_EQ(t.post_activations[0], (std::vector<double>{0.5, 0.0}));
}

TEST(Forward, HandMatrixMultiply) {
  const Network net = single_dense({1, 1, 1, -1}, {0, 0}, 2, 2, Activation::relu);
  const auto t = forward(net, std::vector<double>{1, 2});
  EXPECT_EQ(t.pre_activations[0], (std::vector<double>{3, -1}));
  EXPECT_EQ(t.post_activations[0], (std::vector<double>{3, 0}));
}

TEST(Forward, WrongInputLengthIsDimensionError) {
  const Network net = single_dense({1, 1}, {0}, 2, 1, Activation::none);
  EXPECT_THROW(forward(net, std::vector<double>{1, 2, 3}), DimensionError);
  try {
    forward(net, std::vector<double>{1});
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos);
  }
}

TEST(Forward, NonFiniteInputRejected) {
  const Network net = single_dense({1, 1}, {0}, 2, 1, Activation::none);
  EXPECT_THROW(forward(net, std::vector<double>{NAN, 0}), Error);
}

TEST(Forward, MatchesReferenceOnRandomNets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Network net = random_small_net(rng, false);
    const auto x = uniform(rng, net.input_size(), -1, 1);
    const auto expect = reference_logits(net, x);
    const auto trace = forward(net, x);
    const auto got = trace.logits();
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expect[i], 1e-12);
  }
}

TEST(Forward, ReluPostIsMaxOfPre) {
  std::mt19937_64 rng(12);
  const Network net = random_dense_net(rng, {6, 8, 8, 3}, false);
  const auto t = forward(net, uniform(rng, 6, -1, 1));
  for (std::size_t l = 0; l + 1 < net.size(); ++l)
    for (std::size_t i = 0; i < t.pre_activations[l].size(); ++i)
      EXPECT_EQ(t.post_activations[l][i], std::max(0.0, t.pre_activations[l][i]));
}

TEST(Predict, ArgmaxAndTieBreak) {
  EXPECT_EQ(argmax(std::vector<double>{0.1, 0.9}), 1u);
  EXPECT_EQ(argmax(std::vector<double>{0.5, 0.5}), 0u);
  EXPECT_EQ(argmax(std::vector<double>{-1, 3, 3, 2}), 1u);
  const Network net = single_dense({1, 1}, {0, 0}, 1, 2, Activation::none);
  EXPECT_EQ(predict(net, std::vector<double>{1.0}).predicted_class, 0u);
}

TEST(Network, RejectsMismatchedShapes) {
  std::vector<Layer> layers;
  layers.push_back(Layer::dense(3, 4, Activation::relu, std::vector<double>(12, 0.1), std::vector<double>(4, 0)));
  layers.push_back(Layer::dense(5, 2, Activation::none, std::vector<double>(10, 0.1), std::vector<double>(2, 0)));
  EXPECT_THROW(Network({3}, std::move(layers)), Error);
}

TEST(Network, RejectsNonFiniteParameters) {
  EXPECT_THROW(single_dense({1, INFINITY}, {0}, 2, 1, Activation::none), Error);
}

TEST(Network, WrongWeightCountRejected) {
  EXPECT_THROW(Layer::dense(2, 3, Activation::relu, std::vector<double>(5), std::vector<double>(3)), Error);
}

TEST(Network, HiddenLayersExcludeOutputAndParameterFreeLayers) {
  Shape in{1, 6, 6};
  std::vector<Layer> layers;
  layers.push_back(Layer::conv2d(in, 2, 3, Activation::relu, std::vector<double>(18, 0.1), std::vector<double>(2, 0)));
  layers.push_back(Layer::maxpool(layers.back().output_shape()));
  layers.push_back(Layer::flatten(layers.back().output_shape()));
  layers.push_back(Layer::dense(8, 4, Activation::relu, std::vector<double>(32, 0.1), std::vector<double>(4, 0)));
  layers.push_back(Layer::dense(4, 3, Activation::none, std::vector<double>(12, 0.1), std::vector<double>(3, 0)));
  const Network net(in, std::move(layers));
  EXPECT_EQ(net.hidden_layers(), (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(net.num_parameterized_layers(), 3u);
}

TEST(Conv, MatchesDirectConvolutionAndPooling) {
  std::mt19937_64 rng(5);
  const Shape in{2, 5, 5};
  const auto w = uniform(rng, 3 * 2 * 3 * 3, -1, 1);
  const auto b = uniform(rng, 3, -0.2, 0.2);
  const Layer conv = Layer::conv2d(in, 3, 3, Activation::relu, w, b);
  ASSERT_EQ(conv.output_shape(), (Shape{3, 3, 3}));
  std::vector<Layer> layers{conv, Layer::maxpool(conv.output_shape())};
  layers.push_back(Layer::flatten(layers.back().output_shape()));
  layers.push_back(Layer::dense(3, 2, Activation::none, {1, 0, 0, 0, 1, 1}, {0, 0}));
  const Network net(in, layers);
  const auto x = uniform(rng, 50, 0, 1);
  const auto t = forward(net, x);

  for (std::size_t o = 0; o < 3; ++o)
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t xx = 0; xx < 3; ++xx) {
        double s = b[o];
        for (std::size_t c = 0; c < 2; ++c)
          for (std::size_t ky = 0; ky < 3; ++ky)
            for (std::size_t kx = 0; kx < 3; ++kx)
              s += w[((o * 2 + c) * 3 + ky) * 3 + kx] * x[(c * 5 + y + ky) * 5 + xx + kx];
        EXPECT_NEAR(t.pre_activations[0][(o * 3 + y) * 3 + xx], s, 1e-12);
      }
  // 3x3 map pooled with a 2x2 stride-2 window keeps only the top-left block.
  ASSERT_EQ(t.post_activations[1].size(), 3u);
  for (std::size_t o = 0; o < 3; ++o) {
    const auto& a = t.post_activations[0];
    const double m = std::max({a[o * 9 + 0], a[o * 9 + 1], a[o * 9 + 3], a[o * 9 + 4]});
    EXPECT_EQ(t.post_activations[1][o], m);
  }
}

TEST(Gradient, HandChainRule) {
  const Network net = single_dense({2, 3}, {0}, 2, 1, Activation::none);
  const ObjectiveTerm term{0, 0, 1.0};
  EXPECT_EQ(input_gradient(net, std::vector<double>{1, 1}, {&term, 1}), (std::vector<double>{2, 3}));
}

TEST(Gradient, DeadUnitHasZeroGradient) {
  std::vector<Layer> layers;
  layers.push_back(Layer::dense(2, 1, Activation::relu, {1, 1}, {-5}));
  layers.push_back(Layer::dense(1, 1, Activation::none, {1}, {0}));
  const Network net({2}, std::move(layers));
  const ObjectiveTerm term{1, 0, 1.0};
  const auto g = input_gradient(net, std::vector<double>{1, 1}, {&term, 1});
  EXPECT_EQ(g, (std::vector<double>{0, 0}));
}

TEST(Gradient, OutOfRangeNeuronIsIndexError) {
  const Network net = single_dense({2, 3}, {0}, 2, 1, Activation::none);
  const ObjectiveTerm bad_neuron{0, 4, 1.0};
  const ObjectiveTerm bad_layer{3, 0, 1.0};
  EXPECT_THROW(input_gradient(net, std::vector<double>{1, 1}, {&bad_neuron, 1}), IndexError);
  EXPECT_THROW(input_gradient(net, std::vector<double>{1, 1}, {&bad_layer, 1}), IndexError);
}

TEST(Gradient, MatchesCentralDifferencesOnRandomNets) {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Network net = random_small_net(rng, false);
    const auto x = uniform(rng, net.input_size(), -1, 1);
    const auto trace = forward(net, x);
    if (min_abs_pre(trace) < 1e-3) continue;  // finite differences would cross a kink
    std::uniform_int_distribution<std::size_t> pick_layer(0, net.size() - 1);
    const std::size_t layer = pick_layer(rng);
    std::vector<ObjectiveTerm> terms;
    for (std::size_t n = 0; n < net.layer(layer).out_size(); ++n) terms.push_back({layer, n, 0.5 + n});
    const auto g = input_gradient(net, x, terms);
    const double h = 1e-4;
    double max_rel = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (evaluate_objective(forward(net, xp), terms) -
                         evaluate_objective(forward(net, xm), terms)) / (2 * h);
      max_rel = std::max(max_rel, std::abs(fd - g[i]) / std::max(1.0, std::abs(fd)));
    }
    EXPECT_LT(max_rel, 1e-3);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Gradient, ConvNetMatchesCentralDifferences) {
  std::mt19937_64 rng(8);
  const Shape in{1, 6, 6};
  std::vector<Layer> layers;
  layers.push_back(Layer::conv2d(in, 2, 3, Activation::relu, uniform(rng, 18, -1, 1), uniform(rng, 2, -0.1, 0.1)));
  layers.push_back(Layer::maxpool(layers.back().output_shape()));
  layers.push_back(Layer::flatten(layers.back().output_shape()));
  layers.push_back(Layer::dense(8, 3, Activation::none, uniform(rng, 24, -1, 1), uniform(rng, 3, -0.1, 0.1)));
  const Network net(in, std::move(layers));
  const auto x = uniform(rng, 36, 0, 1);
  const std::vector<ObjectiveTerm> terms{{3, 0, 1.0}, {3, 2, -2.0}};
  const auto g = input_gradient(net, x, terms);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto xp = x, xm = x;
    xp[i] += 1e-6;
    xm[i] -= 1e-6;
    const double fd = (evaluate_objective(forward(net, xp), terms) -
                       evaluate_objective(forward(net, xm), terms)) / 2e-6;
    EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Gradient, PiecewiseLinearAlongDirection) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Network net = random_small_net(rng, false);
    const auto x = uniform(rng, net.input_size(), -1, 1);
    const auto dir = uniform(rng, net.input_size(), -1, 1);
    const double eps = 1e-6;
    auto y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += eps * dir[i];
    const auto tx = forward(net, x), ty = forward(net, y);
    bool same_pattern = true;
    for (std::size_t l = 0; l + 1 < net.size(); ++l)
      for (std::size_t i = 0; i < tx.pre_activations[l].size(); ++i)
        same_pattern &= (tx.pre_activations[l][i] > 0) == (ty.pre_activations[l][i] > 0);
    if (!same_pattern) continue;
    for (std::size_t c = 0; c < net.num_classes(); ++c) {
      const ObjectiveTerm term{net.size() - 1, c, 1.0};
      const auto g = input_gradient(net, tx, {&term, 1});
      double jg = 0;
      for (std::size_t i = 0; i < g.size(); ++i) jg += g[i] * dir[i];
      EXPECT_NEAR(ty.logits()[c], tx.logits()[c] + eps * jg, 1e-9);
    }
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

TEST(Forward, Deterministic) {
  std::mt19937_64 rng(4);
  const Network net = random_dense_net(rng, {10, 12, 4}, false);
  const auto x = uniform(rng, 10, 0, 1);
  const auto a = forward(net, x), b = forward(net, x);
  EXPECT_EQ(a.pre_activations, b.pre_activations);
  EXPECT_EQ(a.post_activations, b.post_activations);
}
