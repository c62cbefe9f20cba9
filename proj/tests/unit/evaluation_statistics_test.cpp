#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "neuropath/errors.hpp"
#include "neuropath/evaluation.hpp"
#include "neuropath/statistics.hpp"
#include "support.hpp"

using namespace neuropath;
using testing_support::TempDir;
using testing_support::uniform;

namespace {

Network hand_net() {
  std::vector<Layer> layers;
  layers.push_back(Layer::dense(2, 2, Activation::relu, {1, 0, 0, 1}, {0, 0}));
  layers.push_back(Layer::dense(2, 2, Activation::none, {1, 0.5, 0, 1}, {0, 0}));
  return Network({2}, std::move(layers));
}

SynthesisResult result(std::vector<double> x, std::size_t label) {
  SynthesisResult r;
  r.label = label;
  r.original = x;
  r.synthesized = std::move(x);
  return r;
}

// Closed-form Student t CDF for 3 degrees of freedom.
double t3_cdf(double t) {
  const double s = std::sqrt(3.0);
  return 0.5 + (t / (s * (1 + t * t / 3)) + std::atan(t / s)) / std::numbers::pi;
}

std::vector<double> iota(double from, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(from + i);
  return v;
}

}  // namespace

TEST(Coverage, HandExampleFiftyFifty) {
  const Network net = hand_net();
  LayerScores s;
  s.layers = {0};
  s.per_layer = {{1.0, 0.0}};
  const auto set = rank_top_k(s, 1, SelectionMode::pathway);
  std::vector<SynthesisResult> rs{result({0.9, 0.1}, 0), result({0.0, 0.8}, 0),
                                  result({0.5, 0.6}, 1), result({0.0, 0.7}, 1)};
  const auto rep = coverage_and_failures(net, rs, set);
  EXPECT_EQ(rep.n_synth, 4u);
  EXPECT_EQ(rep.n_failed, 2u);
  EXPECT_EQ(rep.n_activating, 2u);
  EXPECT_EQ(rep.n_failed_activating, 1u);
  EXPECT_DOUBLE_EQ(rep.c, 50.0);
  EXPECT_DOUBLE_EQ(rep.f, 50.0);
}

TEST(Coverage, NoFailuresGivesZeroF) {
  const Network net = hand_net();
  LayerScores s;
  s.layers = {0};
  s.per_layer = {{1.0, 0.0}};
  const auto set = rank_top_k(s, 1, SelectionMode::pathway);
  std::vector<SynthesisResult> rs{result({0.9, 0.1}, 0)};
  const auto rep = coverage_and_failures(net, rs, set);
  EXPECT_DOUBLE_EQ(rep.c, 100.0);
  EXPECT_DOUBLE_EQ(rep.f, 0.0);
  EXPECT_THROW(coverage_and_failures(net, std::vector<SynthesisResult>{}, set), UsageError);
  EXPECT_THROW(coverage_and_failures(net, rs, SuspiciousSet{}), UsageError);
}

TEST(Coverage, Rules) {
  const std::vector<TargetStatus> st{{0, 0, true}, {0, 1, false}, {1, 0, true}, {1, 2, false}};
  CoverageOptions o;
  EXPECT_TRUE(covers(st, o));
  o.rule = CoverageRule::all;
  EXPECT_FALSE(covers(st, o));
  o.rule = CoverageRule::fraction;
  o.fraction = 0.5;
  EXPECT_TRUE(covers(st, o));
  o.fraction = 0.75;
  EXPECT_FALSE(covers(st, o));

  const std::vector<TargetStatus> dead_layer{{0, 0, true}, {0, 1, true}, {1, 0, false}};
  EXPECT_FALSE(covers(dead_layer, {}));
  EXPECT_FALSE(covers(std::vector<TargetStatus>{}, {}));

  CoverageOptions bad;
  bad.fraction = 0.0;
  EXPECT_THROW(bad.validate(), UsageError);
  EXPECT_THROW(parse_coverage_rule("most"), UsageError);
}

TEST(Coverage, MergeRecomputesPercentages) {
  CoverageReport a, b;
  a.n_synth = 4;
  a.n_activating = 1;
  a.n_failed = 0;
  b.n_synth = 6;
  b.n_activating = 5;
  b.n_failed = 4;
  b.n_failed_activating = 3;
  a.merge(b);
  EXPECT_DOUBLE_EQ(a.c, 60.0);
  EXPECT_DOUBLE_EQ(a.f, 75.0);
}

TEST(Metrics, UnchangedInputsKeepAccuracyAndZeroDistance) {
  std::mt19937_64 rng(61);
  const Network net = testing_support::random_dense_net(rng, {5, 7, 3}, false);
  std::vector<std::vector<double>> xs;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(uniform(rng, 5, 0, 1));
    labels.push_back(predict(net, xs.back()).predicted_class);
  }
  const auto m = synthesized_metrics(net, xs, labels, xs);
  EXPECT_DOUBLE_EQ(m.accuracy, 100.0);
  EXPECT_EQ(m.count, 10u);
  EXPECT_EQ(m.mean_distance.l1, 0.0);
  EXPECT_EQ(m.mean_distance.linf, 0.0);
  EXPECT_GT(m.loss, 0.0);
  EXPECT_THROW(synthesized_metrics(net, xs, labels, std::span(xs).first(3)), UsageError);
}

TEST(Metrics, MeanDistanceAndAccuracy) {
  const Network net = hand_net();
  const std::vector<std::vector<double>> orig{{0.9, 0.1}, {0.9, 0.1}};
  const std::vector<std::vector<double>> synth{{0.9, 0.1}, {0.3, 0.9}};
  const std::vector<std::size_t> labels{0, 0};
  const auto m = synthesized_metrics(net, orig, labels, synth);
  EXPECT_DOUBLE_EQ(m.accuracy, 50.0);
  EXPECT_NEAR(m.mean_distance.l1, 0.7, 1e-12);
  EXPECT_NEAR(m.mean_distance.l2, 0.5, 1e-12);
  EXPECT_NEAR(m.mean_distance.linf, 0.4, 1e-12);
}

TEST(PlotCsv, Header) {
  TempDir dir;
  const std::vector<PlotPoint> pts{{"mga_tarantula_k1", 10.5, 20.0}};
  write_plot_csv(dir / "p.csv", pts);
  std::ifstream in(dir / "p.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "instance,c,f");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("mga_tarantula_k1,", 0), 0u);
}

TEST(Spearman, HandExample) {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 4, 3, 5};
  const auto r = spearman(x, y);
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(r->statistic, 0.8, 1e-12);
  const double t = 0.8 * std::sqrt(3.0 / (1 - 0.64));
  ASSERT_TRUE(r->p_value.has_value());
  EXPECT_NEAR(*r->p_value, 2 * (1 - t3_cdf(t)), 1e-9);
}

TEST(Spearman, PerfectAndConstant) {
  const std::vector<double> x{1, 2, 3, 4}, up{10, 20, 30, 40}, down{4, 3, 2, 1}, flat{5, 5, 5, 5};
  EXPECT_NEAR(spearman(x, up)->statistic, 1.0, 1e-12);
  EXPECT_EQ(spearman(x, up)->p_value.value(), 0.0);
  EXPECT_NEAR(spearman(x, down)->statistic, -1.0, 1e-12);
  EXPECT_FALSE(spearman(x, flat).has_value());
  EXPECT_THROW(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), UsageError);
  EXPECT_THROW(spearman(x, std::vector<double>{1, 2, 3}), UsageError);
}

TEST(Spearman, TiesUseAverageRanks) {
  // ranks x: 1, 2.5, 2.5, 4 ; y: 1, 2, 3, 4 -> Pearson of ranks
  const std::vector<double> x{1, 2, 2, 3}, y{1, 2, 3, 4};
  const double mx = 2.5;
  const std::vector<double> rx{1, 2.5, 2.5, 4}, ry{1, 2, 3, 4};
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - mx);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - mx) * (ry[i] - mx);
  }
  EXPECT_NEAR(spearman(x, y)->statistic, sxy / std::sqrt(sxx * syy), 1e-12);
}

TEST(Spearman, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 50; ++i) {
    const auto x = uniform(rng, 12, 0, 1), y = uniform(rng, 12, 0, 1);
    std::vector<double> ex;
    for (double v : x) ex.push_back(std::exp(3 * v));
    EXPECT_NEAR(spearman(x, y)->statistic, spearman(ex, y)->statistic, 1e-12);
  }
}

TEST(Wilcoxon, IdenticalSamplesAreNotSignificant) {
  const auto a = iota(1, 10);
  const auto r = wilcoxon_rank_sum(a, a);
  ASSERT_TRUE(r.p_value.has_value());
  EXPECT_GT(*r.p_value, 0.05);
  const std::vector<double> small{1, 2, 3};
  EXPECT_GT(*wilcoxon_rank_sum(small, small).p_value, 0.05);
}

TEST(Wilcoxon, SeparatedSamplesAreSignificant) {
  const auto r = wilcoxon_rank_sum(iota(1, 10), iota(101, 10));
  EXPECT_LT(*r.p_value, 0.001);
  EXPECT_LT(r.statistic, 0.0);
}

TEST(Wilcoxon, ExactSmallSample) {
  // 1 of the C(6,3) = 20 rank assignments is as extreme, on each side.
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_NEAR(*wilcoxon_rank_sum(a, b).p_value, 0.1, 1e-12);
}

TEST(Wilcoxon, SymmetricInArguments) {
  std::mt19937_64 rng(63);
  for (int n : {5, 12}) {
    const auto a = uniform(rng, n, 0, 1), b = uniform(rng, n + 1, 0.2, 1.2);
    const auto ab = wilcoxon_rank_sum(a, b), ba = wilcoxon_rank_sum(b, a);
    EXPECT_NEAR(*ab.p_value, *ba.p_value, 1e-12);
    EXPECT_NEAR(ab.statistic, -ba.statistic, 1e-12);
  }
  EXPECT_THROW(wilcoxon_rank_sum(std::vector<double>{}, iota(1, 3)), UsageError);
}

TEST(A12, HandValues) {
  const std::vector<double> a{1, 2}, b{1, 3};
  EXPECT_DOUBLE_EQ(a12(a, b).statistic, 0.375);
  EXPECT_FALSE(a12(a, b).p_value.has_value());
  const std::vector<double> c{4, 4};
  EXPECT_DOUBLE_EQ(a12(c, c).statistic, 0.5);
  EXPECT_DOUBLE_EQ(mann_whitney_u(a, b), 1.5);
}

TEST(A12, Complementary) {
  std::mt19937_64 rng(64);
  for (int i = 0; i < 50; ++i) {
    auto a = uniform(rng, 7, 0, 1), b = uniform(rng, 9, 0, 1);
    a[0] = b[0];
    EXPECT_NEAR(a12(a, b).statistic + a12(b, a).statistic, 1.0, 1e-12);
  }
}
