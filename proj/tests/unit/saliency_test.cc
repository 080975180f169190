/*
 * Copyright 2026 The ANDOR Bench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "andor/dataset_io.hpp"
#include "andor/ground_truth.hpp"
#include "andor/saliency.hpp"
#include "andor/saliency_io.hpp"

namespace andor {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

SaliencyTensor RawTensor(std::vector<std::vector<double>> rows, int length) {
  SaliencyTensor t;
  t.method = "test";
  t.length = length;
  for (std::size_t i = 0; i < rows.size(); ++i) t.ids.push_back(static_cast<std::int64_t>(i));
  t.scores = std::move(rows);
  return t;
}

TEST(InterpretationModeTest, Definitions) {
  auto t = RawTensor({{-2, 0, 3}}, 3);
  EXPECT_THAT(apply_interpretation_mode(t, InterpretationMode::kCutoff).scores[0],
              ElementsAre(0, 0, 3));
  EXPECT_THAT(apply_interpretation_mode(t, InterpretationMode::kAbsolute).scores[0],
              ElementsAre(2, 0, 3));
  EXPECT_THAT(apply_interpretation_mode(t, InterpretationMode::kAsIs).scores[0],
              ElementsAre(-2, 0, 3));
}

TEST(InterpretationModeTest, AppliedOnlyOnce) {
  auto once = apply_interpretation_mode(RawTensor({{1, -1}}, 2), InterpretationMode::kCutoff);
  EXPECT_FALSE(once.raw);
  EXPECT_THROW(apply_interpretation_mode(once, InterpretationMode::kCutoff), ValidationError);
}

TEST(InterpretationModeTest, ScoreFunctionsAreIdempotent) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng::uniform(gen, -5, 5);
    for (auto m : {InterpretationMode::kCutoff, InterpretationMode::kAbsolute}) {
      EXPECT_EQ(interpret_score(m, interpret_score(m, x)), interpret_score(m, x));
    }
  }
}

TEST(InterpretationModeTest, MethodPresets) {
  using M = InterpretationMode;
  const std::vector<std::pair<std::string, M>> expected = {
      {"LRP-Full", M::kCutoff},      {"LRP-Rollout", M::kAsIs},
      {"LRP-Transformer", M::kAsIs}, {"LRP-Transformer CLS", M::kAsIs},
      {"Attention", M::kAsIs},       {"IntegratedGradients", M::kAbsolute},
      {"DeepLift", M::kCutoff},      {"Deconvolution", M::kAbsolute},
      {"GradCAM", M::kAsIs},         {"GuidedGradCam", M::kAbsolute},
      {"GradCAM++", M::kAsIs},       {"KernelSHAP", M::kCutoff},
      {"FeaturePermutation", M::kCutoff}, {"IQ-SHAP", M::kAsIs}};
  for (const auto& [name, mode] : expected) {
    ASSERT_TRUE(preset_mode(name).has_value()) << name;
    EXPECT_EQ(*preset_mode(name), mode) << name;
  }
  EXPECT_FALSE(preset_mode("NoSuchMethod").has_value());
}

TEST(OrderConversionTest, UpscaleDuplicatesRows) {
  auto up = upscale_1d_to_2d(RawTensor({{1, 2}, {0, 0}}, 2));
  EXPECT_EQ(up.order, 2);
  EXPECT_THAT(up.scores[0], ElementsAre(1, 2, 1, 2));
  EXPECT_THAT(up.scores[1], ElementsAre(0, 0, 0, 0));
  EXPECT_THROW(upscale_1d_to_2d(up), ValidationError);
}

TEST(OrderConversionTest, ReduceTakesRowMax) {
  auto t = RawTensor({{1, 5, 2, 0}}, 2);
  t.order = 2;
  EXPECT_THAT(reduce_2d_to_1d(t).scores[0], ElementsAre(5, 2));
  EXPECT_THAT(reduce_2d_to_1d(upscale_1d_to_2d(RawTensor({{1, 4, 2}}, 3))).scores[0],
              ElementsAre(4, 4, 4));
}

TEST(OrderConversionTest, SymmetricReductionMatchesColumnMax) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int l = 2 + trial % 7;
    std::vector<double> m(l * l);
    for (int i = 0; i < l; ++i) {
      for (int j = 0; j <= i; ++j) m[i * l + j] = m[j * l + i] = rng::uniform01(gen);
    }
    auto rows = reduce_row(m, l);
    for (int j = 0; j < l; ++j) {
      double col = m[j];
      for (int i = 1; i < l; ++i) col = std::max(col, m[i * l + j]);
      EXPECT_EQ(rows[j], col);
    }
    std::vector<double> v(l);
    for (auto& x : v) x = rng::uniform(gen, -1, 1);
    const double top = *std::max_element(v.begin(), v.end());
    for (double r : reduce_row(upscale_row(v), l)) EXPECT_EQ(r, top);
  }
}

// Independent oracle: value function by scanning the dataset, Shapley by
// averaging marginal contributions over all l! orderings.
std::vector<double> PermutationShapley(const ProbabilityFn& fn, const Dataset& ds,
                                       const Sample& x, int cls) {
  const int l = ds.length();
  auto value = [&](std::uint64_t coalition) {
    double sum = 0;
    int n = 0;
    for (const auto& s : ds.samples) {
      bool agree = true;
      for (int j = 0; j < l && agree; ++j) {
        if ((coalition >> j) & 1U) agree = s.codes[j] == x.codes[j];
      }
      if (agree) {
        sum += fn(ds.inputs(s))[cls];
        ++n;
      }
    }
    return sum / n;
  };
  std::vector<int> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(l, 0.0);
  int perms = 0;
  do {
    std::uint64_t c = 0;
    double prev = value(0);
    for (int j : order) {
      c |= std::uint64_t{1} << j;
      const double cur = value(c);
      phi[j] += cur - prev;
      prev = cur;
    }
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& v : phi) v /= perms;
  return phi;
}

TEST(ShapleyTest, MatchesPermutationOracle) {
  auto ds = enumerate_samples(preset("BinarySingleGate-OR"));
  auto model = MlpModel::initialize(6, {8}, 77);
  auto fn = model.as_function();
  ShapleyExplainer explainer(ds, fn);
  for (int k : {0, 13, 40, 63}) {
    const auto& s = ds.samples[k];
    auto fast = explainer.explain(s, 1);
    auto slow = PermutationShapley(fn, ds, s, 1);
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(fast[j], slow[j], 1e-12);
  }
}

TEST(ShapleyTest, EfficiencyOnRandomModel) {
  auto ds = enumerate_samples(preset("2inBinary-XOR"));
  auto model = MlpModel::initialize(8, {16, 16}, 5);
  ShapleyExplainer explainer(ds, model.as_function());
  for (int k : {1, 100, 255}) {
    const auto& s = ds.samples[k];
    auto v = explainer.coalition_values(s, 0);
    auto phi = explainer.explain(s, 0);
    EXPECT_NEAR(std::accumulate(phi.begin(), phi.end(), 0.0), v.back() - v.front(), 1e-9);
  }
}

TEST(ShapleyTest, ExactLogicStubGivesSymmetricScoresAndZeroBaseline) {
  auto config = preset("BinarySingleGate-AND");
  auto ds = enumerate_samples(config);
  LogicPredictor stub(config);
  ShapleyExplainer explainer(ds, stub.as_function());
  // All four gate inputs positive.
  const auto& s = ds.samples[0b111100];
  auto phi = explainer.explain(s, 1);
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(phi[j], phi[0], 1e-12);
  EXPECT_GT(phi[0], 0.0);
  EXPECT_NEAR(phi[4], 0.0, 1e-12);
  EXPECT_NEAR(phi[5], 0.0, 1e-12);
}

TEST(ShapleyTest, RefusesLongSamplesAndForeignSamples) {
  auto config = preset("2inBinary-AND");
  auto ds = enumerate_samples(config);
  LogicPredictor stub(config);
  std::vector<std::size_t> half = {0, 1, 2};
  ShapleyExplainer partial(ds.subset(half, SplitTag::kTest), stub.as_function());
  EXPECT_THROW(partial.explain(ds.samples[200], 1), ValidationError);
  DatasetConfig wide = config;
  wide.nr_baseline = 9;
  Dataset fake{wide, build_layout(wide), {}, SplitTag::kFull};
  EXPECT_THROW(ShapleyExplainer(fake, stub.as_function()), ValidationError);
}

TEST(OcclusionTest, ConstantModelScoresZero) {
  ProbabilityFn constant = [](std::span<const double>) { return ClassProbabilities{0.3, 0.7}; };
  for (double v : occlusion(constant, std::vector<double>{1, -1, 1}, 1)) EXPECT_EQ(v, 0.0);
}

TEST(OcclusionTest, LogicStubAndGateInputsMatter) {
  auto config = preset("BinarySingleGate-AND");
  LogicPredictor stub(config);
  auto scores = occlusion(stub.as_function(), std::vector<double>{1, 1, 1, 1, -1, 1}, 1);
  EXPECT_THAT(scores, ElementsAre(1, 1, 1, 1, 0, 0));
}

TEST(FeaturePermutationTest, BaselineColumnsScoreZeroUnderExactLogic) {
  auto config = preset("2inBinary-OR");
  auto ds = enumerate_samples(config);
  LogicPredictor stub(config);
  auto scores = feature_permutation(stub.as_function(), FeatureTable::from(ds), 3);
  EXPECT_EQ(scores[6], 0.0);
  EXPECT_EQ(scores[7], 0.0);
  EXPECT_GT(scores[0], 0.0);
  EXPECT_EQ(scores, feature_permutation(stub.as_function(), FeatureTable::from(ds), 3));
}

TEST(IntegratedGradientsTest, CompletenessAt64Steps) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto model = MlpModel::initialize(8, {16, 16}, trial);
    std::vector<double> x(8);
    for (auto& v : x) v = rng::uniform(gen, -1, 1);
    EXPECT_LT(std::abs(integrated_gradients(model, x, trial % 2).completeness_gap), 0.01);
  }
}

TEST(IntegratedGradientsTest, ZeroInputGivesZeroScores) {
  auto model = MlpModel::initialize(4, {8}, 1);
  for (double v : integrated_gradients(model, std::vector<double>(4, 0.0), 1).scores) {
    EXPECT_EQ(v, 0.0);
  }
  for (double v : gradient_x_input(model, std::vector<double>(4, 0.0), 1)) EXPECT_EQ(v, 0.0);
}

TEST(IntegratedGradientsTest, MoreStepsShrinkTheGap) {
  std::mt19937_64 gen(10);
  for (int seed = 0; seed < 10; ++seed) {
    auto model = MlpModel::initialize(8, {16, 16}, 100 + seed);
    std::vector<double> x(8);
    for (auto& v : x) v = rng::uniform01(gen) < 0.5 ? -1.0 : 1.0;
    double previous = std::abs(integrated_gradients(model, x, 1, 4).completeness_gap);
    for (int steps : {8, 16, 32}) {
      const double gap = std::abs(integrated_gradients(model, x, 1, steps).completeness_gap);
      EXPECT_LE(gap, previous + 1e-15) << "seed " << seed << " steps " << steps;
      previous = gap;
    }
  }
}

TEST(ControlSaliencyTest, OracleScoresChosenSets) {
  auto config = preset("2inBinary-AND");
  // AND-gate pair negative, everything else positive: label 0.
  std::vector<std::uint8_t> codes = {0, 0, 1, 1, 1, 0, 1, 1};
  Sample s{0, codes, Formula(config).eval_codes(codes)};
  ASSERT_EQ(s.label, 0);
  auto truth = bruteforce_prime_sets(config, s);
  EXPECT_THAT(oracle_saliency(truth, 8, OracleVariant::kMax), ElementsAre(1, 1, 0, 0, 0, 0, 0, 0));
  EXPECT_THAT(oracle_saliency(truth, 8, OracleVariant::kMin), ElementsAre(1, 0, 0, 0, 0, 0, 0, 0));
}

TEST(ControlSaliencyTest, RandomIsReproducible) {
  EXPECT_EQ(random_saliency(4, 17, 8), random_saliency(4, 17, 8));
  EXPECT_NE(random_saliency(4, 17, 8), random_saliency(4, 18, 8));
  for (double v : random_saliency(4, 17, 8)) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(ControlSaliencyTest, AdversarialLeaksLabelIntoBaseline) {
  auto layout = build_layout(preset("2inBinary-OR"));
  EXPECT_THAT(adversarial_encoder_saliency(layout, 1), ElementsAre(0, 0, 0, 0, 0, 0, 1, 0));
  EXPECT_THAT(adversarial_encoder_saliency(layout, 0), ElementsAre(0, 0, 0, 0, 0, 0, 0, 0));
}

class SaliencyIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ds_ = enumerate_samples(preset("2inBinary-XOR"));
    hash_ = dataset_hash(ds_);
    tensor_.method = "Random";
    tensor_.dataset_name = ds_.config.name;
    tensor_.dataset_hash = hash_;
    tensor_.length = 8;
    for (const auto& s : ds_.samples) {
      tensor_.ids.push_back(s.id);
      auto row = random_saliency(9, s.id, 8);
      for (auto& v : row) v = (v - 0.5) * 1e-3 / 3.0;
      tensor_.scores.push_back(row);
    }
  }
  Dataset ds_;
  std::string hash_;
  SaliencyTensor tensor_;
};

TEST_F(SaliencyIoTest, RoundTripIsExact) {
  auto text = serialize_saliency(tensor_);
  auto back = parse_saliency(text, ds_, hash_);
  EXPECT_EQ(back.size(), 256u);
  EXPECT_EQ(back, tensor_);
  auto applied = apply_interpretation_mode(tensor_, InterpretationMode::kAbsolute);
  EXPECT_EQ(parse_saliency(serialize_saliency(applied), ds_, hash_), applied);
}

TEST_F(SaliencyIoTest, TamperedHashNamesBoth) {
  auto text = serialize_saliency(tensor_);
  const std::string other(64, 'a');
  try {
    parse_saliency(text, ds_, other);
    FAIL() << "expected integrity error";
  } catch (const IntegrityError& e) {
    EXPECT_THAT(e.what(), HasSubstr(hash_));
    EXPECT_THAT(e.what(), HasSubstr(other));
  }
}

TEST_F(SaliencyIoTest, OrderTwoWithOrderOnePayloadIsAShapeError) {
  auto text = serialize_saliency(tensor_);
  const auto pos = text.find("\"order\":1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 9, "\"order\":2");
  EXPECT_THROW(parse_saliency(text, ds_, hash_), ValidationError);
}

TEST_F(SaliencyIoTest, NonFiniteScoresAreRefusedAtWrite) {
  tensor_.scores[5][2] = std::nan("");
  EXPECT_THROW(serialize_saliency(tensor_), ValidationError);
  tensor_.scores[5][2] = INFINITY;
  EXPECT_THROW(serialize_saliency(tensor_), ValidationError);
}

TEST_F(SaliencyIoTest, UnknownVersionAndForeignIdsAreRefused) {
  auto text = serialize_saliency(tensor_);
  auto bumped = text;
  bumped.replace(bumped.find("andor-saliency/1"), 16, "andor-saliency/2");
  EXPECT_THROW(parse_saliency(bumped, ds_, hash_), ValidationError);
  auto foreign = text;
  foreign.replace(foreign.find("{\"id\":0,"), 8, "{\"id\":999,");
  EXPECT_THROW(parse_saliency(foreign, ds_, hash_), ValidationError);
}

}  // namespace
}  // namespace andor
