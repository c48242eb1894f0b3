// Copyright 2026 The plearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plearn/dynamics.h"

#include <gtest/gtest.h>

#include <cfloat>
#include <cmath>

#include "plearn/error.h"

namespace plearn {
namespace {

// Three binomial standard deviations around p for n draws.
double Binomial3Sigma(double p, double n) { return 3.0 * std::sqrt(p * (1 - p) / n); }

Strategy RandomStrategy(int m, Rng& rng) {
  std::vector<double> w(m);
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.Uniform());
    sum += x;
  }
  for (double& x : w) x /= sum;
  // Occasionally put the point on a face of the simplex.
  if (rng.Bernoulli(0.2)) {
    const int k = rng.UniformInt(m);
    const double moved = w[k];
    w[k] = 0.0;
    w[(k + 1) % m] += moved;
  }
  return Strategy::FromWeights(std::move(w));
}

TEST(StrategyTest, Validation) {
  EXPECT_THROW(Strategy::FromWeights({0.5, 0.6}), Error);
  EXPECT_THROW(Strategy::FromWeights({-0.1, 1.1}), Error);
  EXPECT_THROW(Strategy::FromWeights({}), Error);
  EXPECT_NO_THROW(Strategy::FromWeights({0.5, 0.5 + 1e-10}));
}

TEST(StrategyTest, RenormalizesOnlyAboveThreshold) {
  Strategy x = Strategy::FromWeights({0.5, 0.5 + 1e-10});
  EXPECT_TRUE(x.RenormalizeIfDrifted());
  EXPECT_NEAR(x.Sum(), 1.0, 1e-15);
  Strategy y = Strategy::FromWeights({0.5, 0.5 + 1e-13});
  EXPECT_FALSE(y.RenormalizeIfDrifted());
}

TEST(SampleActionTest, VertexWithoutTremble) {
  Rng rng(1);
  const Strategy e0 = Strategy::Vertex(2, 0);
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(SampleAction(e0, 0.0, rng), 0);
}

TEST(SampleActionTest, FullTrembleIsUniform) {
  Rng rng(2);
  const Strategy e0 = Strategy::Vertex(2, 0);
  const int n = 100000;
  int ones = 0;
  for (int k = 0; k < n; ++k) ones += SampleAction(e0, 1.0, rng);
  EXPECT_NEAR(ones / double(n), 0.5, Binomial3Sigma(0.5, n));
}

TEST(SampleActionTest, MixtureProbability) {
  // P(0) = (1 - lambda) x_0 + lambda / m = 0.9 * 0.7 + 0.1 * 0.5.
  const double expected = 0.9 * 0.7 + 0.1 * 0.5;
  ASSERT_NEAR(expected, 0.68, 1e-15);
  Rng rng(3);
  const Strategy x = Strategy::FromWeights({0.7, 0.3});
  const int n = 100000;
  int zeros = 0;
  for (int k = 0; k < n; ++k) zeros += SampleAction(x, 0.1, rng) == 0;
  EXPECT_NEAR(zeros / double(n), expected, Binomial3Sigma(expected, n));
}

TEST(UpdateStrategyTest, Examples) {
  const Strategy e0 = Strategy::Vertex(2, 0);
  EXPECT_EQ(UpdateStrategy(e0, 0, 1.7, 0.3), e0);

  const Strategy a = UpdateStrategy(Strategy::FromWeights({0.5, 0.5}), 0, 1.0, 0.1);
  EXPECT_NEAR(a[0], 0.55, 1e-15);
  EXPECT_NEAR(a[1], 0.45, 1e-15);

  const Strategy b = UpdateStrategy(Strategy::FromWeights({0.2, 0.8}), 0, 2.0, 0.25);
  EXPECT_NEAR(b[0], 0.6, 1e-15);
  EXPECT_NEAR(b[1], 0.4, 1e-15);
}

TEST(UpdateStrategyTest, StepTooLarge) {
  const Strategy x = Strategy::Uniform(3);
  try {
    UpdateStrategy(x, 1, 4.0, 0.25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStepTooLarge);
  }
  EXPECT_THROW(UpdateStrategy(x, 1, 5.0, 0.25), Error);
  EXPECT_NO_THROW(UpdateStrategy(x, 1, 3.9, 0.25));
}

TEST(UpdateStrategyTest, SimplexClosureProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 20000; ++trial) {
    const int m = 2 + rng.UniformInt(5);
    const Strategy x = RandomStrategy(m, rng);
    const double gain = rng.Uniform();
    if (gain == 0.0) continue;
    const double u = 0.5 + 2.0 * rng.Uniform();
    const Strategy y = UpdateStrategy(x, rng.UniformInt(m), u, gain / u);
    for (double w : y.weights()) EXPECT_GE(w, 0.0);
    EXPECT_LE(std::abs(y.Sum() - x.Sum()), 4 * DBL_EPSILON);
  }
}

TEST(UpdateStrategyTest, OneStepContraction) {
  Rng rng(12);
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = 2 + rng.UniformInt(4);
    const Strategy x = RandomStrategy(m, rng);
    const int a = rng.UniformInt(m);
    const double epsilon = 0.01 + 0.2 * rng.Uniform();
    const double u = (0.05 + 0.9 * rng.Uniform()) / epsilon;
    const Strategy y = UpdateStrategy(x, a, u, epsilon);
    EXPECT_NEAR(1.0 - y[a], (1.0 - epsilon * u) * (1.0 - x[a]), 1e-14);
  }
}

TEST(ClosedFormTest, Examples) {
  const Strategy x0 = Strategy::FromWeights({0.5, 0.5});
  EXPECT_EQ(ClosedFormStrategy(x0, 0, 1.0, 0.1, 0), x0);
  const Strategy one = ClosedFormStrategy(x0, 0, 1.0, 0.1, 1);
  const Strategy step = UpdateStrategy(x0, 0, 1.0, 0.1);
  EXPECT_NEAR(one[0], 0.55, 1e-15);
  EXPECT_NEAR(one[1], 0.45, 1e-15);
  EXPECT_NEAR(one[0], step[0], 1e-15);
  const Strategy far = ClosedFormStrategy(x0, 1, 1.0, 0.1, 10000);
  EXPECT_LT(far.VertexDistance(1), 1e-9);
  EXPECT_THROW(ClosedFormStrategy(x0, 0, 10.0, 0.1, 3), Error);
}

TEST(ClosedFormTest, MatchesIteratedUpdates) {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + rng.UniformInt(4);
    const Strategy x0 = RandomStrategy(m, rng);
    const int a = rng.UniformInt(m);
    const double epsilon = 0.01 + 0.3 * rng.Uniform();
    const double u = (0.01 + 0.98 * rng.Uniform()) / epsilon;
    Strategy x = x0;
    for (int t = 1; t <= 100; ++t) {
      x = UpdateStrategy(x, a, u, epsilon);
      const Strategy closed = ClosedFormStrategy(x0, a, u, epsilon, t);
      for (int k = 0; k < m; ++k) ASSERT_NEAR(x[k], closed[k], 1e-10);
    }
  }
}

TEST(StepTest, PureStateIsFixedWithoutTrembles) {
  const Game coord2 = BuiltinGame("coordination");
  DynamicsConfig cfg{0.1, 0.0, 0, 10};
  Rng rng(4);
  for (const auto& s : EnumeratePureStates(coord2)) {
    const JointState z = PureState(s, coord2);
    EXPECT_EQ(Step(z, coord2, cfg, rng), z);
  }
}

TEST(StepTest, ConstantGameMovesEachPlayerTowardRealizedAction) {
  const Game game = BuiltinGame("constant");
  DynamicsConfig cfg{0.1, 0.0, 0, 10};
  Rng rng(5);
  const JointState z = UniformState(game);
  for (int trial = 0; trial < 50; ++trial) {
    const JointState next = Step(z, game, cfg, rng);
    for (int i = 0; i < 2; ++i) {
      const int a = next.profile[i];
      // 0.5 + 0.1 * (1 - 0.5) toward the realized action.
      EXPECT_NEAR(next.strategies[i][a], 0.55, 1e-15);
      EXPECT_NEAR(next.strategies[i][1 - a], 0.45, 1e-15);
    }
  }
}

TEST(StepTest, FullTrembleMarginalsAreUniform) {
  const Game game = BuiltinGame("coordination");
  DynamicsConfig cfg{0.05, 1.0, 0, 10};
  Rng rng(6);
  JointState z = PureState(PureStateFromIndex(game, 0), game);
  const int n = 100000;
  int ones[2] = {0, 0};
  for (int t = 0; t < n; ++t) {
    StepInPlace(z, game, cfg, rng);
    ones[0] += z.profile[0];
    ones[1] += z.profile[1];
  }
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(ones[i] / double(n), 0.5, Binomial3Sigma(0.5, n));
}

TEST(StepTest, ValidatesConfig) {
  const Game rps = BuiltinGame("shifted_rps");
  Rng rng(1);
  const JointState z = UniformState(rps);
  try {
    Step(z, rps, {0.34, 0.0, 0, 1}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStepTooLarge);
  }
  EXPECT_THROW(Step(z, rps, {0.1, 1.5, 0, 1}, rng), Error);
  EXPECT_NO_THROW(Step(z, rps, {0.33, 0.0, 0, 1}, rng));
  EXPECT_LT(StepSizeBound(rps) * rps.MaxPayoff(), 1.0);
}

TEST(DetectAbsorptionTest, Examples) {
  const Game g = BuiltinGame("coordination");
  for (const auto& s : EnumeratePureStates(g)) {
    for (double delta : {1e-6, 0.1, 0.49}) {
      EXPECT_EQ(DetectAbsorption(PureState(s, g), g, delta), s);
    }
  }
  EXPECT_FALSE(DetectAbsorption(UniformState(g), g, 0.01).has_value());

  JointState z;
  z.profile = {0, 1};
  z.strategies = {Strategy::FromWeights({0.995, 0.005}), Strategy::FromWeights({0.002, 0.998})};
  const auto hit = DetectAbsorption(z, g, 0.01);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->profile, (ActionProfile{0, 1}));
  EXPECT_EQ(hit->index, 1);
  EXPECT_FALSE(DetectAbsorption(z, g, 0.004).has_value());

  // Strategies near (0,1) but the last realized profile differs.
  z.profile = {1, 1};
  EXPECT_FALSE(DetectAbsorption(z, g, 0.01).has_value());
}

TEST(DetectAbsorptionTest, InvalidDelta) {
  const Game g = BuiltinGame("coordination");
  for (double delta : {0.0, -1.0, 0.5, 0.7}) {
    try {
      DetectAbsorption(UniformState(g), g, delta);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidDelta);
    }
  }
}

TEST(RunTrajectoryTest, StartsAbsorbed) {
  const Game g = BuiltinGame("shifted_rps");
  const PureStrategyState s = PureStateFromIndex(g, 5);
  const TrajectoryRecord r = RunTrajectory(PureState(s, g), g, {0.05, 0.0, 9, 1000},
                                           {1e-3, true, 0});
  ASSERT_TRUE(r.absorption.has_value());
  EXPECT_EQ(r.absorption->state, s);
  EXPECT_EQ(r.absorption->hitting_time, 0);
  EXPECT_EQ(r.steps, 0);
}

TEST(RunTrajectoryTest, Deterministic) {
  const Game g = BuiltinGame("shifted_rps");
  const DynamicsConfig cfg{0.05, 0.05, 77, 5000};
  const TrajectoryOptions options{1e-3, false, 100};
  const TrajectoryRecord a = RunTrajectory(UniformState(g), g, cfg, options);
  const TrajectoryRecord b = RunTrajectory(UniformState(g), g, cfg, options);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.samples.size(), 51u);
  EXPECT_EQ(a.samples.back().t, 5000);
  DynamicsConfig other = cfg;
  other.seed = 78;
  EXPECT_NE(RunTrajectory(UniformState(g), g, other, options).final_state, a.final_state);
}

TEST(RunTrajectoryTest, RecordsLastStateWithStride) {
  const Game g = BuiltinGame("coordination");
  const TrajectoryRecord r =
      RunTrajectory(UniformState(g), g, {0.05, 0.1, 1, 1005}, {1e-3, false, 100});
  EXPECT_EQ(r.samples.front().t, 0);
  EXPECT_EQ(r.samples.back().t, 1005);
  EXPECT_EQ(r.samples.back().state, r.final_state);
  EXPECT_EQ(r.samples.size(), 12u);
  EXPECT_FALSE(r.absorption.has_value());
}

TEST(RunTrajectoryTest, HittingTimeWithinHorizon) {
  const Game g = BuiltinGame("coordination");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TrajectoryRecord r =
        RunTrajectory(UniformState(g), g, {0.05, 0.0, seed, 1'000'000}, {1e-3, true, 0});
    ASSERT_TRUE(r.absorption.has_value());
    EXPECT_LE(r.absorption->hitting_time, 1'000'000);
    EXPECT_EQ(r.absorption->hitting_time, r.steps);
    EXPECT_EQ(DetectAbsorption(r.final_state, g, 1e-3), r.absorption->state);
  }
}

// Unperturbed absorption on every builtin game at desk scale.
TEST(RunTrajectoryTest, UnperturbedProcessAbsorbs) {
  for (const char* name :
       {"coordination", "anticoordination", "shifted_rps", "constant", "random_positive"}) {
    const Game g = BuiltinGame(name);
    const double epsilon = std::min(0.05, 0.9 / g.MaxPayoff());
    int unabsorbed = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const TrajectoryRecord r = RunTrajectory(
          UniformState(g), g, {epsilon, 0.0, DeriveSeed(123, {seed}), 1'000'000},
          {1e-3, true, 0});
      unabsorbed += !r.absorption.has_value();
    }
    EXPECT_LE(unabsorbed, 10) << name;
  }
}

TEST(TrembleTest, ClosedForms) {
  EXPECT_NEAR(AtLeastOneTrembleProbability(0.1, 2), 1 - 0.81, 1e-15);
  EXPECT_EQ(AtLeastOneTrembleProbability(0.0, 3), 0.0);
  EXPECT_EQ(AtLeastOneTrembleProbability(1.0, 2), 1.0);
  const TrembleProbabilities p = ComputeTrembleProbabilities(0.1, 2);
  EXPECT_NEAR(p.phi, 0.19, 1e-15);
  // P(both | at least one) = 0.01 / 0.19.
  EXPECT_NEAR(p.psi, 0.01 / 0.19, 1e-14);

  const TrembleProbabilities small = ComputeTrembleProbabilities(1e-6, 3);
  EXPECT_NEAR(small.phi, 3e-6, 0.01 * 3e-6);
  EXPECT_GE(small.psi, 0.0);
  EXPECT_LE(small.psi, 2e-6);
  EXPECT_EQ(ComputeTrembleProbabilities(0.3, 1).psi, 0.0);
}

TEST(TrembleTest, OutOfDomain) {
  for (double lambda : {0.0, -0.1, 1.5}) {
    try {
      ComputeTrembleProbabilities(lambda, 2);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidLambda);
    }
  }
  // psi(1) = 1 for two players: every tremble event is a double tremble.
  EXPECT_THROW(ComputeTrembleProbabilities(1.0, 2), Error);
}

TEST(TrembleTest, SimulatedFrequencies) {
  const Game g = BuiltinGame("constant", {{"n", 3}});
  const double lambda = 0.1;
  const TrembleProbabilities p = ComputeTrembleProbabilities(lambda, 3);
  DynamicsConfig cfg{0.05, lambda, 0, 0};
  Rng rng(21);
  JointState z = UniformState(g);
  const int n = 1'000'000;
  int any = 0, multiple = 0;
  StepInfo info;
  for (int t = 0; t < n; ++t) {
    StepInPlace(z, g, cfg, rng, &info);
    any += info.trembles >= 1;
    multiple += info.trembles >= 2;
  }
  EXPECT_NEAR(any / double(n), p.phi, Binomial3Sigma(p.phi, n));
  EXPECT_NEAR(multiple / double(any), p.psi, Binomial3Sigma(p.psi, any));
}

}  // namespace
}  // namespace plearn
