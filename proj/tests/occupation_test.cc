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

#include "plearn/occupation.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "plearn/error.h"

namespace plearn {
namespace {

DynamicsConfig Config(double epsilon, double lambda, std::uint64_t seed, std::int64_t steps) {
  DynamicsConfig cfg;
  cfg.epsilon = epsilon;
  cfg.lambda = lambda;
  cfg.seed = seed;
  cfg.max_steps = steps;
  return cfg;
}

double Sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(OccupationTest, UnperturbedPureStateStaysPut) {
  const Game g = BuiltinGame("coordination");
  const PureStrategyState s = PureStateFromIndex(g, 3);
  const OccupationReport r =
      OccupationMeasure(g, Config(0.05, 0.0, 1, 10000), 1e-3, 100, PureState(s, g));
  EXPECT_EQ(r.mass, (std::vector<double>{0, 0, 0, 1}));
  EXPECT_EQ(r.mixed_mass, 0.0);
  EXPECT_EQ(r.steps, 10000);
  EXPECT_EQ(r.burn_in, 100);
}

TEST(OccupationTest, MassesSumToOne) {
  for (const char* name : {"coordination", "anticoordination", "shifted_rps"}) {
    const Game g = BuiltinGame(name);
    const OccupationReport r = OccupationMeasure(g, Config(0.05, 0.05, 2, 50000), 1e-2, 500);
    EXPECT_NEAR(Sum(r.mass) + r.mixed_mass, 1.0, 1e-12) << name;
    EXPECT_NEAR(Sum(NormalizedPureMass(r)), 1.0, 1e-12) << name;
    for (double se : r.mass_se) EXPECT_GE(se, 0.0);
  }
}

TEST(OccupationTest, Deterministic) {
  const Game g = BuiltinGame("shifted_rps");
  const DynamicsConfig cfg = Config(0.05, 0.05, 3, 20000);
  EXPECT_EQ(OccupationMeasure(g, cfg, 1e-2, 200), OccupationMeasure(g, cfg, 1e-2, 200));
}

TEST(OccupationTest, ConstantGameIsSymmetric) {
  const Game g = BuiltinGame("constant");
  const OccupationReport r = OccupationMeasure(g, Config(0.5, 0.05, 4, 400000), 1e-2, 4000);
  const double mean = Sum(r.mass) / 4;
  for (int s = 0; s < 4; ++s) {
    EXPECT_NEAR(r.mass[s], mean, 3.5 * r.mass_se[s]) << s;
  }
}

TEST(OccupationTest, SmallerLambdaConcentratesNearPureStates) {
  const Game g = BuiltinGame("coordination");
  const OccupationReport hi = OccupationMeasure(g, Config(0.9, 0.1, 5, 200000), 1e-2, 2000);
  const OccupationReport lo = OccupationMeasure(g, Config(0.9, 0.02, 5, 200000), 1e-2, 2000);
  EXPECT_LT(lo.mixed_mass + 2 * std::hypot(lo.mixed_mass_se, hi.mixed_mass_se), hi.mixed_mass);
}

TEST(OccupationTest, RejectsBadArguments) {
  const Game g = BuiltinGame("coordination");
  EXPECT_THROW(OccupationMeasure(g, Config(0.05, 0.1, 1, 1000), 0.7, 10), Error);
  EXPECT_THROW(OccupationMeasure(g, Config(0.05, 0.1, 1, 1000), 1e-2, 1000), Error);
  EXPECT_THROW(OccupationMeasure(g, Config(0.05, 1.5, 1, 1000), 1e-2, 10), Error);
}

TEST(TvDistanceTest, Examples) {
  EXPECT_EQ(TvDistance({0.5, 0.5}, {0.5, 0.5}), 0.0);
  EXPECT_EQ(TvDistance({1, 0}, {0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(TvDistance({0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}), 0.25);
  try {
    TvDistance({1}, {0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(SweepTest, DefaultSteps) {
  EXPECT_EQ(DefaultSweepSteps(0.1, 4), 1'000'000);
  EXPECT_EQ(DefaultSweepSteps(1e-4, 4), 4'000'000);
  EXPECT_EQ(DefaultSweepSteps(3e-4, 9), 3'000'000);
}

SweepOptions SmallSweep(std::vector<double> lambdas, int workers) {
  SweepOptions o;
  o.epsilon = 0.3;
  o.delta = 1e-2;
  o.lambdas = std::move(lambdas);
  o.steps = std::vector<std::int64_t>(o.lambdas.size(), 20000);
  o.master_seed = 9;
  o.runs_per_state = 300;
  o.workers = workers;
  return o;
}

TEST(SweepTest, RepeatedLambdaReproducesRow) {
  const Game g = BuiltinGame("shifted_rps");
  const SweepReport r = LambdaSweep(g, SmallSweep({0.1, 0.1, 0.05}, 1));
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].occupation, r.rows[1].occupation);
  EXPECT_NE(r.rows[1].occupation, r.rows[2].occupation);
  EXPECT_TRUE(r.rows[0].monotone_ok);
}

TEST(SweepTest, IndependentOfWorkerCount) {
  const Game g = BuiltinGame("coordination");
  const SweepReport a = LambdaSweep(g, SmallSweep({0.1, 0.05, 0.02}, 1));
  const SweepReport b = LambdaSweep(g, SmallSweep({0.1, 0.05, 0.02}, 8));
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_EQ(a.chain, b.chain);
  EXPECT_EQ(a.stationary.pi, b.stationary.pi);
}

TEST(SweepTest, RowsAreConsistent) {
  const Game g = BuiltinGame("coordination");
  const SweepReport r = LambdaSweep(g, SmallSweep({0.1, 0.05, 0.02}, 1));
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const OccupationReport& o = r.rows[k].occupation;
    EXPECT_EQ(o.burn_in, 200);
    EXPECT_DOUBLE_EQ(r.rows[k].tv_to_pi, TvDistance(NormalizedPureMass(o), r.stationary.pi));
    if (k > 0) {
      const OccupationReport& prev = r.rows[k - 1].occupation;
      const bool ok = o.mixed_mass <=
                      prev.mixed_mass + 2 * std::hypot(o.mixed_mass_se, prev.mixed_mass_se);
      EXPECT_EQ(r.rows[k].monotone_ok, ok);
    }
  }
}

TEST(SweepTest, RejectsBadLambdas) {
  const Game g = BuiltinGame("coordination");
  EXPECT_THROW(LambdaSweep(g, SmallSweep({0.05, 0.1}, 1)), Error);
  EXPECT_THROW(LambdaSweep(g, SmallSweep({0.0}, 1)), Error);
  EXPECT_THROW(LambdaSweep(g, SmallSweep({}, 1)), Error);
}

}  // namespace
}  // namespace plearn
