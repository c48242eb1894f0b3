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

#ifndef PLEARN_OCCUPATION_H_
#define PLEARN_OCCUPATION_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "plearn/chain.h"
#include "plearn/dynamics.h"
#include "plearn/game.h"

namespace plearn {

// Time-average occupation of the delta-neighborhoods of the pure strategy
// states along one perturbed trajectory, after discarding a burn-in prefix.
struct OccupationReport {
  std::vector<int> action_counts;
  double lambda = 0.0;
  double delta = 0.0;
  std::int64_t steps = 0;
  std::int64_t burn_in = 0;
  std::vector<double> mass;
  double mixed_mass = 0.0;
  // Batch-means standard errors of the masses above.
  std::vector<double> mass_se;
  double mixed_mass_se = 0.0;

  bool operator==(const OccupationReport&) const = default;
};

inline constexpr int kBatchCount = 50;

// Runs cfg.max_steps steps from `start` (uniform strategies by default) with
// a stream seeded by cfg.seed. A visited state counts towards s when every
// strategy is within delta of s's vertex and the realized profile is s's
// profile; anything else is mixed. lambda == 0 is accepted for testing.
OccupationReport OccupationMeasure(const Game& game, const DynamicsConfig& cfg,
                                   double delta, std::int64_t burn_in,
                                   const std::optional<JointState>& start = {});

// mass / (1 - mixed_mass); all zeros if nothing was classified.
std::vector<double> NormalizedPureMass(const OccupationReport& report);

// (1/2) sum |p_k - q_k|. Throws LengthMismatch.
double TvDistance(const std::vector<double>& p, const std::vector<double>& q);

// Default per-lambda horizon max(10^6, ceil(100 |S| / lambda)).
std::int64_t DefaultSweepSteps(double lambda, int num_states);

struct SweepOptions {
  double epsilon = 0.05;
  double delta = 1e-2;
  // Non-increasing, each in (0, 1).
  std::vector<double> lambdas;
  // Per-lambda horizons; empty means DefaultSweepSteps.
  std::vector<std::int64_t> steps;
  // Burn-in; negative means 1% of each horizon.
  std::int64_t burn_in = -1;
  std::uint64_t master_seed = 0;
  // Lifted chain estimation for pi.
  std::int64_t runs_per_state = 10'000;
  std::int64_t t_max = 1'000'000;
  // Neighborhood radius for the chain; non-positive means `delta`.
  double chain_delta = 0.0;
  int workers = 0;
};

struct SweepRow {
  OccupationReport occupation;
  double tv_to_pi = 0.0;
  // mixed_mass did not rise above the previous row by more than two combined
  // standard errors. Always true for the first row.
  bool monotone_ok = true;

  bool operator==(const SweepRow&) const = default;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  LiftedChain chain;
  StationaryDistribution stationary;
};

// Stream seed of the occupation run for `lambda`. Depends only on the master
// seed and the value of lambda, so repeated lambdas reproduce their rows.
std::uint64_t SweepSeed(std::uint64_t master_seed, double lambda);

SweepReport LambdaSweep(const Game& game, const SweepOptions& options);

}  // namespace plearn

#endif  // PLEARN_OCCUPATION_H_
