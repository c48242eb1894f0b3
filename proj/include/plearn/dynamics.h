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

#ifndef PLEARN_DYNAMICS_H_
#define PLEARN_DYNAMICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "plearn/game.h"
#include "plearn/rng.h"

namespace plearn {

// Mixed strategy of one player: a point of the probability simplex.
class Strategy {
 public:
  Strategy() = default;

  // Throws InvalidParams unless entries are >= 0 and sum to 1 within 1e-9.
  static Strategy FromWeights(std::vector<double> weights);
  static Strategy Uniform(int num_actions);
  static Strategy Vertex(int num_actions, int action);

  int size() const { return static_cast<int>(weights_.size()); }
  double operator[](int k) const { return weights_[k]; }
  std::span<const double> weights() const { return weights_; }
  double Sum() const;

  // Distance to the unit vector of `action` in the max norm.
  double VertexDistance(int action) const;

  // In-place x += gain * (e_chosen - x). Unchecked; callers guarantee
  // 0 < gain < 1.
  void Reinforce(int chosen, double gain);

  // Divides by the entry sum when it drifted more than 1e-12 from 1.
  // Returns true if it did.
  bool RenormalizeIfDrifted();

  bool operator==(const Strategy&) const = default;

 private:
  explicit Strategy(std::vector<double> weights) : weights_(std::move(weights)) {}

  std::vector<double> weights_;
};

// z = (alpha, x): last realized action profile and one strategy per player.
struct JointState {
  ActionProfile profile;
  std::vector<Strategy> strategies;

  bool operator==(const JointState&) const = default;
};

// Uniform strategies, profile all zeros.
JointState UniformState(const Game& game);
// The vertex state of a pure strategy state.
JointState PureState(const PureStrategyState& state, const Game& game);
bool IsConsistent(const JointState& z, const Game& game);

struct DynamicsConfig {
  double epsilon = 0.05;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::int64_t max_steps = 1'000'000;
};

// Throws StepTooLarge unless 0 < epsilon * max payoff < 1, InvalidLambda
// unless lambda is in [0, 1], InvalidParams for negative max_steps.
void ValidateConfig(const DynamicsConfig& cfg, const Game& game);

// Largest admissible step size strictly below 1 / max payoff.
double StepSizeBound(const Game& game);

struct ActionDraw {
  int action = 0;
  bool trembled = false;
};

// With probability 1 - lambda draws from x, otherwise uniformly over all
// actions (including the likely one).
ActionDraw SampleActionDetailed(const Strategy& x, double lambda, Rng& rng);
inline int SampleAction(const Strategy& x, double lambda, Rng& rng) {
  return SampleActionDetailed(x, lambda, rng).action;
}

// x + epsilon * u * (e_chosen - x). Throws StepTooLarge unless
// 0 < epsilon * u < 1.
Strategy UpdateStrategy(const Strategy& x, int chosen, double u, double epsilon);

// Strategy after t steps of repeatedly choosing `action` with payoff u:
// e - (1 - epsilon u)^t (e - x0).
Strategy ClosedFormStrategy(const Strategy& x0, int action, double u,
                            double epsilon, std::int64_t t);

struct StepInfo {
  int trembles = 0;
  int renormalizations = 0;
};

// One round: all players sample simultaneously, observe their payoff at the
// new profile, and update. In-place variant for long runs.
void StepInPlace(JointState& z, const Game& game, const DynamicsConfig& cfg,
                 Rng& rng, StepInfo* info = nullptr);
JointState Step(const JointState& z, const Game& game, const DynamicsConfig& cfg,
                Rng& rng, StepInfo* info = nullptr);

// Applies the strategy update for an already realized profile.
void ApplyProfile(JointState& z, const ActionProfile& realized,
                  const Game& game, double epsilon, StepInfo* info = nullptr);

// The pure strategy state within delta of z (max norm on every strategy) whose
// profile also equals the realized profile of z, if any. Throws InvalidDelta
// unless 0 < delta < 0.5.
std::optional<PureStrategyState> DetectAbsorption(const JointState& z,
                                                  const Game& game,
                                                  double delta);

// Profile index of the neighborhood containing z or -1. No argument checks;
// used in hot loops after the caller validated delta.
int ClassifyState(const JointState& z, const Game& game, double delta);

struct TrajectorySample {
  std::int64_t t = 0;
  JointState state;

  bool operator==(const TrajectorySample&) const = default;
};

struct Absorption {
  PureStrategyState state;
  std::int64_t hitting_time = 0;

  bool operator==(const Absorption&) const = default;
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  std::optional<Absorption> absorption;
  JointState final_state;
  std::int64_t steps = 0;
  std::int64_t trembles = 0;
  std::int64_t renormalizations = 0;

  bool operator==(const TrajectoryRecord&) const = default;
};

struct TrajectoryOptions {
  double delta = 1e-3;
  bool stop_on_absorption = false;
  // Record every `stride`-th state (and the last one); 0 records nothing.
  std::int64_t stride = 0;
};

// Iterates Step up to cfg.max_steps. Absorption stops the run only when
// lambda == 0 and stop_on_absorption is set.
TrajectoryRecord RunTrajectory(const JointState& z0, const Game& game,
                               const DynamicsConfig& cfg,
                               const TrajectoryOptions& options, Rng& rng);
// Same, with a stream seeded from cfg.seed.
TrajectoryRecord RunTrajectory(const JointState& z0, const Game& game,
                               const DynamicsConfig& cfg,
                               const TrajectoryOptions& options);

struct TrembleProbabilities {
  double phi = 0.0;  // P(at least one player trembles)
  double psi = 0.0;  // P(at least two tremble | at least one trembles)
};

// phi = 1 - (1 - lambda)^n. Defined for lambda in [0, 1].
double AtLeastOneTrembleProbability(double lambda, int num_players);

// Throws InvalidLambda for lambda outside (0, 1] or when psi leaves [0, 1).
TrembleProbabilities ComputeTrembleProbabilities(double lambda, int num_players);

}  // namespace plearn

#endif  // PLEARN_DYNAMICS_H_
