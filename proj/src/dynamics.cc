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

#include <algorithm>
#include <cmath>
#include <string>

#include "plearn/error.h"

namespace plearn {
namespace {

constexpr double kSimplexTolerance = 1e-9;
constexpr double kDriftTolerance = 1e-12;

void CheckGain(double epsilon, double u) {
  const double gain = epsilon * u;
  if (!(gain > 0.0) || !(gain < 1.0)) {
    throw Error(ErrorCode::kStepTooLarge,
                "epsilon * payoff must lie in (0, 1), got " +
                    std::to_string(gain));
  }
}

void CheckAction(const Strategy& x, int action) {
  if (action < 0 || action >= x.size()) {
    throw Error(ErrorCode::kInvalidParams,
                "action " + std::to_string(action) + " out of range [0, " +
                    std::to_string(x.size()) + ")");
  }
}

}  // namespace

Strategy Strategy::FromWeights(std::vector<double> weights) {
  if (weights.empty()) {
    throw Error(ErrorCode::kInvalidParams, "strategy: no actions");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidParams,
                  "strategy: negative or non-finite weight");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw Error(ErrorCode::kInvalidParams,
                "strategy: weights sum to " + std::to_string(sum));
  }
  return Strategy(std::move(weights));
}

Strategy Strategy::Uniform(int num_actions) {
  return Strategy(std::vector<double>(num_actions, 1.0 / num_actions));
}

Strategy Strategy::Vertex(int num_actions, int action) {
  std::vector<double> w(num_actions, 0.0);
  w[action] = 1.0;
  return Strategy(std::move(w));
}

double Strategy::Sum() const {
  double sum = 0.0;
  for (double w : weights_) sum += w;
  return sum;
}

double Strategy::VertexDistance(int action) const {
  double d = std::abs(1.0 - weights_[action]);
  for (int k = 0; k < size(); ++k) {
    if (k != action) d = std::max(d, std::abs(weights_[k]));
  }
  return d;
}

void Strategy::Reinforce(int chosen, double gain) {
  const double keep = 1.0 - gain;
  for (int k = 0; k < size(); ++k) {
    if (k == chosen) {
      weights_[k] += gain * (1.0 - weights_[k]);
    } else {
      weights_[k] *= keep;
    }
  }
}

bool Strategy::RenormalizeIfDrifted() {
  const double sum = Sum();
  if (std::abs(sum - 1.0) <= kDriftTolerance) return false;
  for (double& w : weights_) w /= sum;
  return true;
}

JointState UniformState(const Game& game) {
  JointState z;
  z.profile.assign(game.num_players(), 0);
  for (int i = 0; i < game.num_players(); ++i) {
    z.strategies.push_back(Strategy::Uniform(game.num_actions(i)));
  }
  return z;
}

JointState PureState(const PureStrategyState& state, const Game& game) {
  JointState z;
  z.profile = state.profile;
  for (int i = 0; i < game.num_players(); ++i) {
    z.strategies.push_back(Strategy::Vertex(game.num_actions(i), state.profile[i]));
  }
  return z;
}

bool IsConsistent(const JointState& z, const Game& game) {
  if (!game.IsValidProfile(z.profile)) return false;
  if (static_cast<int>(z.strategies.size()) != game.num_players()) return false;
  for (int i = 0; i < game.num_players(); ++i) {
    if (z.strategies[i].size() != game.num_actions(i)) return false;
  }
  return true;
}

double StepSizeBound(const Game& game) {
  return std::nextafter(1.0 / game.MaxPayoff(), 0.0);
}

void ValidateConfig(const DynamicsConfig& cfg, const Game& game) {
  if (!(cfg.epsilon > 0.0) || !(cfg.epsilon * game.MaxPayoff() < 1.0)) {
    throw Error(ErrorCode::kStepTooLarge,
                "epsilon: need 0 < epsilon * max payoff < 1, got epsilon = " +
                    std::to_string(cfg.epsilon) + ", max payoff = " +
                    std::to_string(game.MaxPayoff()));
  }
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidLambda,
                "lambda: must lie in [0, 1], got " + std::to_string(cfg.lambda));
  }
  if (cfg.max_steps < 0) {
    throw Error(ErrorCode::kInvalidParams, "max_steps: must be >= 0");
  }
}

ActionDraw SampleActionDetailed(const Strategy& x, double lambda, Rng& rng) {
  if (lambda > 0.0 && rng.Bernoulli(lambda)) {
    return {rng.UniformInt(x.size()), true};
  }
  return {rng.Categorical(x.weights()), false};
}

Strategy UpdateStrategy(const Strategy& x, int chosen, double u, double epsilon) {
  CheckGain(epsilon, u);
  CheckAction(x, chosen);
  Strategy next = x;
  next.Reinforce(chosen, epsilon * u);
  return next;
}

Strategy ClosedFormStrategy(const Strategy& x0, int action, double u,
                            double epsilon, std::int64_t t) {
  CheckGain(epsilon, u);
  CheckAction(x0, action);
  if (t < 0) throw Error(ErrorCode::kInvalidParams, "t: must be >= 0");
  const double decay = std::pow(1.0 - epsilon * u, static_cast<double>(t));
  std::vector<double> w(x0.size());
  for (int k = 0; k < x0.size(); ++k) {
    const double target = k == action ? 1.0 : 0.0;
    w[k] = target - decay * (target - x0[k]);
  }
  return Strategy::FromWeights(std::move(w));
}

void ApplyProfile(JointState& z, const ActionProfile& realized,
                  const Game& game, double epsilon, StepInfo* info) {
  const int index = game.ProfileIndex(realized);
  for (int i = 0; i < game.num_players(); ++i) {
    Strategy& x = z.strategies[i];
    x.Reinforce(realized[i], epsilon * game.PayoffAt(i, index));
    if (x.RenormalizeIfDrifted() && info) ++info->renormalizations;
  }
  z.profile = realized;
}

void StepInPlace(JointState& z, const Game& game, const DynamicsConfig& cfg,
                 Rng& rng, StepInfo* info) {
  const int n = game.num_players();
  if (info) *info = StepInfo{};
  // Every player samples before anyone updates.
  ActionProfile next(n);
  for (int i = 0; i < n; ++i) {
    const ActionDraw draw = SampleActionDetailed(z.strategies[i], cfg.lambda, rng);
    next[i] = draw.action;
    if (draw.trembled && info) ++info->trembles;
  }
  ApplyProfile(z, next, game, cfg.epsilon, info);
}

JointState Step(const JointState& z, const Game& game, const DynamicsConfig& cfg,
                Rng& rng, StepInfo* info) {
  ValidateConfig(cfg, game);
  JointState next = z;
  StepInPlace(next, game, cfg, rng, info);
  return next;
}

int ClassifyState(const JointState& z, const Game& game, double delta) {
  for (int i = 0; i < game.num_players(); ++i) {
    if (!(z.strategies[i].VertexDistance(z.profile[i]) < delta)) return -1;
  }
  return game.ProfileIndex(z.profile);
}

std::optional<PureStrategyState> DetectAbsorption(const JointState& z,
                                                  const Game& game,
                                                  double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw Error(ErrorCode::kInvalidDelta,
                "delta: must lie in (0, 0.5), got " + std::to_string(delta));
  }
  const int index = ClassifyState(z, game, delta);
  if (index < 0) return std::nullopt;
  return PureStrategyState{z.profile, index};
}

TrajectoryRecord RunTrajectory(const JointState& z0, const Game& game,
                               const DynamicsConfig& cfg,
                               const TrajectoryOptions& options, Rng& rng) {
  ValidateConfig(cfg, game);
  if (!IsConsistent(z0, game)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "initial state does not match the game dimensions");
  }
  if (!(options.delta > 0.0 && options.delta < 0.5)) {
    throw Error(ErrorCode::kInvalidDelta,
                "delta: must lie in (0, 0.5), got " + std::to_string(options.delta));
  }
  if (options.stride < 0) {
    throw Error(ErrorCode::kInvalidParams, "stride: must be >= 0");
  }
  const bool watch = options.stop_on_absorption && cfg.lambda == 0.0;

  TrajectoryRecord record;
  JointState z = z0;
  auto absorbed_at = [&](std::int64_t t) {
    const int index = ClassifyState(z, game, options.delta);
    if (index < 0) return false;
    record.absorption = Absorption{{z.profile, index}, t};
    return true;
  };

  std::int64_t t = 0;
  if (options.stride > 0) record.samples.push_back({0, z});
  if (!(watch && absorbed_at(0))) {
    StepInfo info;
    while (t < cfg.max_steps) {
      StepInPlace(z, game, cfg, rng, &info);
      ++t;
      record.trembles += info.trembles;
      record.renormalizations += info.renormalizations;
      if (options.stride > 0 && t % options.stride == 0) {
        record.samples.push_back({t, z});
      }
      if (watch && absorbed_at(t)) break;
    }
  }
  if (options.stride > 0 && record.samples.back().t != t) {
    record.samples.push_back({t, z});
  }
  record.steps = t;
  record.final_state = std::move(z);
  return record;
}

TrajectoryRecord RunTrajectory(const JointState& z0, const Game& game,
                               const DynamicsConfig& cfg,
                               const TrajectoryOptions& options) {
  Rng rng(cfg.seed);
  return RunTrajectory(z0, game, cfg, options, rng);
}

double AtLeastOneTrembleProbability(double lambda, int num_players) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidLambda,
                "lambda: must lie in [0, 1], got " + std::to_string(lambda));
  }
  if (num_players < 1) {
    throw Error(ErrorCode::kInvalidParams, "n: must be >= 1");
  }
  if (lambda == 1.0) return 1.0;
  return -std::expm1(num_players * std::log1p(-lambda));
}

TrembleProbabilities ComputeTrembleProbabilities(double lambda, int num_players) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidLambda,
                "lambda: psi needs lambda in (0, 1], got " + std::to_string(lambda));
  }
  TrembleProbabilities p;
  p.phi = AtLeastOneTrembleProbability(lambda, num_players);
  // Exactly one of n independent lambda-coins, conditioned on at least one.
  const double exactly_one =
      num_players * lambda * std::pow(1.0 - lambda, num_players - 1);
  p.psi = 1.0 - exactly_one / p.phi;
  // Roundoff can push psi a hair below zero when exactly_one ~ phi.
  if (p.psi < 0.0 && p.psi > -1e-12) p.psi = 0.0;
  if (!(p.psi >= 0.0 && p.psi < 1.0)) {
    throw Error(ErrorCode::kInvalidLambda,
                "lambda = " + std::to_string(lambda) +
                    " puts psi outside [0, 1)");
  }
  return p;
}

}  // namespace plearn
